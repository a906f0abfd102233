import { describe, expect, it } from "vitest";
import { RequestGate } from "../src/requestGate.js";

describe("RequestGate", () => {
  it("treats only the newest token as latest", () => {
    const gate = new RequestGate();
    const first = gate.next();
    expect(gate.isLatest(first)).toBe(true);
    const second = gate.next();
    expect(gate.isLatest(first)).toBe(false);
    expect(gate.isLatest(second)).toBe(true);
  });

  it("hands out strictly increasing tokens", () => {
    const gate = new RequestGate();
    const a = gate.next();
    const b = gate.next();
    const c = gate.next();
    expect(b).toBeGreaterThan(a);
    expect(c).toBeGreaterThan(b);
  });

  it("never rehabilitates a stale token", () => {
    const gate = new RequestGate();
    const old = gate.next();
    gate.next();
    gate.next();
    expect(gate.isLatest(old)).toBe(false);
  });
});
