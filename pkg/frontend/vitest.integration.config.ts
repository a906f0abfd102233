import { defineConfig } from "vitest/config";

// Spawns `lfr synth` + `lfr serve` and drives the real viewer against them,
// so the budget covers dataset synthesis, service startup and an SR render.
export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/integration.test.ts"],
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
