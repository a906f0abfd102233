import { defineConfig } from "vitest/config";

// Unit tests only. The end-to-end test spawns the Python service and has its
// own config (vitest.integration.config.ts) with a matching long timeout.
export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    exclude: ["**/node_modules/**", "**/dist/**", "tests/integration.test.ts"],
  },
});
