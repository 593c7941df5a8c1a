import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // The e2e suite shells out to the Python analyzer; give it headroom.
    testTimeout: 60_000,
    hookTimeout: 30_000,
  },
});
