import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the e2e suite self-gates on TRAINER_E2E and needs a long window for
    // its 30 s snapshot-rate measurement
    testTimeout: 60_000,
    hookTimeout: 30_000,
  },
});
