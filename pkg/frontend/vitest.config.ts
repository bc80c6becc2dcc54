import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["./test/setup.gateway.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
