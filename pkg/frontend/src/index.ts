export * from "./api.js";
export * from "./canvas.js";
export * from "./palette.js";
export * from "./run.js";
