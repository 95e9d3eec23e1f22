export * from "./types.js";
export * from "./store.js";
export * from "./layout.js";
export * from "./render.js";
export * from "./client.js";
export * from "./explanation.js";
