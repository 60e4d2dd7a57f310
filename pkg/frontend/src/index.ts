export * from "./api.js";
export * from "./analysisView.js";
export * from "./assignmentsPanel.js";
export * from "./colorRamp.js";
export * from "./scoresDashboard.js";
export * from "./types.js";
export * from "./underline.js";
export * from "./viewState.js";
