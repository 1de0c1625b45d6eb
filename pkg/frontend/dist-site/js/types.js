/** Wire types for the occusearch REST API (see docs/api.md in the repo root). */
export const ENGINES = ["diffusion", "pconv"];
