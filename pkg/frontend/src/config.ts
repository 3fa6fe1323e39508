/** API base URL. Same-origin by default; edit API_BASE for a fixed deployment
 * or set globalThis.__CHEMDELT_API_BASE__ before the app loads (tests do). */
export const API_BASE = "";

export function apiBase(): string {
  const override = (globalThis as Record<string, unknown>)["__CHEMDELT_API_BASE__"];
  return typeof override === "string" ? override : API_BASE;
}
