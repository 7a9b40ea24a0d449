// String-template rendering keeps the views pure and testable without
// a browser; app.ts assigns the output to innerHTML.

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function esc(text: string | number | null | undefined): string {
  if (text === null || text === undefined) return "";
  return String(text).replace(/[&<>"']/g, (c) => ESCAPES[c] ?? c);
}

/** Join rendered fragments, dropping empties. */
export function frag(...parts: Array<string | null | undefined>): string {
  return parts.filter((p): p is string => Boolean(p)).join("");
}
