/** Text-block rendering with color-role linking. */

import type { TextBlock } from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Paragraphs of runs; a run with a role is painted in that theme color. */
export function renderTextBlock(block: TextBlock, theme: Record<string, string>): string {
  const paras = block.paragraphs.map((para) => {
    const runs = para.map((run) => {
      const text = escapeHtml(run.text);
      if (run.role && theme[run.role]) {
        return `<span class="tok" style="color:${theme[run.role]}">${text}</span>`;
      }
      return text;
    });
    return `<p>${runs.join("")}</p>`;
  });
  return paras.join("");
}
