/** Inline word(TAG) rendering, matching the corpus text format. */

import type { TagCode } from "./types.js";

/** Render parallel token/tag lists as space-joined word(TAG) items. */
export function renderInlineTagged(tokens: string[], tags: TagCode[]): string {
  if (tokens.length !== tags.length) {
    throw new Error(`${tokens.length} tokens but ${tags.length} tags`);
  }
  return tokens.map((token, i) => `${token}(${tags[i]})`).join(" ");
}

/** Parse a JSONL export line into its tokens and tags. */
export function parseExportLine(line: string): { tokens: string[]; tags: TagCode[] } {
  const record = JSON.parse(line);
  return { tokens: record.summary_tokens, tags: record.tags };
}
