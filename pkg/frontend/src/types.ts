/** Shared types mirroring the annotation service's JSON payloads. */

export type TagCode = "O" | "W" | "OB" | "C" | "N" | "M";

/** Tags assignable to interior (non-final) summary tokens. */
export const INTERIOR_TAGS: readonly TagCode[] = ["O", "W", "OB", "C", "N"];

/** Keyboard shortcuts 1-5 for the interior palette. */
export const TAG_KEYS: Record<string, TagCode> = {
  "1": "O",
  "2": "W",
  "3": "OB",
  "4": "C",
  "5": "N",
};

export const EOS_TOKEN = "[EOS]";

export interface TaskPayload {
  task_id: string;
  status: "open" | "claimed" | "done";
  claimant: string | null;
  revision: number;
  dialogue_id: string;
  turns: [string, string][];
  summary_tokens: string[];
  tags: TagCode[];
  gold_summary: string[] | null;
}

export interface StatsPayload {
  tasks: { open: number; claimed: number; done: number };
  tag_stats: Record<TagCode, { count: number; fraction: number }>;
}

/** Per-position rejection reasons from a 422 response. */
export type InvalidPositions = Record<string, string>;
