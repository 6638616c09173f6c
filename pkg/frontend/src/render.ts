/** Pure HTML-string renderers; the DOM wiring lives in main.ts.
 *
 * Every interactive element carries data- attributes consumed by one
 * delegated event listener, so these functions stay testable without a
 * browser.
 */

import { TaskEditor } from "./state.js";
import { INTERIOR_TAGS, type TagCode, type TaskPayload } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderDialogue(task: TaskPayload): string {
  const turns = task.turns
    .map(
      ([speaker, utterance]) =>
        `<div class="turn"><span class="speaker">${escapeHtml(speaker)}:</span> ` +
        `${escapeHtml(utterance)}</div>`,
    )
    .join("");
  const gold = task.gold_summary
    ? `<div class="gold-summary"><h3>Gold summary</h3><p>${escapeHtml(
        task.gold_summary.join(" "),
      )}</p></div>`
    : "";
  return `<div class="dialogue"><h3>Dialogue ${escapeHtml(task.dialogue_id)}</h3>${turns}</div>${gold}`;
}

/** Clickable summary tokens; the [EOS] slot renders as the MI toggle row. */
export function renderTokens(editor: TaskEditor): string {
  const chips = editor.task.summary_tokens
    .slice(0, editor.eosIndex)
    .map((token, i) => {
      const tag = editor.tagAt(i);
      const classes = ["token", `tag-${tag}`];
      if (editor.selected === i) classes.push("selected");
      if (editor.invalidPositions.has(i)) classes.push("invalid");
      return (
        `<button class="${classes.join(" ")}" data-action="cycle" data-index="${i}">` +
        `${escapeHtml(token)}<sup>${tag}</sup></button>`
      );
    })
    .join("");
  const eosTag = editor.missingInfo ? "M" : "O";
  const confirmed = editor.missingInfoConfirmed ? "confirmed" : "unconfirmed";
  return (
    `<div class="tokens">${chips}` +
    `<span class="token eos ${confirmed}" data-index="${editor.eosIndex}">[EOS]<sup>${eosTag}</sup></span>` +
    `</div>`
  );
}

/** Palette buttons for the selected token; M is deliberately absent. */
export function renderPalette(editor: TaskEditor): string {
  const buttons = INTERIOR_TAGS.map(
    (tag, i) =>
      `<button class="palette-btn tag-${tag}" data-action="assign" data-tag="${tag}">` +
      `${tag} <kbd>${i + 1}</kbd></button>`,
  ).join("");
  const checked = editor.missingInfo ? "checked" : "";
  const confirmNote = editor.missingInfoConfirmed
    ? ""
    : `<span class="mi-note">confirm the missing-information verdict to enable submit</span>`;
  return (
    `<div class="palette">${buttons}</div>` +
    `<div class="mi-toggle"><label>` +
    `<input type="checkbox" data-action="toggle-mi" ${checked} /> ` +
    `Missing information (tags the [EOS] slot with M)</label> ${confirmNote}</div>`
  );
}

export function renderSubmitBar(editor: TaskEditor): string {
  const disabled = editor.canSubmit() ? "" : "disabled";
  return (
    `<div class="submit-bar">` +
    `<button data-action="submit" ${disabled}>Submit</button>` +
    `<span class="revision">revision ${editor.task.revision}</span>` +
    `</div>`
  );
}

export type BannerKind = "info" | "conflict" | "error";

export function renderBanner(kind: BannerKind, message: string): string {
  return `<div class="banner banner-${kind}">${escapeHtml(message)}</div>`;
}

export function renderGuidelines(text: string): string {
  return `<details class="guidelines"><summary>Tagging guidelines</summary><pre>${escapeHtml(
    text,
  )}</pre></details>`;
}

export function renderDone(): string {
  return `<div class="done">No open tasks left. Thanks!</div>`;
}
