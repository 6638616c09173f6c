import { describe, expect, it } from "vitest";

import { renderDialogue, renderPalette, renderSubmitBar, renderTokens } from "../src/render.js";
import { TaskEditor } from "../src/state.js";
import type { TagCode, TaskPayload } from "../src/types.js";

function task(): TaskPayload {
  return {
    task_id: "task-00001",
    status: "claimed",
    claimant: "ann",
    revision: 1,
    dialogue_id: "d1",
    turns: [["Mary", "lend me a few box <3"]],
    summary_tokens: ["Adam", "will", ".", "[EOS]"],
    tags: ["O", "O", "O", "O"] as TagCode[],
    gold_summary: ["Carter", "will", "lend", "money"],
  };
}

describe("renderTokens", () => {
  it("renders one cycle button per interior token and the EOS toggle slot", () => {
    const editor = new TaskEditor(task());
    const html = renderTokens(editor);
    expect(html.match(/data-action="cycle"/g)?.length).toBe(3);
    expect(html).toContain("[EOS]<sup>O</sup>");
    expect(html).not.toContain('data-action="cycle" data-index="3"');
  });

  it("shows assigned tags and invalid highlights", () => {
    const editor = new TaskEditor(task());
    editor.assign(0, "W");
    editor.markInvalidPositions({ "1": "nope" });
    const html = renderTokens(editor);
    expect(html).toContain("Adam<sup>W</sup>");
    expect(html).toContain("invalid");
    expect(html).toContain("tag-W");
  });

  it("reflects the MI toggle on the EOS slot", () => {
    const editor = new TaskEditor(task());
    editor.setMissingInfo(true);
    expect(renderTokens(editor)).toContain("[EOS]<sup>M</sup>");
  });
});

describe("renderPalette", () => {
  it("offers exactly the five interior tags, never M", () => {
    const editor = new TaskEditor(task());
    const html = renderPalette(editor);
    for (const tag of ["O", "W", "OB", "C", "N"]) {
      expect(html).toContain(`data-tag="${tag}"`);
    }
    expect(html).not.toContain('data-tag="M"');
    expect(html).toContain("toggle-mi");
  });

  it("nags until the MI verdict is confirmed", () => {
    const editor = new TaskEditor(task());
    expect(renderPalette(editor)).toContain("confirm the missing-information");
    editor.setMissingInfo(false);
    expect(renderPalette(editor)).not.toContain("confirm the missing-information");
  });
});

describe("renderSubmitBar", () => {
  it("disables submit until the editor allows it", () => {
    const editor = new TaskEditor(task());
    expect(renderSubmitBar(editor)).toContain("disabled");
    editor.setMissingInfo(false);
    expect(renderSubmitBar(editor)).not.toContain("disabled");
  });
});

describe("renderDialogue", () => {
  it("escapes utterances and shows the gold summary when present", () => {
    const html = renderDialogue(task());
    expect(html).toContain("&lt;3");
    expect(html).toContain("Gold summary");
    expect(html).toContain("Carter will lend money");
  });

  it("omits the gold block when absent", () => {
    const wipedTask = { ...task(), gold_summary: null };
    expect(renderDialogue(wipedTask)).not.toContain("Gold summary");
  });
});
