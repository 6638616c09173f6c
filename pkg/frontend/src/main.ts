/** Bootstraps the annotator app: one delegated click listener, keyboard
 * shortcuts 1-5 for the interior palette, and the submit/conflict flows.
 */

import { InvalidTagsError, ServiceClient, StaleRevisionError } from "./api.js";
import { TaskEditor } from "./state.js";
import {
  renderBanner,
  renderDialogue,
  renderDone,
  renderGuidelines,
  renderPalette,
  renderSubmitBar,
  renderTokens,
  type BannerKind,
} from "./render.js";
import { TAG_KEYS } from "./types.js";

const params = new URLSearchParams(window.location.search);
const annotator = params.get("annotator") ?? "anonymous";
const serviceUrl = params.get("service") ?? "http://127.0.0.1:8008";

const client = new ServiceClient(serviceUrl);
const root = document.getElementById("app") as HTMLElement;

let editor: TaskEditor | null = null;
let banner: { kind: BannerKind; message: string } | null = null;
let guidelinesText = "";

function draw(): void {
  if (!editor) {
    root.innerHTML = renderDone() + renderGuidelines(guidelinesText);
    return;
  }
  root.innerHTML =
    (banner ? renderBanner(banner.kind, banner.message) : "") +
    renderDialogue(editor.task) +
    renderTokens(editor) +
    renderPalette(editor) +
    renderSubmitBar(editor) +
    renderGuidelines(guidelinesText);
}

async function loadNext(): Promise<void> {
  const task = await client.nextTask(annotator);
  editor = task ? new TaskEditor(task, window.localStorage) : null;
  draw();
}

async function submit(): Promise<void> {
  if (!editor || !editor.canSubmit()) return;
  const body = editor.payload();
  try {
    await client.submitTags(editor.task.task_id, body.tags, body.revision);
    editor.clearDraft();
    banner = { kind: "info", message: "Submitted. Fetching the next task." };
    await loadNext();
  } catch (err) {
    if (err instanceof StaleRevisionError) {
      // Someone else wrote first: adopt the fresh revision, keep edits.
      const fresh = await client.getTask(editor.task.task_id);
      editor.adoptRevision(fresh.revision);
      banner = {
        kind: "conflict",
        message:
          "This task changed on the server (your edits are kept). Review and submit again.",
      };
    } else if (err instanceof InvalidTagsError) {
      editor.markInvalidPositions(err.positions);
      banner = { kind: "error", message: `Rejected: ${err.message}` };
    } else {
      banner = {
        kind: "error",
        message: `Network problem, nothing lost - try again. (${String(err)})`,
      };
    }
    draw();
  }
}

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!target || !editor) return;
  const action = target.getAttribute("data-action");
  if (action === "cycle") {
    const index = Number(target.getAttribute("data-index"));
    editor.selected = index;
    editor.cycle(index);
    draw();
  } else if (action === "assign") {
    if (editor.selected !== null) {
      editor.assign(editor.selected, target.getAttribute("data-tag") as never);
      draw();
    }
  } else if (action === "toggle-mi") {
    editor.setMissingInfo((target as HTMLInputElement).checked);
    draw();
  } else if (action === "submit") {
    void submit();
  }
});

document.addEventListener("keydown", (event) => {
  if (!editor || editor.selected === null) return;
  const tag = TAG_KEYS[event.key];
  if (tag) {
    editor.assign(editor.selected, tag);
    draw();
  }
});

void (async () => {
  guidelinesText = await client.guidelines().catch(() => "");
  await loadNext();
})();
