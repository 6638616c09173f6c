/** Local editing state for one annotation task.
 *
 * The editor is the client-side mirror of the server's validation rules:
 * interior tokens take {O, W, OB, C, N} only, the missing-information
 * verdict lives on the final [EOS] slot and is reachable solely through
 * the dedicated toggle, and a submission payload cannot be produced until
 * the toggle has been explicitly confirmed. Unsent edits persist to
 * storage so a reload restores them.
 */

import {
  EOS_TOKEN,
  INTERIOR_TAGS,
  type TagCode,
  type TaskPayload,
} from "./types.js";

/** Minimal storage surface (window.localStorage or a test fake). */
export interface EditStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

interface PersistedEdit {
  revision: number;
  tags: TagCode[];
  miConfirmed: boolean;
}

export class TaskEditor {
  readonly task: TaskPayload;
  private tags: TagCode[];
  private miConfirmed = false;
  private dirtyFlag = false;
  private storage: EditStorage | null;
  /** Positions rejected by the server's last 422, for highlighting. */
  invalidPositions: Set<number> = new Set();
  selected: number | null = null;

  constructor(task: TaskPayload, storage: EditStorage | null = null) {
    this.task = task;
    this.storage = storage;
    this.tags = task.tags.slice() as TagCode[];
    this.restore();
  }

  private get storageKey(): string {
    return `faithtag-edit-${this.task.task_id}`;
  }

  /** Index of the [EOS] slot (always the last token). */
  get eosIndex(): number {
    return this.task.summary_tokens.length - 1;
  }

  get dirty(): boolean {
    return this.dirtyFlag;
  }

  get missingInfoConfirmed(): boolean {
    return this.miConfirmed;
  }

  get missingInfo(): boolean {
    return this.tags[this.eosIndex] === "M";
  }

  currentTags(): TagCode[] {
    return this.tags.slice();
  }

  tagAt(index: number): TagCode {
    const tag = this.tags[index];
    if (tag === undefined) throw new Error(`no token at ${index}`);
    return tag;
  }

  /** Assign an interior tag; M and the [EOS] slot are off limits. */
  assign(index: number, tag: TagCode): boolean {
    if (index < 0 || index >= this.eosIndex) return false;
    if (!INTERIOR_TAGS.includes(tag)) return false;
    this.tags[index] = tag;
    this.markDirty();
    return true;
  }

  /** Clicking a token cycles it O -> W -> OB -> C -> N -> O. */
  cycle(index: number): boolean {
    if (index < 0 || index >= this.eosIndex) return false;
    const current = INTERIOR_TAGS.indexOf(this.tags[index] as TagCode);
    const next = INTERIOR_TAGS[(current + 1) % INTERIOR_TAGS.length] as TagCode;
    this.tags[index] = next;
    this.markDirty();
    return true;
  }

  /** The only path to M: the end-of-summary missing-information toggle. */
  setMissingInfo(on: boolean): void {
    this.tags[this.eosIndex] = on ? "M" : "O";
    this.miConfirmed = true;
    this.markDirty();
  }

  /** Submit stays disabled until the MI toggle was explicitly confirmed. */
  canSubmit(): boolean {
    return this.miConfirmed && this.validationErrors().length === 0;
  }

  /** Client-side mirror of the server's tag validation. */
  validationErrors(): string[] {
    const errors: string[] = [];
    if (this.tags.length !== this.task.summary_tokens.length) {
      errors.push(
        `expected ${this.task.summary_tokens.length} tags, have ${this.tags.length}`,
      );
    }
    this.tags.forEach((tag, i) => {
      if (!["O", "W", "OB", "C", "N", "M"].includes(tag)) {
        errors.push(`position ${i}: unknown tag ${tag}`);
      } else if (tag === "M" && i !== this.eosIndex) {
        errors.push(`position ${i}: M is only legal on the end-of-summary slot`);
      }
    });
    if (this.task.summary_tokens[this.eosIndex] !== EOS_TOKEN) {
      errors.push(`final token is not ${EOS_TOKEN}`);
    }
    return errors;
  }

  /** Build the submission body; refuses to construct an invalid payload. */
  payload(): { tags: TagCode[]; revision: number } {
    if (!this.miConfirmed) {
      throw new Error("confirm the missing-information toggle before submitting");
    }
    const errors = this.validationErrors();
    if (errors.length > 0) {
      throw new Error(`invalid tags: ${errors.join("; ")}`);
    }
    return { tags: this.tags.slice(), revision: this.task.revision };
  }

  /** Adopt the server's current revision after a 409, keeping local edits. */
  adoptRevision(revision: number): void {
    this.task.revision = revision;
    this.persist();
  }

  markInvalidPositions(positions: Record<string, string>): void {
    this.invalidPositions = new Set(
      Object.keys(positions)
        .map((p) => Number(p))
        .filter((p) => p >= 0),
    );
  }

  /** Drop the persisted draft (after a successful submit). */
  clearDraft(): void {
    this.storage?.removeItem(this.storageKey);
  }

  private markDirty(): void {
    this.dirtyFlag = true;
    this.invalidPositions.clear();
    this.persist();
  }

  private persist(): void {
    if (!this.storage) return;
    const draft: PersistedEdit = {
      revision: this.task.revision,
      tags: this.tags,
      miConfirmed: this.miConfirmed,
    };
    this.storage.setItem(this.storageKey, JSON.stringify(draft));
  }

  private restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(this.storageKey);
    if (!raw) return;
    try {
      const draft = JSON.parse(raw) as PersistedEdit;
      if (
        draft.revision === this.task.revision &&
        draft.tags.length === this.task.summary_tokens.length
      ) {
        this.tags = draft.tags.slice();
        this.miConfirmed = draft.miConfirmed;
        this.dirtyFlag = true;
      }
    } catch {
      this.storage.removeItem(this.storageKey);
    }
  }
}
