"""Domain types, tokenization, the inline ``word(TAG)`` format, JSONL
persistence, dialogue-level splitting and tag statistics."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    BadRatio,
    EmptyDataset,
    IoError,
    LengthMismatch,
    MalformedInlineTag,
    SchemaError,
)
from .tags import EOS_TOKEN, TAG_BY_CODE, TAG_CODES, require_tag

_TRAILING_PUNCT = {".", ",", "?", "!"}

SPLIT_NAMES = ("train", "validation", "test")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass
class Dialogue:
    """A conversation: an id plus ordered (speaker, utterance) turns."""

    id: str
    turns: list[tuple[str, str]]

    def __post_init__(self):
        if not self.turns:
            raise ValueError(f"dialogue {self.id!r} has no turns")
        for i, (speaker, _) in enumerate(self.turns):
            if not speaker:
                raise ValueError(f"dialogue {self.id!r} turn {i} has an empty speaker")
        self.turns = [(s, u) for s, u in self.turns]

    def flat_tokens(self) -> list[str]:
        """The dialogue as one token stream: ``speaker : utterance ...``."""
        out: list[str] = []
        for speaker, utterance in self.turns:
            out.append(speaker)
            out.append(":")
            out.extend(tokenize(utterance))
        return out

    def render(self) -> str:
        """Human-readable transcript, one ``speaker: utterance`` per line."""
        return "\n".join(f"{s}: {u}" for s, u in self.turns)


@dataclass
class TaggedSummary:
    """Summary tokens with one faithfulness tag per token.

    The final token is always the ``[EOS]`` sentinel; ``M`` is only legal
    there.
    """

    tokens: list[str]
    tags: list[str]
    source_model: str | None = None

    def __post_init__(self):
        validate_tagged(self.tokens, self.tags)

    def word_tokens(self) -> list[str]:
        """Summary tokens without the trailing ``[EOS]`` sentinel."""
        return self.tokens[:-1]

    def missing_information(self) -> bool:
        return self.tags[-1] == "M"


def validate_tagged(tokens: list[str], tags: list[str]) -> None:
    """Enforce the tagged-summary invariants, raising ValueError on breach."""
    if len(tokens) != len(tags):
        raise ValueError(
            f"{len(tokens)} tokens but {len(tags)} tags"
        )
    if not tokens or tokens[-1] != EOS_TOKEN:
        raise ValueError(f"last token must be {EOS_TOKEN!r}")
    for i, tag in enumerate(tags):
        if tag not in TAG_BY_CODE:
            raise ValueError(f"unknown tag code {tag!r} at position {i}")
        if tag == "M" and i != len(tags) - 1:
            raise ValueError(f"M tag at interior position {i}")


@dataclass
class DialogueExample:
    """One (dialogue, tagged summary) pair, optionally with a gold summary."""

    dialogue: Dialogue
    summary: TaggedSummary
    gold_summary: list[str] | None = None

    def __post_init__(self):
        if self.gold_summary is not None and not self.gold_summary:
            raise ValueError("gold_summary present but empty")


@dataclass
class Dataset:
    examples: list[DialogueExample]
    split_assignment: dict[str, str] | None = None

    def __post_init__(self):
        if self.split_assignment is not None:
            for name in self.split_assignment.values():
                if name not in SPLIT_NAMES:
                    raise ValueError(f"unknown split name {name!r}")

    def __len__(self) -> int:
        return len(self.examples)

    def dialogue_ids(self) -> list[str]:
        """Unique dialogue ids in first-appearance order."""
        seen: dict[str, None] = {}
        for ex in self.examples:
            seen.setdefault(ex.dialogue.id, None)
        return list(seen)

    def subset(self, split: str) -> "Dataset":
        if self.split_assignment is None:
            raise ValueError("dataset has no split assignment")
        kept = [
            ex for ex in self.examples
            if self.split_assignment.get(ex.dialogue.id) == split
        ]
        return Dataset(kept)


# ---------------------------------------------------------------------------
# Tokenization and the inline word(TAG) format
# ---------------------------------------------------------------------------

def tokenize(text: str) -> list[str]:
    """Whitespace tokenization with trailing sentence punctuation detached.

    Each of ``. , ? !`` at the end of a word becomes its own token
    ("box." -> ["box", "."]); apostrophes and quotes stay inside the word
    ("He's" stays one token). Never emits empty tokens.
    """
    out: list[str] = []
    for piece in text.split():
        detached: list[str] = []
        while len(piece) > 1 and piece[-1] in _TRAILING_PUNCT:
            detached.append(piece[-1])
            piece = piece[:-1]
        out.append(piece)
        out.extend(reversed(detached))
    return out


def parse_inline_tagged(text: str) -> tuple[list[str], list[str]]:
    """Parse ``word(TAG) word(TAG) ...`` into parallel token/tag lists.

    Inverse of :func:`render_inline_tagged`. Raises MalformedInlineTag on
    items without a ``(TAG)`` suffix or with an unknown code.
    """
    tokens: list[str] = []
    tags: list[str] = []
    if not text:
        return tokens, tags
    for item in text.split(" "):
        if not item.endswith(")") or "(" not in item:
            raise MalformedInlineTag(f"item {item!r} lacks a (TAG) suffix")
        word, tag = item[:-1].rsplit("(", 1)
        if not word:
            raise MalformedInlineTag(f"item {item!r} has an empty word")
        if tag not in TAG_BY_CODE:
            raise MalformedInlineTag(f"item {item!r} has unknown tag {tag!r}")
        tokens.append(word)
        tags.append(tag)
    return tokens, tags


def render_inline_tagged(tokens: list[str], tags: list[str]) -> str:
    """Render parallel token/tag lists as ``word(TAG)`` items joined by spaces."""
    if len(tokens) != len(tags):
        raise LengthMismatch(f"{len(tokens)} tokens but {len(tags)} tags")
    for tag in tags:
        require_tag(tag)
    return " ".join(f"{w}({t})" for w, t in zip(tokens, tags))


# ---------------------------------------------------------------------------
# Splitting and statistics
# ---------------------------------------------------------------------------

def split_by_dialogue(
    dataset: Dataset,
    ratios: tuple[int, int, int] = (76, 12, 12),
    seed: int = 42,
) -> Dataset:
    """Partition dialogues into train/validation/test by percentage.

    All summaries of a dialogue land in the same split. Ratios are
    percentages of unique dialogue ids; remainders go by largest fractional
    part, ties resolved in train > validation > test order. Deterministic
    for a fixed seed.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise BadRatio(f"ratios must be three positive numbers, got {ratios}")
    if sum(ratios) != 100:
        raise BadRatio(f"ratios must sum to 100, got {sum(ratios)}")
    if not dataset.examples:
        raise EmptyDataset("cannot split an empty dataset")

    ids = dataset.dialogue_ids()
    rng = random.Random(seed)
    rng.shuffle(ids)

    n = len(ids)
    quotas = [n * r / 100 for r in ratios]
    counts = [int(q) for q in quotas]
    remainders = [q - c for q, c in zip(quotas, counts)]
    # Largest remainder; ties favor the earlier split (train first).
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in order[: n - sum(counts)]:
        counts[i] += 1

    assignment: dict[str, str] = {}
    cursor = 0
    for name, count in zip(SPLIT_NAMES, counts):
        for did in ids[cursor:cursor + count]:
            assignment[did] = name
        cursor += count

    return Dataset(list(dataset.examples), split_assignment=assignment)


def tag_stats(dataset: Dataset) -> dict[str, tuple[int, float]]:
    """Count every tag occurrence across all summaries.

    Returns ``{code: (count, fraction)}`` over all six codes; fractions sum
    to 1 within 1e-9.
    """
    if not dataset.examples:
        raise EmptyDataset("tag_stats needs at least one example")
    counts = {code: 0 for code in TAG_CODES}
    for ex in dataset.examples:
        for tag in ex.summary.tags:
            counts[tag] += 1
    total = sum(counts.values())
    return {code: (c, c / total) for code, c in counts.items()}


# ---------------------------------------------------------------------------
# JSONL persistence
# ---------------------------------------------------------------------------

_FIELDS = ("dialogue_id", "turns", "summary_tokens", "tags", "gold_summary", "source_model")


def example_to_record(ex: DialogueExample) -> dict:
    return {
        "dialogue_id": ex.dialogue.id,
        "turns": [[s, u] for s, u in ex.dialogue.turns],
        "summary_tokens": list(ex.summary.tokens),
        "tags": list(ex.summary.tags),
        "gold_summary": list(ex.gold_summary) if ex.gold_summary else None,
        "source_model": ex.summary.source_model,
    }


def record_to_example(record: dict, line: int | None = None) -> DialogueExample:
    if not isinstance(record, dict):
        raise SchemaError("record is not a JSON object", line)
    missing = [f for f in ("dialogue_id", "turns", "summary_tokens", "tags") if f not in record]
    if missing:
        raise SchemaError(f"missing fields {missing}", line)
    try:
        dialogue = Dialogue(
            id=str(record["dialogue_id"]),
            turns=[(str(s), str(u)) for s, u in record["turns"]],
        )
        summary = TaggedSummary(
            tokens=[str(t) for t in record["summary_tokens"]],
            tags=[str(t) for t in record["tags"]],
            source_model=record.get("source_model"),
        )
        gold = record.get("gold_summary")
        return DialogueExample(
            dialogue=dialogue,
            summary=summary,
            gold_summary=[str(t) for t in gold] if gold else None,
        )
    except (ValueError, TypeError) as exc:
        raise SchemaError(str(exc), line) from exc


def dumps_record(record: dict) -> str:
    """Canonical single-line JSON form of one example record."""
    ordered = {k: record[k] for k in _FIELDS}
    return json.dumps(ordered, ensure_ascii=False, separators=(", ", ": "))


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write one canonical JSON record per line, UTF-8 with \\n endings."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for ex in dataset.examples:
                fh.write(dumps_record(example_to_record(ex)))
                fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_dataset(path: str | Path) -> Dataset:
    """Load a JSONL dataset, rejecting records that break the data model."""
    examples: list[DialogueExample] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                raw = raw.strip()
                if not raw:
                    continue
                try:
                    record = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"invalid JSON: {exc}", lineno) from exc
                examples.append(record_to_example(record, lineno))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return Dataset(examples)
