"""Chat prompt construction, strict output parsing and batch tagging runs.

Transcripts are plain data: a system message, optional worked-example
(user, assistant) pairs, and a final user query. Model replies are parsed
strictly; anything that fails to parse or length-align is recorded as
invalid data rather than raised, because the validity rate is itself a
result.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import yaml

from . import prompt_texts as texts
from .corpus import Dataset, Dialogue, TaggedSummary, parse_inline_tagged
from .errors import ClientError, MalformedInlineTag, UnknownVariant

TAGGING_VARIANTS = ("tagging-2", "tagging-3", "tagging-6", "tagging-8", "tagging-9")
SUMMARIZATION_VARIANTS = (
    "summ-zero", "summ-one", "summ-few", "summ-tagging", "summ-tagging-explain",
)

_TG_BLOCK = re.compile(r"<TG>(.*?)<TG>", re.S)
_MI_BLOCK = re.compile(r"<MI>(.*?)<MI>", re.S | re.I)

FORMAT_REMINDER = (
    "Format reminder: reply with Tags- <TG>token(TAG) token(TAG) ...<TG> "
    "covering every summary token, then Missing Information- <MI>Yes<MI> "
    "or <MI>No<MI>."
)


@dataclass(frozen=True)
class ChatMessage:
    role: str  # system | user | assistant
    content: str


@dataclass(frozen=True)
class ChatTranscript:
    messages: tuple[ChatMessage, ...]

    def __post_init__(self):
        roles = [m.role for m in self.messages]
        if not roles or roles[0] != "system":
            raise ValueError("transcript must start with a system message")
        body, last = roles[1:-1], roles[-1]
        if last != "user":
            raise ValueError("transcript must end with a user message")
        for i, role in enumerate(body):
            expected = "user" if i % 2 == 0 else "assistant"
            if role != expected:
                raise ValueError("worked examples must alternate user/assistant")

    def as_pairs(self) -> list[tuple[str, str]]:
        return [(m.role, m.content) for m in self.messages]


#: Tagging variant id -> (system text, worked (user, assistant) pairs).
_TAGGING_TEMPLATES: dict[str, tuple[str, list[tuple[str, str]]]] = {
    "tagging-2": (texts.TAGGING_2_SYSTEM, []),
    "tagging-3": (
        texts.TAGGING_3_SYSTEM,
        [
            (texts.EXAMPLE_1, texts.ANSWER_3_1),
            (texts.EXAMPLE_2, texts.ANSWER_3_2),
            (texts.EXAMPLE_3, texts.ANSWER_3_3),
        ],
    ),
    "tagging-6": (
        texts.TAGGING_6_SYSTEM,
        [
            (texts.EXAMPLE_1, texts.ANSWER_6_1),
            (texts.EXAMPLE_2, texts.ANSWER_6_2),
            (texts.EXAMPLE_3, texts.ANSWER_6_3),
        ],
    ),
    "tagging-8": (
        texts.TAGGING_8_SYSTEM,
        [
            (texts.EXAMPLE_1, texts.ANSWER_8_1),
            (texts.EXAMPLE_2, texts.ANSWER_8_2),
            (texts.EXAMPLE_3, texts.ANSWER_8_3),
        ],
    ),
    "tagging-9": (
        texts.TAGGING_9_SYSTEM,
        [
            (texts.EXAMPLE_1, texts.ANSWER_9_1),
            (texts.EXAMPLE_2, texts.ANSWER_9_2),
            (texts.EXAMPLE_3, texts.ANSWER_9_3),
        ],
    ),
}


def _query_block(dialogue: Dialogue, summary: TaggedSummary, with_eos: bool) -> str:
    summary_text = " ".join(summary.word_tokens())
    if with_eos:
        summary_text += " <EOS>"
    return f'Dialogue- "{dialogue.render()}"\n\nSummary- "{summary_text}"'


def build_tagging_prompt(
    variant: str, dialogue: Dialogue, summary: TaggedSummary
) -> ChatTranscript:
    """Assemble the transcript for one tagging query.

    The system message carries the variant's guideline text verbatim and
    the worked examples sit in the chat history as user/assistant pairs
    (tagging-2 keeps its examples inline in the system text instead).
    """
    if variant not in _TAGGING_TEMPLATES:
        raise UnknownVariant(f"unknown tagging variant {variant!r}")
    system, examples = _TAGGING_TEMPLATES[variant]
    messages = [ChatMessage("system", system)]
    for user, assistant in examples:
        messages.append(ChatMessage("user", user))
        messages.append(ChatMessage("assistant", assistant))
    messages.append(
        ChatMessage("user", _query_block(dialogue, summary, with_eos=variant == "tagging-2"))
    )
    return ChatTranscript(tuple(messages))


def build_summarization_prompt(
    variant: str, dialogue: Dialogue, shots: int | None = None
) -> ChatTranscript:
    """Assemble a summarization transcript (plain, tagged, or explained)."""
    if variant not in SUMMARIZATION_VARIANTS:
        raise UnknownVariant(f"unknown summarization variant {variant!r}")

    dialogue_block = f'Dialogue:\n"{dialogue.render()}"'
    if variant in ("summ-zero", "summ-one", "summ-few"):
        defaults = {"summ-zero": 0, "summ-one": 1, "summ-few": 2}
        n_shots = defaults[variant] if shots is None else shots
        if n_shots < 0:
            raise ValueError("shots must be >= 0")
        if n_shots > len(texts.SUMMARIZATION_SHOTS):
            raise ValueError(
                f"only {len(texts.SUMMARIZATION_SHOTS)} worked examples are bundled"
            )
        messages = [ChatMessage("system", texts.SUMM_BASELINE_TASK)]
        for shot_dialogue, shot_summary in texts.SUMMARIZATION_SHOTS[:n_shots]:
            messages.append(
                ChatMessage("user", f'Dialogue:\n"{shot_dialogue}"\n\nSummary:')
            )
            messages.append(ChatMessage("assistant", shot_summary))
        messages.append(ChatMessage("user", f"{dialogue_block}\n\nSummary:"))
        return ChatTranscript(tuple(messages))

    explain = variant == "summ-tagging-explain"
    answer = f'Summary- "{texts.SUMM_TAGGING_EXAMPLE_SUMMARY}"\n\nTags- "{texts.SUMM_TAGGING_EXAMPLE_TAGS}"'
    if explain:
        answer += f"\n\n{texts.SUMM_TAGGING_EXAMPLE_EXPLANATION}"
    closing = "Similarly, for the next dialogue, generate summary of all the dialogues and tags for the summary."
    if explain:
        closing += " Think step by step to explain it."
    tail = "Summary- \nTags- \nExplanation- " if explain else "Summary- \nTags- "
    messages = [
        ChatMessage("system", texts.SUMM_TAGGING_TASK),
        ChatMessage("user", f'Dialogue-\n"{texts.SUMM_TAGGING_EXAMPLE_DIALOGUE}"'),
        ChatMessage("assistant", answer),
        ChatMessage("user", f"{closing}\n\nDialogue-\n\"{dialogue.render()}\"\n\n{tail}"),
    ]
    return ChatTranscript(tuple(messages))


# ---------------------------------------------------------------------------
# Output parsing
# ---------------------------------------------------------------------------

@dataclass
class ParsedTagOutput:
    tokens: list[str] | None = None
    tags: list[str] | None = None
    missing_info: str | None = None  # "yes" | "no"
    valid: bool = False
    failure_reason: str | None = None


def parse_tagger_output(text: str, expected_token_count: int) -> ParsedTagOutput:
    """Extract the first ``<TG>`` block and the ``<MI>`` verdict.

    The output is valid only when both blocks parse and the tag count
    matches ``expected_token_count``; every failure is recorded as data,
    never raised.
    """
    out = ParsedTagOutput()

    tg = _TG_BLOCK.search(text)
    if tg is None:
        out.failure_reason = "missing TG block"
        return out
    inline = " ".join(tg.group(1).split())
    try:
        out.tokens, out.tags = parse_inline_tagged(inline)
    except MalformedInlineTag as exc:
        out.failure_reason = f"malformed TG block: {exc}"
        return out

    mi = _MI_BLOCK.search(text)
    if mi is None:
        out.failure_reason = "missing MI block"
        return out
    verdict = mi.group(1).strip().lower()
    if verdict not in ("yes", "no"):
        out.failure_reason = f"bad MI value {mi.group(1).strip()!r}"
        return out
    out.missing_info = verdict

    if len(out.tags) != expected_token_count:
        out.failure_reason = (
            f"length mismatch: got {len(out.tags)} tags, expected {expected_token_count}"
        )
        return out

    out.valid = True
    return out


# ---------------------------------------------------------------------------
# Chat clients
# ---------------------------------------------------------------------------

class ChatClient(Protocol):
    def send(self, messages: list[tuple[str, str]]) -> str: ...


class ScriptedChatClient:
    """Deterministic fake: canned replies keyed by a probe substring.

    ``replies`` maps a probe (a substring unique to one example's query,
    e.g. a speaker name) to a reply or list of replies; lists are
    consumed one call at a time and the last entry then repeats, which
    scripts fail-then-succeed retries. User messages are scanned from the
    end, so the probe is matched against the query before any worked
    example in the history.
    """

    def __init__(self, replies: dict[str, str | list[str]]):
        self._replies = {
            probe: list(r) if isinstance(r, list) else [r]
            for probe, r in replies.items()
        }
        self.calls: list[list[tuple[str, str]]] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedChatClient":
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{path} must hold a mapping of probe -> reply")
        return cls(data)

    def send(self, messages: list[tuple[str, str]]) -> str:
        self.calls.append(list(messages))
        for _, content in reversed([m for m in messages if m[0] == "user"]):
            hits = [probe for probe in self._replies if probe in content]
            if hits:
                queue = self._replies[max(hits, key=len)]
                return queue.pop(0) if len(queue) > 1 else queue[0]
        raise LookupError("no scripted reply matches the query")


# ---------------------------------------------------------------------------
# Batch runs
# ---------------------------------------------------------------------------

@dataclass
class PromptRun:
    """One example's transcript, raw reply and parsed outcome."""

    example_id: str
    transcript: ChatTranscript
    reply: str
    parsed: ParsedTagOutput
    pred_tags: list[str] | None
    attempts: int

    def to_record(self, gold_tags: list[str]) -> dict:
        return {
            "dialogue_id": self.example_id,
            "pred_tags": self.pred_tags,
            "gold_tags": list(gold_tags),
            "valid": self.parsed.valid,
            "failure_reason": self.parsed.failure_reason,
        }


def run_batch(
    dataset,
    client: ChatClient,
    variant: str = "tagging-9",
    retry_limit: int = 1,
    max_workers: int = 1,
) -> tuple[list[PromptRun], float]:
    """Prompt-tag every example; invalid outputs count against validity.

    An invalid reply triggers one re-send with a terse format reminder,
    up to ``retry_limit`` times. The missing-information verdict becomes
    the tag on the [EOS] slot (yes -> M, no -> O).
    """
    examples = dataset.examples if isinstance(dataset, Dataset) else list(dataset)

    def process(ex) -> PromptRun:
        expected = len(ex.summary.word_tokens())
        transcript = build_tagging_prompt(variant, ex.dialogue, ex.summary)
        messages = list(transcript.messages)
        attempts = 0
        try:
            reply = client.send([(m.role, m.content) for m in messages])
            parsed = parse_tagger_output(reply, expected)
            while not parsed.valid and attempts < retry_limit:
                attempts += 1
                messages = messages + [
                    ChatMessage("assistant", reply),
                    ChatMessage("user", FORMAT_REMINDER),
                ]
                reply = client.send([(m.role, m.content) for m in messages])
                parsed = parse_tagger_output(reply, expected)
        except Exception as exc:
            raise ClientError(str(exc), example_id=ex.dialogue.id) from exc

        pred_tags = None
        if parsed.valid:
            eos_tag = "M" if parsed.missing_info == "yes" else "O"
            pred_tags = list(parsed.tags) + [eos_tag]
            # Must satisfy the tagged-summary invariants before scoring.
            TaggedSummary(tokens=list(ex.summary.tokens), tags=pred_tags)
        return PromptRun(
            example_id=ex.dialogue.id,
            transcript=ChatTranscript(tuple(messages)),
            reply=reply,
            parsed=parsed,
            pred_tags=pred_tags,
            attempts=attempts,
        )

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            runs = list(pool.map(process, examples))
    else:
        runs = [process(ex) for ex in examples]

    validity_rate = (
        sum(run.parsed.valid for run in runs) / len(runs) if runs else 0.0
    )
    return runs, validity_rate
