"""Word-level vocabulary with fixed special-token ids.

Ids 0-3 are reserved: BOS=0, PAD=1, EOS_ID=2 (generation control), SEP=3.
Real tokens start at id 4. The summary sentinel ``[EOS]`` is a real vocab
entry (it must be taggable); EOS_ID only ever terminates generation.
"""

from __future__ import annotations

from .tags import EOS_TOKEN

BOS = 0
PAD = 1
EOS_ID = 2
SEP = 3

SPECIAL_IDS = (BOS, PAD, EOS_ID, SEP)
SPECIAL_TOKENS = ("[BOS]", "[PAD]", "[EOS_ID]", "[SEP]")

UNK_TOKEN = "[UNK]"


class Vocab:
    """Bijective token <-> id map over a fixed word list."""

    def __init__(self, tokens: list[str]):
        self.id_to_token: list[str] = list(SPECIAL_TOKENS) + list(tokens)
        self.token_to_id: dict[str, int] = {
            t: i for i, t in enumerate(self.id_to_token)
        }
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate tokens in vocabulary")
        self.unk_id = self.token_to_id.get(UNK_TOKEN)

    @classmethod
    def from_examples(cls, examples) -> "Vocab":
        """Harvest every dialogue, summary and gold-summary token."""
        seen: set[str] = set()
        for ex in examples:
            seen.update(ex.dialogue.flat_tokens())
            seen.update(ex.summary.tokens)
            if ex.gold_summary:
                seen.update(ex.gold_summary)
        seen.add(EOS_TOKEN)
        seen.discard(UNK_TOKEN)
        return cls([UNK_TOKEN] + sorted(seen))

    def __len__(self) -> int:
        return len(self.id_to_token)

    @property
    def eos_word_id(self) -> int:
        """Id of the taggable ``[EOS]`` content token."""
        return self.token_to_id[EOS_TOKEN]

    def encode(self, tokens: list[str]) -> list[int]:
        """Map tokens to ids; unseen tokens map to ``[UNK]``."""
        out = []
        for t in tokens:
            i = self.token_to_id.get(t)
            if i is None:
                if self.unk_id is None:
                    raise ValueError(f"token {t!r} not in vocabulary")
                i = self.unk_id
            out.append(i)
        return out

    def decode(self, ids: list[int]) -> list[str]:
        return [self.id_to_token[i] for i in ids]

    def to_dict(self) -> dict:
        return {"tokens": self.id_to_token[len(SPECIAL_TOKENS):]}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocab":
        return cls(list(data["tokens"]))
