"""The six-way faithfulness tag taxonomy.

Every summary token carries exactly one tag code. ``O`` marks faithful
tokens; the remaining five codes classify how a token hallucinates. ``M``
(missing information) is a summary-level verdict and is only legal on the
end-of-summary sentinel slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownTagCode

#: Literal sentinel stored as the last token of every tagged summary. The
#: M tag lives on this slot.
EOS_TOKEN = "[EOS]"


@dataclass(frozen=True)
class FaithfulnessTag:
    code: str
    base_id: int
    description: str


TAGS: tuple[FaithfulnessTag, ...] = (
    FaithfulnessTag("O", 0, "not hallucinated"),
    FaithfulnessTag("W", 1, "wrong reference error"),
    FaithfulnessTag("OB", 2, "object error"),
    FaithfulnessTag("C", 3, "circumstantial error"),
    FaithfulnessTag("N", 4, "other uncommon errors"),
    FaithfulnessTag("M", 5, "missing information"),
)

#: Tag codes ordered by base id.
TAG_CODES: tuple[str, ...] = tuple(t.code for t in TAGS)

TAG_BY_CODE: dict[str, FaithfulnessTag] = {t.code: t for t in TAGS}

#: Codes legal on interior (non-final) summary positions.
INTERIOR_CODES: tuple[str, ...] = ("O", "W", "OB", "C", "N")

#: Codes legal on the end-of-summary slot.
FINAL_CODES: tuple[str, ...] = ("O", "M")


def require_tag(code: str) -> FaithfulnessTag:
    """Look up a tag by code, raising UnknownTagCode for anything else."""
    try:
        return TAG_BY_CODE[code]
    except KeyError:
        raise UnknownTagCode(f"unknown tag code {code!r}") from None


def binarize_tags(tags: list[str]) -> list[int]:
    """Collapse the taxonomy to hallucinated-or-not: O -> 0, all else -> 1."""
    return [0 if require_tag(t).code == "O" else 1 for t in tags]
