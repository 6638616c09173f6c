"""Exception hierarchy shared across the toolkit."""


class FaithtagError(Exception):
    """Base class for all toolkit errors."""


class UnknownTagCode(FaithtagError):
    """A tag code outside {O, W, OB, C, N, M} was supplied."""


class MalformedInlineTag(FaithtagError):
    """An inline ``word(TAG)`` item could not be parsed."""


class LengthMismatch(FaithtagError):
    """Parallel token/tag sequences have different lengths."""


class BadRatio(FaithtagError):
    """Split ratios are not positive percentages summing to 100."""


class SchemaError(FaithtagError):
    """A persisted record violates the JSONL schema.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IoError(FaithtagError):
    """Wraps OS-level failures while reading or writing dataset files."""


class EmptyDataset(FaithtagError):
    """An operation that needs at least one example got none."""


class EmptyCorpus(FaithtagError):
    """Corpus-level scoring needs at least one pair."""


class DimensionMismatch(FaithtagError):
    """A vector or matrix has the wrong shape for the head projection."""


class NoValidPositions(FaithtagError):
    """The special-token mask left no position to compute the tag loss on."""


class ModelNotTrained(FaithtagError):
    """Inference was requested on a model with no fitted parameters."""


class OutOfRangeTagId(FaithtagError):
    """A tag id is outside the valid base (0-5) or shifted (3-8) range."""


class MissingGoldSummary(FaithtagError):
    """GS input assembly requires a gold summary."""


class UnknownVariant(FaithtagError):
    """The requested prompt variant id is not registered."""


class ClientError(FaithtagError):
    """A chat client call failed; carries the example id it failed on."""

    def __init__(self, message: str, example_id: str | None = None):
        self.example_id = example_id
        if example_id is not None:
            message = f"example {example_id}: {message}"
        super().__init__(message)


class NoOpenTasks(FaithtagError):
    """The annotation queue has no task left to claim."""


class UnknownTask(FaithtagError):
    """No task with the given id exists."""


class StaleRevision(FaithtagError):
    """A submission carried an outdated revision; nothing was written."""


class InvalidTags(FaithtagError):
    """A tag submission violates the tagged-summary invariants.

    ``reasons`` maps token positions (or -1 for sequence-level problems)
    to human-readable explanations.
    """

    def __init__(self, reasons: dict[int, str]):
        self.reasons = reasons
        detail = "; ".join(f"position {p}: {r}" for p, r in sorted(reasons.items()))
        super().__init__(f"invalid tags: {detail}")
