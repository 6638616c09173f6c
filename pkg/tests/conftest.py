"""Shared fixtures: hand-built examples, random dataset generation and the
session-scoped training runs reused by module and acceptance tests."""

from __future__ import annotations

import random
import time

import pytest

from faithtag.corpus import (
    Dataset,
    Dialogue,
    DialogueExample,
    TaggedSummary,
    split_by_dialogue,
)
from faithtag.synthetic import make_synthetic_dataset
from faithtag.tags import EOS_TOKEN, INTERIOR_CODES


@pytest.fixture
def mary_carter_example() -> DialogueExample:
    """The lend-a-box worked example with its gold tags."""
    return DialogueExample(
        dialogue=Dialogue(
            id="mary-carter",
            turns=[
                ("Mary", "hey, im kinda broke, lend me a few box"),
                ("Carter", "okay, give me an hour, im at the train station"),
                ("Mary", "cool, thanks"),
            ],
        ),
        summary=TaggedSummary(
            tokens=["Adam", "will", "lend", "Mary", "a", "box", ".", EOS_TOKEN],
            tags=["W", "O", "O", "O", "O", "OB", "O", "M"],
        ),
    )


def build_random_dataset(rng: random.Random, n_dialogues: int = 8) -> Dataset:
    """Random multi-summary dataset respecting all data-model invariants."""
    words = ["alpha", "beta", "gamma", "delta", "echo", "fox", "golf", "hotel"]
    examples = []
    for d in range(n_dialogues):
        dialogue = Dialogue(
            id=f"rnd-{d:03d}",
            turns=[
                (rng.choice(["sam", "lee", "max"]), " ".join(rng.choices(words, k=rng.randint(2, 6))))
                for _ in range(rng.randint(1, 4))
            ],
        )
        for _ in range(rng.randint(1, 3)):
            length = rng.randint(1, 9)
            tokens = rng.choices(words, k=length) + [EOS_TOKEN]
            tags = rng.choices(list(INTERIOR_CODES), k=length) + [rng.choice(["O", "M"])]
            examples.append(
                DialogueExample(
                    dialogue=dialogue,
                    summary=TaggedSummary(tokens=tokens, tags=tags),
                    gold_summary=rng.choices(words, k=rng.randint(1, 6)) or None,
                )
            )
    return Dataset(examples)


@pytest.fixture
def random_dataset() -> Dataset:
    return build_random_dataset(random.Random(1234))


# ---------------------------------------------------------------------------
# Session-scoped synthetic corpus and training runs (shared with acceptance)
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def synthetic_corpus() -> Dataset:
    return make_synthetic_dataset(200, seed=0)


@pytest.fixture(scope="session")
def synthetic_splits(synthetic_corpus):
    assigned = split_by_dialogue(synthetic_corpus, (76, 12, 12), seed=42)
    return {
        name: assigned.subset(name) for name in ("train", "validation", "test")
    }


#: Wall-clock seconds of each session-scoped training run, keyed by name;
#: the acceptance suite checks these against the stated runtime budget.
TRAINING_SECONDS: dict[str, float] = {}


@pytest.fixture(scope="session")
def trained_proxy(synthetic_splits):
    """Proxy tagger trained at its default hyperparameters (lr 2e-5, 10 epochs)."""
    from faithtag.proxy import ProxyTagger

    start = time.perf_counter()
    est = ProxyTagger().fit(
        synthetic_splits["train"], val_dataset=synthetic_splits["validation"]
    )
    TRAINING_SECONDS["proxy"] = time.perf_counter() - start
    return est


@pytest.fixture(scope="session")
def trained_joint_phase2(synthetic_corpus):
    """Joint model after phase-2 training at the default configuration."""
    from faithtag.joint import JointSummarizerTagger

    start = time.perf_counter()
    est = JointSummarizerTagger().fit_phase2(synthetic_corpus)
    TRAINING_SECONDS["joint_phase2"] = time.perf_counter() - start
    return est
