"""Rule-corrupted template corpus for desk-scale training runs.

Each dialogue follows one template; its summary is either faithful or
corrupted by exactly one rule: swap a name (W), swap the object noun
(OB), alter the day (C), flip the tense (N), or drop the second clause
(M, carried on the end-of-summary slot). Tags are assigned by the
corruption rule itself.

The corruption type is keyed by the dialogue's greeting word, so the
correct tag sequence is a deterministic function of the dialogue. The
decoder-side tagger emits each tag from the prefix-only state that has
not yet consumed the token it tags — without a dialogue-side cue the
corrupted positions would be unpredictable in principle, and no training
regime could tag them.
"""

from __future__ import annotations

import random

from .corpus import Dataset, Dialogue, DialogueExample, TaggedSummary
from .tags import EOS_TOKEN

NAMES = [
    "anna", "ben", "clara", "david", "emma", "felix", "grace", "henry",
    "iris", "jonas", "kira", "liam", "mona", "nora", "oscar", "paula",
]
INTRUDER_NAMES = ["zane", "quinn", "ulric", "vera"]
OBJECTS = ["laptop", "book", "cake", "guitar", "camera", "umbrella", "bike", "jacket"]
WRONG_OBJECTS = ["hammer", "kettle", "drum"]
PLACES = ["cafe", "library", "park", "office", "station", "museum"]
DAYS = ["monday", "tuesday", "friday", "sunday", "noon", "evening"]
WRONG_DAYS = ["midnight", "dawn"]

CORRUPTION_KINDS = ("none", "W", "OB", "C", "N", "M")

#: Greeting word announcing the corruption kind inside the dialogue.
GREETING = {
    "none": "hello",
    "W": "hey",
    "OB": "yo",
    "C": "hi",
    "N": "sup",
    "M": "howdy",
}


def _build_example(index: int, kind: str, rng: random.Random) -> DialogueExample:
    name_a, name_b = rng.sample(NAMES, 2)
    place = rng.choice(PLACES)
    day = rng.choice(DAYS)
    obj = rng.choice(OBJECTS)
    greet = GREETING[kind]

    dialogue = Dialogue(
        id=f"dlg-{index:04d}",
        turns=[
            (name_a, f"{greet} , will you come to the {place} on {day} ?"),
            (name_b, f"sure , i will bring the {obj} ."),
            (name_a, f"great , see you at the {place} ."),
        ],
    )

    words = [
        name_a, "and", name_b, "will", "meet", "at", "the", place, "on", day, ".",
        name_b, "will", "bring", "the", obj, ".",
    ]
    tags = ["O"] * len(words)
    eos_tag = "O"

    if kind == "W":
        words[0] = rng.choice(INTRUDER_NAMES)
        tags[0] = "W"
    elif kind == "OB":
        words[15] = rng.choice(WRONG_OBJECTS)
        tags[15] = "OB"
    elif kind == "C":
        words[9] = rng.choice(WRONG_DAYS)
        tags[9] = "C"
    elif kind == "N":
        words[12], words[13] = "has", "brought"
        tags[12], tags[13] = "N", "N"
    elif kind == "M":
        words = words[:11]
        tags = tags[:11]
        eos_tag = "M"

    gold = [
        name_a, "and", name_b, "will", "meet", "at", "the", place, "on", day, ".",
        name_b, "will", "bring", "the", obj, ".",
    ]
    return DialogueExample(
        dialogue=dialogue,
        summary=TaggedSummary(tokens=words + [EOS_TOKEN], tags=tags + [eos_tag]),
        gold_summary=gold,
    )


def make_synthetic_dataset(n: int = 200, seed: int = 0) -> Dataset:
    """Generate ``n`` single-summary dialogues, corruption kinds balanced."""
    rng = random.Random(seed)
    examples = [
        _build_example(i, CORRUPTION_KINDS[i % len(CORRUPTION_KINDS)], rng)
        for i in range(n)
    ]
    return Dataset(examples)
