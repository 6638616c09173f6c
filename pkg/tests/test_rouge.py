import random

import pytest

import oracles
from faithtag.errors import EmptyCorpus
from faithtag.rouge import (
    RougeScore,
    corpus_rouge,
    rouge_l,
    rouge_lsum,
    rouge_n,
    score_pair,
    split_sentences,
)

WORDS = ["the", "cat", "sat", "dog", "ran", "on", "a", "mat", "fast", "slow"]


def _random_tokens(rng, lo=0, hi=18):
    return [rng.choice(WORDS) for _ in range(rng.randint(lo, hi))]


# ---------------------------------------------------------------------------
# rouge_n
# ---------------------------------------------------------------------------

def test_rouge_n_identity():
    tokens = ["a", "b", "c"]
    assert rouge_n(tokens, tokens, 1).fmeasure == 1.0
    assert rouge_n(tokens, tokens, 2).fmeasure == 1.0


def test_rouge_n_hand_counted():
    score = rouge_n(["the", "cat", "sat"], ["the", "cat"], 1)
    assert score.precision == pytest.approx(2 / 3)
    assert score.recall == 1.0
    assert score.fmeasure == pytest.approx(0.8)


def test_rouge_n_empty_components():
    assert rouge_n([], ["a"], 1) == RougeScore(0.0, 0.0, 0.0)
    assert rouge_n(["a"], [], 1) == RougeScore(0.0, 0.0, 0.0)
    assert rouge_n(["a"], ["b", "c"], 3) == RougeScore(0.0, 0.0, 0.0)


def test_rouge_n_clips_repeats():
    score = rouge_n(["a", "a", "a"], ["a"], 1)
    assert score.precision == pytest.approx(1 / 3)
    assert score.recall == 1.0


def test_rouge_n_matches_oracle_on_random_pairs():
    rng = random.Random(42)
    for _ in range(50):
        cand, ref = _random_tokens(rng), _random_tokens(rng)
        for n in (1, 2):
            got = rouge_n(cand, ref, n)
            want = oracles.naive_rouge_n(cand, ref, n)
            assert got.precision == pytest.approx(want[0], abs=1e-12)
            assert got.recall == pytest.approx(want[1], abs=1e-12)
            assert got.fmeasure == pytest.approx(want[2], abs=1e-12)


def test_rouge_n_invariant_under_renaming():
    rng = random.Random(3)
    cand, ref = _random_tokens(rng, 1), _random_tokens(rng, 1)
    renamed = {w: f"tok{i}" for i, w in enumerate(WORDS)}
    for n in (1, 2):
        before = rouge_n(cand, ref, n)
        after = rouge_n([renamed[w] for w in cand], [renamed[w] for w in ref], n)
        assert before == after


# ---------------------------------------------------------------------------
# rouge_l
# ---------------------------------------------------------------------------

def test_rouge_l_identity():
    tokens = ["x", "y", "z"]
    assert rouge_l(tokens, tokens) == RougeScore(1.0, 1.0, 1.0)


def test_rouge_l_hand_example():
    score = rouge_l(["a", "b", "c", "d"], ["a", "c", "b", "d"])
    assert score.precision == 0.75
    assert score.recall == 0.75


def test_rouge_l_empty_candidate():
    assert rouge_l([], ["a"]) == RougeScore(0.0, 0.0, 0.0)


def test_rouge_l_matches_recursive_oracle():
    rng = random.Random(7)
    for _ in range(50):
        cand, ref = _random_tokens(rng, 0, 14), _random_tokens(rng, 0, 14)
        got = rouge_l(cand, ref)
        want = oracles.naive_rouge_l(cand, ref)
        assert got.precision == pytest.approx(want[0], abs=1e-12)
        assert got.recall == pytest.approx(want[1], abs=1e-12)


# ---------------------------------------------------------------------------
# rouge_lsum
# ---------------------------------------------------------------------------

def test_split_sentences_on_newlines_and_terminators():
    sents = split_sentences("the cat sat. the dog ran!\nno terminator here")
    assert sents == [
        ["the", "cat", "sat", "."],
        ["the", "dog", "ran", "!"],
        ["no", "terminator", "here"],
    ]


def test_rouge_lsum_single_sentence_reduces_to_rouge_l():
    cand = "the cat sat on the mat"
    ref = "the cat lay on a mat"
    lsum = rouge_lsum(cand, ref)
    plain = rouge_l(cand.split(), ref.split())
    assert lsum == plain


def test_rouge_lsum_two_sentence_hand_case():
    # Reference sentence 1 matches pieces of both candidate sentences.
    cand = "a b c. d e f."
    ref = "a b e. d c f."
    got = rouge_lsum(cand, ref)
    cand_sents = split_sentences(cand)
    ref_sents = split_sentences(ref)
    want = oracles.naive_union_lcs(cand_sents, ref_sents)
    assert got.precision == pytest.approx(want[0], abs=1e-12)
    assert got.recall == pytest.approx(want[1], abs=1e-12)


def test_rouge_lsum_identity():
    text = "the cat sat. the dog ran.\nthe bird flew!"
    assert rouge_lsum(text, text) == RougeScore(1.0, 1.0, 1.0)


def test_rouge_lsum_matches_oracle_on_random_texts():
    rng = random.Random(13)
    for _ in range(40):
        def text():
            n_sents = rng.randint(1, 4)
            return " ".join(
                " ".join(_random_tokens(rng, 1, 7)) + rng.choice([".", "?", "!"])
                for _ in range(n_sents)
            )

        cand, ref = text(), text()
        got = rouge_lsum(cand, ref)
        want = oracles.naive_union_lcs(split_sentences(cand), split_sentences(ref))
        assert got.precision == pytest.approx(want[0], abs=1e-12)
        assert got.recall == pytest.approx(want[1], abs=1e-12)
        assert got.fmeasure == pytest.approx(want[2], abs=1e-12)


# ---------------------------------------------------------------------------
# corpus_rouge
# ---------------------------------------------------------------------------

def test_corpus_rouge_single_pair_equals_pair_score():
    pair = ("the cat sat on the mat.", "the cat sat on a mat.")
    corpus = corpus_rouge([pair])
    single = score_pair(*pair)
    assert corpus == single


def test_corpus_rouge_is_arithmetic_mean():
    pairs = [
        ("a b c.", "a b c."),      # fmeasure 1.0 everywhere
        ("x y", "p q"),            # fmeasure 0.0 everywhere
    ]
    scores = corpus_rouge(pairs)
    for name in ("rouge1", "rougeL", "rougeLsum"):
        assert scores[name].fmeasure == pytest.approx(0.5)


def test_corpus_rouge_matches_per_pair_recompute():
    rng = random.Random(99)
    pairs = []
    for _ in range(10):
        pairs.append(
            (
                " ".join(_random_tokens(rng, 1, 10)) + ".",
                " ".join(_random_tokens(rng, 1, 10)) + ".",
            )
        )
    scores = corpus_rouge(pairs)
    per_pair = [score_pair(c, r) for c, r in pairs]
    for name, agg in scores.items():
        assert agg.fmeasure == pytest.approx(
            sum(p[name].fmeasure for p in per_pair) / len(per_pair), abs=1e-12
        )


def test_corpus_rouge_empty_raises():
    with pytest.raises(EmptyCorpus):
        corpus_rouge([])


def test_corpus_scoring_lowercases():
    scores = score_pair("The Cat", "the cat")
    assert scores["rouge1"].fmeasure == 1.0
