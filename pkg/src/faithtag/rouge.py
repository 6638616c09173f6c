"""ROUGE-1/2/L/Lsum over word tokens.

No stemming, no stopword removal; corpus-level scoring lowercases before
tokenizing. ROUGE-Lsum is the summary-level variant: per reference
sentence, the union of LCS-matched token positions against every
candidate sentence, where each (reference, candidate) pair contributes
the match set of the canonical LCS reconstructed by walking the dynamic
programming table back from the end (always take an equal-token match;
otherwise step in the reference direction on ties).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import tokenize
from .errors import EmptyCorpus

METRIC_NAMES = ("rouge1", "rouge2", "rougeL", "rougeLsum")

_SENT_BOUNDARY = re.compile(r"(?<=[.?!])\s+")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    fmeasure: float


def _fmeasure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _score(overlap: int, n_candidate: int, n_reference: int) -> RougeScore:
    precision = overlap / n_candidate if n_candidate else 0.0
    recall = overlap / n_reference if n_reference else 0.0
    return RougeScore(precision, recall, _fmeasure(precision, recall))


def _ngram_counts(tokens: list[str], n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i:i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def rouge_n(candidate_tokens: list[str], reference_tokens: list[str], n: int) -> RougeScore:
    """Clipped n-gram overlap precision/recall/F."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand = _ngram_counts(candidate_tokens, n)
    ref = _ngram_counts(reference_tokens, n)
    overlap = sum(min(count, ref.get(gram, 0)) for gram, count in cand.items())
    return _score(overlap, sum(cand.values()), sum(ref.values()))


def _lcs_table(a: list[str], b: list[str]) -> list[list[int]]:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        row = table[i]
        prev = table[i - 1]
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                row[j] = prev[j] if prev[j] >= row[j - 1] else row[j - 1]
    return table


def rouge_l(candidate_tokens: list[str], reference_tokens: list[str]) -> RougeScore:
    """Longest-common-subsequence precision/recall/F."""
    if not candidate_tokens or not reference_tokens:
        return RougeScore(0.0, 0.0, 0.0)
    length = _lcs_table(candidate_tokens, reference_tokens)[-1][-1]
    return _score(length, len(candidate_tokens), len(reference_tokens))


def _lcs_match_positions(ref: list[str], cand: list[str]) -> set[int]:
    """Reference positions matched by the canonical LCS of (ref, cand)."""
    if not ref or not cand:
        return set()
    table = _lcs_table(ref, cand)
    matched: set[int] = set()
    i, j = len(ref), len(cand)
    while i > 0 and j > 0:
        if ref[i - 1] == cand[j - 1]:
            matched.add(i - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return matched


def split_sentences(text: str) -> list[list[str]]:
    """Sentence-split on newlines and sentence-final ``. ? !``, then tokenize."""
    sentences: list[list[str]] = []
    for line in text.splitlines():
        for sent in _SENT_BOUNDARY.split(line):
            tokens = tokenize(sent)
            if tokens:
                sentences.append(tokens)
    return sentences


def rouge_lsum(candidate_text: str, reference_text: str) -> RougeScore:
    """Summary-level union-LCS over sentence-split texts."""
    cand_sents = split_sentences(candidate_text)
    ref_sents = split_sentences(reference_text)
    n_candidate = sum(len(s) for s in cand_sents)
    n_reference = sum(len(s) for s in ref_sents)
    hits = 0
    for ref in ref_sents:
        union: set[int] = set()
        for cand in cand_sents:
            union |= _lcs_match_positions(ref, cand)
        hits += len(union)
    return _score(hits, n_candidate, n_reference)


def _text_tokens(text: str) -> list[str]:
    return tokenize(text.lower())


def score_pair(candidate_text: str, reference_text: str) -> dict[str, RougeScore]:
    """All four metrics for one (candidate, reference) text pair.

    Texts are lowercased before tokenization.
    """
    cand = _text_tokens(candidate_text)
    ref = _text_tokens(reference_text)
    return {
        "rouge1": rouge_n(cand, ref, 1),
        "rouge2": rouge_n(cand, ref, 2),
        "rougeL": rouge_l(cand, ref),
        "rougeLsum": rouge_lsum(candidate_text.lower(), reference_text.lower()),
    }


def corpus_rouge(pairs: list[tuple[str, str]]) -> dict[str, RougeScore]:
    """Componentwise arithmetic mean of per-pair scores over the corpus."""
    if not pairs:
        raise EmptyCorpus("corpus_rouge needs at least one (candidate, reference) pair")
    per_pair = [score_pair(c, r) for c, r in pairs]
    out: dict[str, RougeScore] = {}
    for name in METRIC_NAMES:
        scores = [p[name] for p in per_pair]
        out[name] = RougeScore(
            precision=sum(s.precision for s in scores) / len(scores),
            recall=sum(s.recall for s in scores) / len(scores),
            fmeasure=sum(s.fmeasure for s in scores) / len(scores),
        )
    return out
