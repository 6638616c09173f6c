"""Span-level precision/recall/F1 for tag sequences, plus token accuracy
and confusion matrices.

A span is a maximal run of one non-background label; a predicted span
counts as correct only when gold contains the identical (label, start,
end) span in the same sequence. Headline numbers are micro-averaged over
the whole corpus; a per-label breakdown and a token-level confusion
matrix come along.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LengthMismatch
from .tags import TAG_CODES, require_tag


@dataclass(frozen=True)
class TagSpan:
    """Maximal run of one non-O label: [start, end) token indices."""

    label: str
    start: int
    end: int


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class PRFReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    per_label: dict[str, LabelScore]
    confusion: list[list[int]]
    labels: list[str]
    degenerate: bool = False

    def to_dict(self, options: dict | None = None) -> dict:
        out = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "per_label": {
                label: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for label, s in self.per_label.items()
            },
            "confusion": [list(row) for row in self.confusion],
            "labels": list(self.labels),
            "degenerate": self.degenerate,
            "options": options or {},
        }
        return out


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _runs(seq, background) -> list[TagSpan]:
    spans: list[TagSpan] = []
    start = None
    current = None
    for i, label in enumerate(seq):
        if label == background:
            if current is not None:
                spans.append(TagSpan(str(current), start, i))
                current = None
            continue
        if label != current:
            if current is not None:
                spans.append(TagSpan(str(current), start, i))
            current = label
            start = i
    if current is not None:
        spans.append(TagSpan(str(current), start, len(seq)))
    return spans


def spanize(tags: list[str]) -> list[TagSpan]:
    """Maximal same-label non-O runs, in order. O contributes no spans."""
    for t in tags:
        require_tag(t)
    return _runs(tags, "O")


def _check_pairs(gold_seqs, pred_seqs):
    if len(gold_seqs) != len(pred_seqs):
        raise LengthMismatch(
            f"{len(gold_seqs)} gold sequences but {len(pred_seqs)} predicted"
        )
    for i, (g, p) in enumerate(zip(gold_seqs, pred_seqs)):
        if len(g) != len(p):
            raise LengthMismatch(
                f"sequence {i}: gold has {len(g)} positions, prediction {len(p)}"
            )


def _span_report(gold_seqs, pred_seqs, labels, background) -> PRFReport:
    tp = 0
    n_gold = 0
    n_pred = 0
    label_names = [str(l) for l in labels]
    per_label_tp = {name: 0 for name in label_names if name != str(background)}
    per_label_gold = dict(per_label_tp)
    per_label_pred = dict(per_label_tp)

    index = {name: i for i, name in enumerate(label_names)}
    confusion = [[0] * len(labels) for _ in labels]
    correct_tokens = 0
    total_tokens = 0

    for gold, pred in zip(gold_seqs, pred_seqs):
        gold_spans = set(_runs(gold, background))
        pred_spans = set(_runs(pred, background))
        tp += len(gold_spans & pred_spans)
        n_gold += len(gold_spans)
        n_pred += len(pred_spans)
        for span in gold_spans:
            per_label_gold[span.label] += 1
        for span in pred_spans:
            per_label_pred[span.label] += 1
        for span in gold_spans & pred_spans:
            per_label_tp[span.label] += 1
        for g, p in zip(gold, pred):
            confusion[index[str(g)]][index[str(p)]] += 1
            correct_tokens += g == p
            total_tokens += 1

    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    per_label = {}
    for label in per_label_gold:
        lp = per_label_tp[label] / per_label_pred[label] if per_label_pred[label] else 0.0
        lr = per_label_tp[label] / per_label_gold[label] if per_label_gold[label] else 0.0
        per_label[label] = LabelScore(lp, lr, _f1(lp, lr), per_label_gold[label])

    return PRFReport(
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        accuracy=correct_tokens / total_tokens if total_tokens else 0.0,
        per_label=per_label,
        confusion=confusion,
        labels=label_names,
        degenerate=(n_pred == 0 or n_gold == 0),
    )


def tag_prf(gold_seqs: list[list[str]], pred_seqs: list[list[str]]) -> PRFReport:
    """Span-exact micro P/R/F1 over tag-code sequences, with token accuracy.

    Accuracy counts every position, O included. The confusion matrix is
    token-level, gold rows by predicted columns, indexed by base tag id.
    """
    _check_pairs(gold_seqs, pred_seqs)
    for seq in gold_seqs:
        for t in seq:
            require_tag(t)
    for seq in pred_seqs:
        for t in seq:
            require_tag(t)
    return _span_report(gold_seqs, pred_seqs, list(TAG_CODES), "O")


def binary_prf(gold_seqs: list[list[int]], pred_seqs: list[list[int]]) -> PRFReport:
    """Same span logic over {0,1} sequences, with the single label "1"."""
    _check_pairs(gold_seqs, pred_seqs)
    for seq in (*gold_seqs, *pred_seqs):
        for v in seq:
            if v not in (0, 1):
                raise ValueError(f"binary sequences must hold 0/1, got {v!r}")
    return _span_report(gold_seqs, pred_seqs, [0, 1], 0)
