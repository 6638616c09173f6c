"""Encoder-only proxy tagger.

The dialogue and candidate summary (optionally the gold summary too) are
packed into one sequence, ``dialogue [SEP] summary [EOS]`` or
``dialogue [SEP] gold [SEP] summary [EOS]``, and every position is
classified. Only the summary region carries the supervised signal that
matters: positions outside it simply target O, and model selection uses
span F1 on the summary region alone.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import torch
from torch.nn import functional as F

from . import metrics
from .corpus import Dataset, DialogueExample, TaggedSummary
from .errors import (
    EmptyDataset,
    MissingGoldSummary,
    ModelNotTrained,
)
from .nets import EncoderClassifier
from .tags import FINAL_CODES, INTERIOR_CODES, TAG_BY_CODE, binarize_tags
from .vocab import PAD, SEP, Vocab


@dataclass(frozen=True)
class ProxyInput:
    """One packed classifier input with its summary region [start, end)."""

    mode: str
    input_ids: list[int]
    summary_region: tuple[int, int]


def assemble_input(
    dialogue,
    summary: TaggedSummary,
    gold_summary: list[str] | None = None,
    mode: str = "HS",
    vocab: Vocab | None = None,
    max_len: int | None = None,
) -> ProxyInput:
    """Pack dialogue (and gold summary, in GS mode) with the tagged summary.

    HS ignores any gold summary passed. When the packed sequence exceeds
    ``max_len`` the dialogue is truncated from the front; the summary (and
    gold summary) are never cut.
    """
    if vocab is None:
        raise ValueError("assemble_input needs a vocabulary")
    if mode not in ("HS", "GS"):
        raise ValueError(f"mode must be HS or GS, got {mode!r}")

    dialogue_ids = vocab.encode(dialogue.flat_tokens())
    summary_ids = vocab.encode(summary.tokens)  # ends with the [EOS] word

    middle: list[int] = []
    if mode == "GS":
        if not gold_summary:
            raise MissingGoldSummary("GS mode requires a gold summary")
        middle = vocab.encode(gold_summary) + [SEP]

    fixed = 1 + len(middle) + len(summary_ids)  # first SEP + middle + summary
    if max_len is not None:
        budget = max_len - fixed
        if budget < 0:
            raise ValueError("summary does not fit within max_len")
        if len(dialogue_ids) > budget:
            dialogue_ids = dialogue_ids[len(dialogue_ids) - budget:]

    ids = dialogue_ids + [SEP] + middle + summary_ids
    region = (len(ids) - len(summary_ids), len(ids))
    return ProxyInput(mode=mode, input_ids=ids, summary_region=region)


@dataclass
class ProxyTrainConfig:
    learning_rate: float = 2e-5
    batch_size: int = 1
    epochs: int = 10
    weight_decay: float = 0.01
    best_model_metric: str = "f1"
    label_space: str = "multiclass"  # or "binary"
    mode: str = "HS"  # or "GS"
    enc_layers: int = 2
    d_model: int = 128
    heads: int = 4
    ffn_dim: int | None = None
    max_len: int = 512
    dropout: float = 0.0
    seed: int = 42

    def __post_init__(self):
        for name in ("learning_rate", "batch_size", "epochs", "enc_layers",
                     "d_model", "heads", "max_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.label_space not in ("multiclass", "binary"):
            raise ValueError(f"label_space must be multiclass or binary")
        if self.mode not in ("HS", "GS"):
            raise ValueError("mode must be HS or GS")


class ProxyTagger:
    """Per-token faithfulness classifier over packed proxy inputs."""

    def __init__(self, config: ProxyTrainConfig | None = None, **overrides):
        self.config = replace(config or ProxyTrainConfig(), **overrides)
        self.vocab_: Vocab | None = None
        self.model_: EncoderClassifier | None = None
        self.loss_curve_: list[tuple[int, float]] = []
        self.best_f1_: float | None = None

    def get_params(self, deep: bool = True) -> dict:
        return asdict(self.config)

    def set_params(self, **params) -> "ProxyTagger":
        self.config = replace(self.config, **params)
        return self

    @property
    def n_labels(self) -> int:
        return 2 if self.config.label_space == "binary" else 6

    def initialize(self, dataset) -> "ProxyTagger":
        """Build vocabulary and randomly initialized parameters without training."""
        examples = dataset.examples if isinstance(dataset, Dataset) else list(dataset)
        if not examples:
            raise EmptyDataset("cannot initialize on an empty dataset")
        if self.model_ is None:
            cfg = self.config
            self.vocab_ = Vocab.from_examples(examples)
            torch.manual_seed(cfg.seed)
            self.model_ = EncoderClassifier(
                vocab_size=len(self.vocab_),
                n_labels=self.n_labels,
                d_model=cfg.d_model,
                heads=cfg.heads,
                layers=cfg.enc_layers,
                ffn_dim=cfg.ffn_dim,
                max_len=cfg.max_len,
                dropout=cfg.dropout,
            )
        return self

    # -- data assembly --------------------------------------------------------

    def _assemble(self, ex: DialogueExample) -> ProxyInput:
        return assemble_input(
            ex.dialogue,
            ex.summary,
            gold_summary=ex.gold_summary,
            mode=self.config.mode,
            vocab=self.vocab_,
            max_len=self.config.max_len,
        )

    def _targets(self, ex: DialogueExample, proxy_input: ProxyInput) -> list[int]:
        if self.config.label_space == "binary":
            region = binarize_tags(ex.summary.tags)
            background = 0
        else:
            region = [TAG_BY_CODE[t].base_id for t in ex.summary.tags]
            background = 0  # O
        start, end = proxy_input.summary_region
        targets = [background] * len(proxy_input.input_ids)
        targets[start:end] = region
        return targets

    # -- training ---------------------------------------------------------------

    def fit(
        self,
        dataset,
        val_dataset=None,
        epochs: int | None = None,
    ) -> "ProxyTagger":
        examples = dataset.examples if isinstance(dataset, Dataset) else list(dataset)
        if not examples:
            raise EmptyDataset("cannot fit on an empty dataset")
        val = (
            val_dataset.examples
            if isinstance(val_dataset, Dataset)
            else list(val_dataset or [])
        )
        cfg = self.config
        self.initialize(examples + val)
        model = self.model_
        optimizer = torch.optim.AdamW(
            model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
        )

        prepared = [(ex, self._assemble(ex)) for ex in examples]
        selection = val if val else examples
        best_state = None
        best_f1 = -1.0
        step = len(self.loss_curve_)
        for epoch in range(epochs or cfg.epochs):
            order = list(range(len(prepared)))
            random.Random(cfg.seed * 7_919 + epoch).shuffle(order)
            model.train()
            for start in range(0, len(order), cfg.batch_size):
                chunk = [prepared[i] for i in order[start:start + cfg.batch_size]]
                width = max(len(pi.input_ids) for _, pi in chunk)
                ids = torch.tensor(
                    [pi.input_ids + [PAD] * (width - len(pi.input_ids)) for _, pi in chunk],
                    dtype=torch.long,
                )
                targets = torch.tensor(
                    [
                        self._targets(ex, pi) + [0] * (width - len(pi.input_ids))
                        for ex, pi in chunk
                    ],
                    dtype=torch.long,
                )
                logits = model(ids)
                keep = (ids != PAD).reshape(-1)
                loss = F.cross_entropy(
                    logits.reshape(-1, self.n_labels)[keep], targets.reshape(-1)[keep]
                )
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                step += 1
                self.loss_curve_.append((step, loss.item()))

            f1 = self._selection_f1(selection)
            if f1 > best_f1:
                best_f1 = f1
                best_state = {
                    k: v.detach().clone() for k, v in model.state_dict().items()
                }
        if best_state is not None:
            model.load_state_dict(best_state)
        self.best_f1_ = best_f1
        return self

    def _selection_f1(self, examples: list[DialogueExample]) -> float:
        preds = [self.predict_example(ex) for ex in examples]
        if self.config.label_space == "binary":
            gold = [binarize_tags(ex.summary.tags) for ex in examples]
            return metrics.binary_prf(gold, preds).f1
        gold = [list(ex.summary.tags) for ex in examples]
        return metrics.tag_prf(gold, preds).f1

    # -- inference ----------------------------------------------------------------

    def predict_tags(self, proxy_input: ProxyInput):
        """Tags over the summary region of one packed input.

        Multiclass predictions respect slot restrictions: interior
        positions draw from {O, W, OB, C, N}, the final [EOS] slot from
        {O, M}. Binary predictions are plain 0/1 argmax.
        """
        if self.model_ is None:
            raise ModelNotTrained("call fit() or load() before predicting")
        model = self.model_
        model.eval()
        with torch.no_grad():
            logits = model(torch.tensor([proxy_input.input_ids], dtype=torch.long))[0]
        start, end = proxy_input.summary_region
        region = logits[start:end]
        if self.config.label_space == "binary":
            return [int(row.argmax()) for row in region]
        out = []
        for i, row in enumerate(region):
            codes = FINAL_CODES if i == len(region) - 1 else INTERIOR_CODES
            out.append(max(codes, key=lambda c: row[TAG_BY_CODE[c].base_id].item()))
        return out

    def predict_example(self, ex: DialogueExample):
        return self.predict_tags(self._assemble(ex))

    def predict(self, dataset):
        examples = dataset.examples if isinstance(dataset, Dataset) else list(dataset)
        return [self.predict_example(ex) for ex in examples]

    # -- persistence ----------------------------------------------------------------

    def save(self, path: str | Path) -> None:
        if self.model_ is None:
            raise ModelNotTrained("nothing to save before fit()")
        torch.save(
            {
                "format_version": 1,
                "kind": "proxy",
                "config": asdict(self.config),
                "vocab": self.vocab_.to_dict(),
                "state_dict": self.model_.state_dict(),
                "loss_curve": self.loss_curve_,
            },
            path,
        )

    @classmethod
    def load(cls, path: str | Path) -> "ProxyTagger":
        payload = torch.load(path, map_location="cpu", weights_only=False)
        if payload.get("kind") != "proxy":
            raise ValueError(f"{path} is not a proxy-model checkpoint")
        est = cls(ProxyTrainConfig(**payload["config"]))
        est.vocab_ = Vocab.from_dict(payload["vocab"])
        cfg = est.config
        est.model_ = EncoderClassifier(
            vocab_size=len(est.vocab_),
            n_labels=est.n_labels,
            d_model=cfg.d_model,
            heads=cfg.heads,
            layers=cfg.enc_layers,
            ffn_dim=cfg.ffn_dim,
            max_len=cfg.max_len,
            dropout=cfg.dropout,
        )
        est.model_.load_state_dict(payload["state_dict"])
        est.loss_curve_ = [tuple(row) for row in payload["loss_curve"]]
        return est


def train_proxy(dataset, config: ProxyTrainConfig | None = None, val_dataset=None) -> ProxyTagger:
    return ProxyTagger(config).fit(dataset, val_dataset=val_dataset)


def predict_tags(model: ProxyTagger, proxy_input: ProxyInput):
    return model.predict_tags(proxy_input)
