"""Joint summarization and tagging: one decoder state, two heads.

At every decode timestep the model emits a summary token and a
faithfulness tag from the same hidden state. Tag ids are shifted from
base space 0-5 to model space 3-8 so they can never collide with the
reserved token ids 0-3 (PAD is 1); the tag head therefore has 9 logits.
Training runs in two phases: first the tag head alone (classifier
isolation), then everything under a joint token+tag cross-entropy.
"""

from __future__ import annotations

import csv
import random
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import torch
from torch.nn import functional as F

from .corpus import Dataset, Dialogue, DialogueExample
from .errors import (
    EmptyDataset,
    ModelNotTrained,
    NoValidPositions,
    OutOfRangeTagId,
)
from .nets import Seq2SeqDualHead
from .tags import FINAL_CODES, INTERIOR_CODES, TAG_BY_CODE
from .vocab import BOS, EOS_ID, PAD, SPECIAL_IDS, Vocab

TAG_SHIFT = 3
N_TAG_LOGITS = 9  # shifted ids reach 8, so 9 logits (0-2 are never targets)


# ---------------------------------------------------------------------------
# Tag id shifting
# ---------------------------------------------------------------------------

def shift_tag_id(base_id: int) -> int:
    if not 0 <= base_id <= 5:
        raise OutOfRangeTagId(f"base tag id {base_id} outside 0-5")
    return base_id + TAG_SHIFT


def unshift_tag_id(shifted_id: int) -> int:
    if not TAG_SHIFT <= shifted_id <= TAG_SHIFT + 5:
        raise OutOfRangeTagId(f"shifted tag id {shifted_id} outside 3-8")
    return shifted_id - TAG_SHIFT


def shift_tags(base_ids: list[int]) -> list[int]:
    return [shift_tag_id(b) for b in base_ids]


def unshift_tags(shifted_ids: list[int]) -> list[int]:
    return [unshift_tag_id(s) for s in shifted_ids]


# ---------------------------------------------------------------------------
# Masking, softmax, loss
# ---------------------------------------------------------------------------

def special_token_mask(token_ids):
    """True exactly where a token id is not one of the reserved ids 0-3.

    Accepts a list of ints (returns list of bool) or a tensor (returns a
    bool tensor of the same shape).
    """
    if isinstance(token_ids, torch.Tensor):
        mask = torch.ones_like(token_ids, dtype=torch.bool)
        for special in SPECIAL_IDS:
            mask &= token_ids != special
        return mask
    return [i not in SPECIAL_IDS for i in token_ids]


def head_softmax(logits: torch.Tensor) -> torch.Tensor:
    """Standard softmax over the last dimension."""
    return torch.softmax(logits, dim=-1)


@dataclass(frozen=True)
class DualHeadOutput:
    """Both head outputs derived from one decoder state."""

    hidden: torch.Tensor
    token_logits: torch.Tensor
    token_dist: torch.Tensor
    tag_logits: torch.Tensor
    tag_dist: torch.Tensor


def dual_head_output(model: Seq2SeqDualHead, hidden: torch.Tensor) -> DualHeadOutput:
    """Project one hidden state through both heads and normalize."""
    token_logits, tag_logits = model.project(hidden)
    return DualHeadOutput(
        hidden=hidden,
        token_logits=token_logits,
        token_dist=head_softmax(token_logits),
        tag_logits=tag_logits,
        tag_dist=head_softmax(tag_logits),
    )


def joint_loss(
    token_logits: torch.Tensor,
    tag_logits: torch.Tensor,
    target_tokens: torch.Tensor,
    target_tags_shifted: torch.Tensor,
    mask: torch.Tensor,
    lambda_tag: float = 1.0,
) -> torch.Tensor:
    """Token cross-entropy plus ``lambda_tag`` times tag cross-entropy.

    The token term averages over non-PAD target positions; the tag term
    averages over mask-true positions only, so logits at masked-out
    positions cannot influence the loss at all.
    """
    token_logits = token_logits.reshape(-1, token_logits.shape[-1])
    tag_logits = tag_logits.reshape(-1, tag_logits.shape[-1])
    target_tokens = target_tokens.reshape(-1)
    target_tags_shifted = target_tags_shifted.reshape(-1)
    mask = mask.reshape(-1)

    if not bool(mask.any()):
        raise NoValidPositions("special-token mask leaves no tag position")
    token_keep = target_tokens != PAD
    if not bool(token_keep.any()):
        raise NoValidPositions("no non-PAD token position")

    masked_tags = target_tags_shifted[mask]
    if bool((masked_tags < TAG_SHIFT).any()) or bool((masked_tags > TAG_SHIFT + 5).any()):
        raise OutOfRangeTagId("tag targets at masked positions must lie in 3-8")

    token_ce = F.cross_entropy(token_logits[token_keep], target_tokens[token_keep])
    tag_ce = F.cross_entropy(tag_logits[mask], masked_tags)
    return token_ce + lambda_tag * tag_ce


def tag_only_loss(
    tag_logits: torch.Tensor,
    target_tags_shifted: torch.Tensor,
    mask: torch.Tensor,
) -> torch.Tensor:
    """Phase-1 objective: tag cross-entropy alone over mask-true positions."""
    tag_logits = tag_logits.reshape(-1, tag_logits.shape[-1])
    target_tags_shifted = target_tags_shifted.reshape(-1)
    mask = mask.reshape(-1)
    if not bool(mask.any()):
        raise NoValidPositions("special-token mask leaves no tag position")
    masked = target_tags_shifted[mask]
    if bool((masked < TAG_SHIFT).any()) or bool((masked > TAG_SHIFT + 5).any()):
        raise OutOfRangeTagId("tag targets at masked positions must lie in 3-8")
    return F.cross_entropy(tag_logits[mask], masked)


# ---------------------------------------------------------------------------
# Configuration and estimator
# ---------------------------------------------------------------------------

@dataclass
class JointTrainConfig:
    learning_rate: float = 2e-5
    train_batch: int = 4
    eval_batch: int = 1
    weight_decay: float = 0.01
    epochs: int = 15
    seed: int = 42
    lambda_tag: float = 1.0
    enc_layers: int = 2
    dec_layers: int = 2
    d_model: int = 128
    heads: int = 4
    ffn_dim: int | None = None
    max_len: int = 512
    dropout: float = 0.0
    phase1_train_trunk: bool = False
    dtype: str = "float32"

    def __post_init__(self):
        for name in ("learning_rate", "train_batch", "eval_batch", "epochs",
                     "enc_layers", "dec_layers", "d_model", "heads", "max_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lambda_tag < 0:
            raise ValueError("lambda_tag must be >= 0")


def _as_examples(dataset) -> list[DialogueExample]:
    if isinstance(dataset, Dataset):
        return dataset.examples
    return list(dataset)


def _torch_dtype(name: str) -> torch.dtype:
    return {"float32": torch.float32, "float64": torch.float64}[name]


class JointSummarizerTagger:
    """Dual-head summarizer-tagger with a fit/predict surface.

    Hyperparameters live in :class:`JointTrainConfig`; fitted state is held
    in trailing-underscore attributes (``vocab_``, ``model_``,
    ``loss_curve_``).
    """

    def __init__(self, config: JointTrainConfig | None = None, **overrides):
        self.config = replace(config or JointTrainConfig(), **overrides)
        self.vocab_: Vocab | None = None
        self.model_: Seq2SeqDualHead | None = None
        self.loss_curve_: list[tuple[int, float, float, float]] = []
        self.epoch_losses_: dict[str, list[float]] = {"phase1": [], "phase2": []}
        self._step = 0

    # -- sklearn-style parameter access ------------------------------------

    def get_params(self, deep: bool = True) -> dict:
        return asdict(self.config)

    def set_params(self, **params) -> "JointSummarizerTagger":
        self.config = replace(self.config, **params)
        return self

    # -- model setup --------------------------------------------------------

    def initialize(self, dataset) -> "JointSummarizerTagger":
        """Build vocabulary and randomly initialized parameters without training."""
        self._ensure_model(_as_examples(dataset))
        return self

    def _ensure_model(self, examples: list[DialogueExample]) -> None:
        if self.model_ is not None:
            return
        if not examples:
            raise EmptyDataset("cannot fit on an empty dataset")
        cfg = self.config
        self.vocab_ = Vocab.from_examples(examples)
        torch.manual_seed(cfg.seed)
        self.model_ = Seq2SeqDualHead(
            vocab_size=len(self.vocab_),
            d_model=cfg.d_model,
            heads=cfg.heads,
            enc_layers=cfg.enc_layers,
            dec_layers=cfg.dec_layers,
            ffn_dim=cfg.ffn_dim,
            max_len=cfg.max_len,
            dropout=cfg.dropout,
            n_tag_logits=N_TAG_LOGITS,
        ).to(_torch_dtype(cfg.dtype))

    # -- data assembly -------------------------------------------------------

    def _encode_example(self, ex: DialogueExample):
        vocab = self.vocab_
        cap = self.config.max_len
        src = vocab.encode(ex.dialogue.flat_tokens())
        if len(src) > cap:
            src = src[-cap:]  # keep the dialogue tail
        summary_ids = vocab.encode(ex.summary.tokens)
        if len(summary_ids) + 1 > cap:
            raise ValueError("summary longer than the configured max_len")
        tgt_in = [BOS] + summary_ids
        tgt_out = summary_ids + [EOS_ID]
        tags = [shift_tag_id(TAG_BY_CODE[t].base_id) for t in ex.summary.tags]
        # tgt_out position len(summary) is EOS_ID: special, no tag target.
        tag_targets = tags + [TAG_SHIFT]
        return src, tgt_in, tgt_out, tag_targets

    def _tensorize(self, encoded: list[tuple]):
        dtype = torch.long
        src_len = max(len(e[0]) for e in encoded)
        tgt_len = max(len(e[1]) for e in encoded)
        pad_row = lambda row, n: row + [PAD] * (n - len(row))
        src = torch.tensor([pad_row(e[0], src_len) for e in encoded], dtype=dtype)
        tgt_in = torch.tensor([pad_row(e[1], tgt_len) for e in encoded], dtype=dtype)
        tgt_out = torch.tensor([pad_row(e[2], tgt_len) for e in encoded], dtype=dtype)
        # Padding tag targets with a masked-out placeholder id.
        tags = torch.tensor(
            [e[3] + [TAG_SHIFT] * (tgt_len - len(e[3])) for e in encoded], dtype=dtype
        )
        mask = special_token_mask(tgt_out)
        return src, tgt_in, tgt_out, tags, mask

    # -- training ------------------------------------------------------------

    def _run_epochs(self, examples, phase: str, epochs: int, optimizer, loss_fn):
        cfg = self.config
        encoded = [self._encode_example(ex) for ex in examples]
        batch = cfg.train_batch
        for epoch in range(epochs):
            order = list(range(len(encoded)))
            random.Random(cfg.seed * 1_000_003 + epoch).shuffle(order)
            epoch_losses = []
            for start in range(0, len(order), batch):
                chunk = [encoded[i] for i in order[start:start + batch]]
                src, tgt_in, tgt_out, tags, mask = self._tensorize(chunk)
                _, token_logits, tag_logits = self.model_(src, tgt_in)
                loss = loss_fn(token_logits, tag_logits, tgt_out, tags, mask)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()

                with torch.no_grad():
                    keep = tgt_out.reshape(-1) != PAD
                    token_ce = F.cross_entropy(
                        token_logits.reshape(-1, token_logits.shape[-1])[keep],
                        tgt_out.reshape(-1)[keep],
                    ).item()
                    tag_ce = tag_only_loss(tag_logits, tags, mask).item()
                self._step += 1
                self.loss_curve_.append((self._step, token_ce, tag_ce, loss.item()))
                epoch_losses.append(loss.item())
            self.epoch_losses_[phase].append(sum(epoch_losses) / len(epoch_losses))

    def fit_phase1(self, dataset, epochs: int | None = None) -> "JointSummarizerTagger":
        """Train the tag head (and optionally the trunk) on tag loss alone."""
        examples = _as_examples(dataset)
        if not examples:
            raise EmptyDataset("cannot fit on an empty dataset")
        self._ensure_model(examples)
        cfg = self.config
        model = self.model_
        for p in model.parameters():
            p.requires_grad_(cfg.phase1_train_trunk)
        for p in model.tag_head.parameters():
            p.requires_grad_(True)
        for p in model.lm_head.parameters():
            p.requires_grad_(False)
        optimizer = torch.optim.AdamW(
            [p for p in model.parameters() if p.requires_grad],
            lr=cfg.learning_rate,
            weight_decay=cfg.weight_decay,
        )
        loss_fn = lambda token_logits, tag_logits, tgt_out, tags, mask: tag_only_loss(
            tag_logits, tags, mask
        )
        model.train()
        self._run_epochs(examples, "phase1", epochs or cfg.epochs, optimizer, loss_fn)
        for p in model.parameters():
            p.requires_grad_(True)
        return self

    def fit_phase2(self, dataset, epochs: int | None = None) -> "JointSummarizerTagger":
        """Jointly train every parameter on token + tag cross-entropy."""
        examples = _as_examples(dataset)
        if not examples:
            raise EmptyDataset("cannot fit on an empty dataset")
        self._ensure_model(examples)
        cfg = self.config
        model = self.model_
        for p in model.parameters():
            p.requires_grad_(True)
        optimizer = torch.optim.AdamW(
            model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
        )
        loss_fn = lambda token_logits, tag_logits, tgt_out, tags, mask: joint_loss(
            token_logits, tag_logits, tgt_out, tags, mask, cfg.lambda_tag
        )
        model.train()
        self._run_epochs(examples, "phase2", epochs or cfg.epochs, optimizer, loss_fn)
        return self

    def fit(self, dataset, phase: str = "both") -> "JointSummarizerTagger":
        if phase in ("both", "phase1"):
            self.fit_phase1(dataset)
        if phase in ("both", "phase2"):
            self.fit_phase2(dataset)
        return self

    # -- inference -----------------------------------------------------------

    def generate_with_tags(
        self, dialogue: Dialogue, max_len: int = 64
    ) -> tuple[list[str], list[str]]:
        """Greedy summary decode with one tag per emitted token.

        Interior tags come from {O, W, OB, C, N}; the final emitted slot is
        the end-of-summary decision and is restricted to {O, M}.
        """
        if self.model_ is None or self.vocab_ is None:
            raise ModelNotTrained("call fit() or load() before generating")
        if max_len < 1:
            raise ValueError("max_len must be >= 1")
        model = self.model_
        vocab = self.vocab_
        model.eval()

        src_ids = vocab.encode(dialogue.flat_tokens())
        cap = self.config.max_len
        if len(src_ids) > cap:
            src_ids = src_ids[-cap:]
        src = torch.tensor([src_ids], dtype=torch.long)

        emitted: list[int] = []
        tag_rows: list[torch.Tensor] = []
        banned = [i for i in SPECIAL_IDS if i != EOS_ID]
        with torch.no_grad():
            memory = model.encode(src)
            tgt = [BOS]
            limit = min(max_len, cap - 1)
            for _ in range(limit):
                hidden = model.decode(
                    torch.tensor([tgt], dtype=torch.long), memory, src
                )
                token_logits, tag_logits = model.project(hidden[0, -1])
                token_logits = token_logits.clone()
                token_logits[banned] = float("-inf")
                next_id = int(token_logits.argmax())
                if next_id == EOS_ID:
                    break
                emitted.append(next_id)
                tag_rows.append(tag_logits.detach().clone())
                tgt.append(next_id)

        tags = []
        for i, row in enumerate(tag_rows):
            codes = FINAL_CODES if i == len(tag_rows) - 1 else INTERIOR_CODES
            tags.append(_restricted_tag(row, codes))
        return vocab.decode(emitted), tags

    def predict(
        self, dialogues: list[Dialogue], max_len: int = 64
    ) -> list[tuple[list[str], list[str]]]:
        return [self.generate_with_tags(d, max_len) for d in dialogues]

    def predict_tags_teacher_forced(self, dataset) -> list[list[str]]:
        """Classify the tags of given summaries under teacher forcing.

        Feeds each example's summary tokens through the decoder and reads
        the tag head at every non-special position, with the usual slot
        restrictions (interior {O,W,OB,C,N}, [EOS] slot {O,M}).
        """
        if self.model_ is None or self.vocab_ is None:
            raise ModelNotTrained("call fit() or load() before predicting")
        examples = _as_examples(dataset)
        model = self.model_
        model.eval()
        out: list[list[str]] = []
        with torch.no_grad():
            for ex in examples:
                src, tgt_in, tgt_out, _ = self._encode_example(ex)
                _, _, tag_logits = model(
                    torch.tensor([src], dtype=torch.long),
                    torch.tensor([tgt_in], dtype=torch.long),
                )
                n = len(ex.summary.tokens)  # positions 0..n-1 of tgt_out
                tags = []
                for i in range(n):
                    codes = FINAL_CODES if i == n - 1 else INTERIOR_CODES
                    tags.append(_restricted_tag(tag_logits[0, i], codes))
                out.append(tags)
        return out

    # -- persistence ----------------------------------------------------------

    def save(self, path: str | Path) -> None:
        if self.model_ is None:
            raise ModelNotTrained("nothing to save before fit()")
        torch.save(
            {
                "format_version": 1,
                "kind": "joint",
                "config": asdict(self.config),
                "vocab": self.vocab_.to_dict(),
                "state_dict": self.model_.state_dict(),
                "loss_curve": self.loss_curve_,
                "epoch_losses": self.epoch_losses_,
            },
            path,
        )

    @classmethod
    def load(cls, path: str | Path) -> "JointSummarizerTagger":
        payload = torch.load(path, map_location="cpu", weights_only=False)
        if payload.get("kind") != "joint":
            raise ValueError(f"{path} is not a joint-model checkpoint")
        est = cls(JointTrainConfig(**payload["config"]))
        est.vocab_ = Vocab.from_dict(payload["vocab"])
        cfg = est.config
        est.model_ = Seq2SeqDualHead(
            vocab_size=len(est.vocab_),
            d_model=cfg.d_model,
            heads=cfg.heads,
            enc_layers=cfg.enc_layers,
            dec_layers=cfg.dec_layers,
            ffn_dim=cfg.ffn_dim,
            max_len=cfg.max_len,
            dropout=cfg.dropout,
            n_tag_logits=N_TAG_LOGITS,
        ).to(_torch_dtype(cfg.dtype))
        est.model_.load_state_dict(payload["state_dict"])
        est.loss_curve_ = [tuple(row) for row in payload["loss_curve"]]
        est.epoch_losses_ = payload.get("epoch_losses", {"phase1": [], "phase2": []})
        est._step = len(est.loss_curve_)
        return est

    def write_loss_curve(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "token_loss", "tag_loss", "joint_loss"])
            writer.writerows(self.loss_curve_)


def _restricted_tag(row: torch.Tensor, codes) -> str:
    return max(codes, key=lambda c: row[TAG_BY_CODE[c].base_id + TAG_SHIFT].item())


# Spec-level convenience wrappers -------------------------------------------

def train_phase1(dataset, config: JointTrainConfig | None = None) -> JointSummarizerTagger:
    return JointSummarizerTagger(config).fit_phase1(dataset)


def train_phase2(
    dataset,
    config: JointTrainConfig | None = None,
    model: JointSummarizerTagger | None = None,
) -> JointSummarizerTagger:
    est = model or JointSummarizerTagger(config)
    return est.fit_phase2(dataset)


def generate_with_tags(model: JointSummarizerTagger, dialogue: Dialogue, max_len: int = 64):
    return model.generate_with_tags(dialogue, max_len)
