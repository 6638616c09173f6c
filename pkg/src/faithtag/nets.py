"""Torch building blocks: a small encoder-decoder trunk with two output
heads on the decoder states, and an encoder-only token classifier."""

from __future__ import annotations

import torch
from torch import nn

from .errors import DimensionMismatch
from .vocab import PAD


def _positions(batch: int, length: int, device) -> torch.Tensor:
    return torch.arange(length, device=device).unsqueeze(0).expand(batch, length)


class Seq2SeqDualHead(nn.Module):
    """Encoder-decoder transformer whose decoder states feed two heads.

    The language-model head projects each decoder state to vocabulary
    logits; the tag head projects the *same* state to faithfulness-tag
    logits. Nothing else feeds either head.
    """

    def __init__(
        self,
        vocab_size: int,
        d_model: int = 128,
        heads: int = 4,
        enc_layers: int = 2,
        dec_layers: int = 2,
        ffn_dim: int | None = None,
        max_len: int = 512,
        dropout: float = 0.0,
        n_tag_logits: int = 9,
    ):
        super().__init__()
        ffn_dim = ffn_dim or 4 * d_model
        self.d_model = d_model
        self.max_len = max_len
        self.embed = nn.Embedding(vocab_size, d_model, padding_idx=PAD)
        self.pos_embed = nn.Embedding(max_len, d_model)
        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(
                d_model, heads, ffn_dim, dropout, activation="gelu", batch_first=True
            ),
            enc_layers,
            enable_nested_tensor=False,
        )
        self.decoder = nn.TransformerDecoder(
            nn.TransformerDecoderLayer(
                d_model, heads, ffn_dim, dropout, activation="gelu", batch_first=True
            ),
            dec_layers,
        )
        self.lm_head = nn.Linear(d_model, vocab_size)
        self.tag_head = nn.Linear(d_model, n_tag_logits)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        pos = _positions(ids.shape[0], ids.shape[1], ids.device)
        return self.embed(ids) + self.pos_embed(pos)

    def encode(self, src_ids: torch.Tensor) -> torch.Tensor:
        pad_mask = src_ids == PAD
        return self.encoder(self._embed(src_ids), src_key_padding_mask=pad_mask)

    def decode(
        self,
        tgt_in: torch.Tensor,
        memory: torch.Tensor,
        src_ids: torch.Tensor,
    ) -> torch.Tensor:
        length = tgt_in.shape[1]
        causal = torch.triu(
            torch.ones(length, length, dtype=torch.bool, device=tgt_in.device),
            diagonal=1,
        )
        return self.decoder(
            self._embed(tgt_in),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_in == PAD,
            memory_key_padding_mask=src_ids == PAD,
        )

    def project(self, hidden: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Affine-project decoder states to (token logits, tag logits)."""
        if hidden.shape[-1] != self.d_model:
            raise DimensionMismatch(
                f"hidden state has dimension {hidden.shape[-1]}, expected {self.d_model}"
            )
        return self.lm_head(hidden), self.tag_head(hidden)

    def forward(
        self, src_ids: torch.Tensor, tgt_in: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        memory = self.encode(src_ids)
        hidden = self.decode(tgt_in, memory, src_ids)
        token_logits, tag_logits = self.project(hidden)
        return hidden, token_logits, tag_logits


class EncoderClassifier(nn.Module):
    """Encoder-only transformer classifying every input position."""

    def __init__(
        self,
        vocab_size: int,
        n_labels: int,
        d_model: int = 128,
        heads: int = 4,
        layers: int = 2,
        ffn_dim: int | None = None,
        max_len: int = 512,
        dropout: float = 0.0,
    ):
        super().__init__()
        ffn_dim = ffn_dim or 4 * d_model
        self.d_model = d_model
        self.max_len = max_len
        self.embed = nn.Embedding(vocab_size, d_model, padding_idx=PAD)
        self.pos_embed = nn.Embedding(max_len, d_model)
        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(
                d_model, heads, ffn_dim, dropout, activation="gelu", batch_first=True
            ),
            layers,
            enable_nested_tensor=False,
        )
        self.head = nn.Linear(d_model, n_labels)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        pos = _positions(ids.shape[0], ids.shape[1], ids.device)
        states = self.encoder(
            self.embed(ids) + self.pos_embed(pos),
            src_key_padding_mask=ids == PAD,
        )
        return self.head(states)
