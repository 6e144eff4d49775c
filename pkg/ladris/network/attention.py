# ladris/network/attention.py

import math
from typing import Optional, Tuple

import torch
import torch.nn as nn

from ..exceptions import InvalidInputError, ShapeError


def masked_softmax(scores: torch.Tensor, token_mask: torch.Tensor) -> torch.Tensor:
    """Softmax over the last axis with padded tokens forced to exactly zero.

    Args:
        scores: (B, ..., N) attention logits
        token_mask: (B, N), True on real tokens
    """
    if not bool(token_mask.any(dim=-1).all()):
        raise InvalidInputError("Every sample needs at least one unmasked token")

    batch, length = token_mask.shape
    view = (batch,) + (1,) * (scores.dim() - 2) + (length,)
    scores = scores.masked_fill(~token_mask.view(view), float("-inf"))
    return torch.softmax(scores, dim=-1)


def scaled_dot_product(
        query: torch.Tensor,
        key: torch.Tensor,
        value: torch.Tensor,
        token_mask: torch.Tensor,
        scale: Optional[float] = None
) -> Tuple[torch.Tensor, torch.Tensor]:
    """softmax(q k^T / sqrt(scale)) v over the token axis.

    Args:
        query: (B, ..., P, E)
        key, value: (B, ..., N, E)
        token_mask: (B, N)
        scale: scaling factor d; defaults to the query width

    Returns:
        (output (B, ..., P, E_v), weights (B, ..., P, N))
    """
    if query.shape[-1] != key.shape[-1]:
        raise ShapeError(f"Query width {query.shape[-1]} does not match key width {key.shape[-1]}")
    scale = float(scale if scale is not None else query.shape[-1])
    scores = torch.matmul(query, key.transpose(-2, -1)) / math.sqrt(scale)
    weights = masked_softmax(scores, token_mask)
    return torch.matmul(weights, value), weights


class MultiHeadCrossAttention(nn.Module):
    """Standard multi-head attention from visual queries to linguistic tokens."""

    def __init__(self, query_dim: int, key_dim: int, embed_dim: int, heads: int, out_dim: Optional[int] = None):
        super().__init__()
        if embed_dim % heads:
            raise ShapeError(f"heads={heads} must divide embed_dim={embed_dim}")
        self.heads = heads
        self.head_dim = embed_dim // heads
        self.query = nn.Linear(query_dim, embed_dim)
        self.key = nn.Linear(key_dim, embed_dim)
        self.value = nn.Linear(key_dim, embed_dim)
        self.output = nn.Linear(embed_dim, out_dim or embed_dim)

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        batch, length, _ = x.shape
        return x.view(batch, length, self.heads, self.head_dim).transpose(1, 2)

    def forward(
            self,
            queries: torch.Tensor,
            tokens: torch.Tensor,
            token_mask: torch.Tensor
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """queries (B, P, Dq), tokens (B, N, Dk) -> ((B, P, out), weights (B, h, P, N))."""
        batch, positions, _ = queries.shape
        q = self._split(self.query(queries))
        k = self._split(self.key(tokens))
        v = self._split(self.value(tokens))

        attended, weights = scaled_dot_product(q, k, v, token_mask, scale=self.head_dim)
        attended = attended.transpose(1, 2).reshape(batch, positions, self.heads * self.head_dim)
        return self.output(attended), weights
