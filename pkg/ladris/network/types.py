# ladris/network/types.py

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import torch

from ..exceptions import ShapeError


@dataclass(frozen=True)
class LinguisticEmbedding:
    """Token embeddings of one text view, channel-first like the visual features.

    tokens: (B, D_b, N); token_mask: (B, N) with True on real tokens;
    pooled: (B, D_b) mean over the real tokens.
    """
    tokens: torch.Tensor
    token_mask: torch.Tensor
    pooled: torch.Tensor

    def __post_init__(self):
        if self.tokens.dim() != 3:
            raise ShapeError(f"tokens must be (B, D_b, N), got {tuple(self.tokens.shape)}")
        batch, _, length = self.tokens.shape
        if tuple(self.token_mask.shape) != (batch, length):
            raise ShapeError(
                f"token_mask {tuple(self.token_mask.shape)} does not match tokens {tuple(self.tokens.shape)}"
            )

    @property
    def sequence(self) -> torch.Tensor:
        """Tokens as (B, N, D_b) for attention."""
        return self.tokens.transpose(1, 2)

    @classmethod
    def from_sequence(cls, sequence: torch.Tensor, token_mask: torch.Tensor) -> "LinguisticEmbedding":
        weights = token_mask.to(sequence.dtype).unsqueeze(-1)
        pooled = (sequence * weights).sum(dim=1) / weights.sum(dim=1).clamp(min=1.0)
        return cls(tokens=sequence.transpose(1, 2), token_mask=token_mask, pooled=pooled)


@dataclass(frozen=True)
class MultiScaleFeatures:
    """Four-stage visual pyramid, each stage (B, D_i, H_i, W_i), finest first."""
    stages: Tuple[torch.Tensor, ...]

    def __post_init__(self):
        if len(self.stages) != 4:
            raise ShapeError(f"Expected four pyramid stages, got {len(self.stages)}")

    def __iter__(self) -> Iterator[torch.Tensor]:
        return iter(self.stages)

    def __getitem__(self, index: int) -> torch.Tensor:
        return self.stages[index]

    @property
    def shapes(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(stage.shape) for stage in self.stages)


@dataclass(frozen=True)
class AlignedPyramid:
    """Pyramid after pooling to one resolution and projecting to one width.

    pooled keeps each stage's own channels; scales are projected to C';
    merged is X^fp, the elementwise sum of the projected scales.
    """
    pooled: Tuple[torch.Tensor, ...]
    scales: Tuple[torch.Tensor, ...]
    merged: torch.Tensor


@dataclass(frozen=True)
class FusedFeature:
    """Language-fused representation handed to the decoder."""
    fused: torch.Tensor
    scales: MultiScaleFeatures
    srg_weights: Optional[torch.Tensor] = None
    aligned: Optional[AlignedPyramid] = None


@dataclass(frozen=True)
class TextBatch:
    """Token ids and masks for the global, class-level and descriptive views."""
    global_ids: torch.Tensor
    global_mask: torch.Tensor
    class_ids: torch.Tensor
    class_mask: torch.Tensor
    descriptive_ids: torch.Tensor
    descriptive_mask: torch.Tensor

    def to(self, device: torch.device) -> "TextBatch":
        return TextBatch(**{name: getattr(self, name).to(device) for name in self.__dataclass_fields__})
