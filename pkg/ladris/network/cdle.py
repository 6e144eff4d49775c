# ladris/network/cdle.py

from typing import Sequence, Tuple

import torch
import torch.nn as nn

from ..exceptions import ShapeError
from .attention import scaled_dot_product
from .types import LinguisticEmbedding


class LinguisticAttention(nn.Module):
    """Single-head attention from visual positions to linguistic tokens.

    Channel projections are per-position linear maps, i.e. 1x1 convolutions
    along the channel axis. The scaling factor d equals the visual width.
    """

    def __init__(self, visual_dim: int, text_dim: int):
        super().__init__()
        self.query = nn.Linear(visual_dim, visual_dim)
        self.key = nn.Linear(text_dim, visual_dim)
        self.value = nn.Linear(text_dim, visual_dim)
        self.d_scale = visual_dim

    def forward(self, x: torch.Tensor, s: LinguisticEmbedding) -> Tuple[torch.Tensor, torch.Tensor]:
        """x (B, HW, D) -> (alpha (B, HW, D), weights (B, HW, N))."""
        tokens = s.sequence
        return scaled_dot_product(
            self.query(x), self.key(tokens), self.value(tokens), s.token_mask, scale=self.d_scale
        )


class ResidualGate(nn.Module):
    """z = phi_o(omega_w(alpha) * phi_m(x)); f = x + z * phi_f(z)."""

    def __init__(self, dim: int):
        super().__init__()
        self.weighting = nn.Linear(dim, dim)
        self.visual_map = nn.Sequential(nn.Linear(dim, dim), nn.GELU())
        self.output_map = nn.Sequential(nn.Linear(dim, dim), nn.GELU())
        self.gate = nn.Sequential(
            nn.Linear(dim, dim),
            nn.ReLU(),
            nn.Linear(dim, dim),
            nn.Tanh(),
        )
        self.reset_gate()

    def reset_gate(self) -> None:
        """Zero the gate's last layer so the block starts as the identity."""
        nn.init.zeros_(self.gate[2].weight)
        nn.init.zeros_(self.gate[2].bias)

    def residual(self, alpha: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
        """The pre-gate update z."""
        if alpha.shape != x.shape:
            raise ShapeError(f"Attention output {tuple(alpha.shape)} does not match features {tuple(x.shape)}")
        return self.output_map(self.weighting(alpha) * self.visual_map(x))

    def forward(self, alpha: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
        z = self.residual(alpha, x)
        return x + z * self.gate(z)


class CategoryEnhancementStage(nn.Module):
    """Class-level pass followed by the global pass, for one encoder stage.

    The descriptive component has no entry point here: only c and l are accepted.
    """

    def __init__(self, visual_dim: int, text_dim: int):
        super().__init__()
        self.class_attention = LinguisticAttention(visual_dim, text_dim)
        self.class_gate = ResidualGate(visual_dim)
        self.global_attention = LinguisticAttention(visual_dim, text_dim)
        self.global_gate = ResidualGate(visual_dim)

    def forward(self, x: torch.Tensor, c: LinguisticEmbedding, l: LinguisticEmbedding) -> torch.Tensor:
        """x (B, HW, D) -> f^l (B, HW, D)."""
        alpha_c, _ = self.class_attention(x, c)
        f_c = self.class_gate(alpha_c, x)
        alpha_l, _ = self.global_attention(f_c, l)
        return self.global_gate(alpha_l, f_c)


class CategoryLinguisticEnhancer(nn.Module):
    """One enhancement stage per encoder stage, applied to (B, D, H, W) maps."""

    def __init__(self, channels: Sequence[int], text_dim: int):
        super().__init__()
        self.stages = nn.ModuleList(CategoryEnhancementStage(dim, text_dim) for dim in channels)

    def forward(
            self,
            index: int,
            feature: torch.Tensor,
            c: LinguisticEmbedding,
            l: LinguisticEmbedding
    ) -> torch.Tensor:
        batch, dim, height, width = feature.shape
        x = feature.flatten(2).transpose(1, 2)
        enhanced = self.stages[index](x, c, l)
        return enhanced.transpose(1, 2).reshape(batch, dim, height, width)


def category_attention(
        x: torch.Tensor,
        c: LinguisticEmbedding,
        attention: LinguisticAttention
) -> torch.Tensor:
    """alpha^c for visual features x (B, HW, D)."""
    alpha, _ = attention(x, c)
    return alpha


def residual_gate(alpha: torch.Tensor, x: torch.Tensor, gate: ResidualGate) -> torch.Tensor:
    return gate(alpha, x)


def cdle_forward(
        x: torch.Tensor,
        c: LinguisticEmbedding,
        l: LinguisticEmbedding,
        stage: CategoryEnhancementStage
) -> torch.Tensor:
    return stage(x, c, l)
