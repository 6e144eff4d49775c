# ladris/network/arfm.py

from typing import Optional, Sequence, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..exceptions import InvalidConfigError, ShapeError
from .attention import MultiHeadCrossAttention
from .types import AlignedPyramid, FusedFeature, LinguisticEmbedding, MultiScaleFeatures

BRANCHES = ("global", "descriptive", "class")


class PyramidAligner(nn.Module):
    """Average-pool every stage to one resolution and project it to one width."""

    def __init__(self, channels: Sequence[int], target_channels: int):
        super().__init__()
        self.target_channels = target_channels
        self.projections = nn.ModuleList(nn.Conv2d(c, target_channels, kernel_size=1) for c in channels)

    def forward(self, pyramid: MultiScaleFeatures, target_hw: Tuple[int, int]) -> AlignedPyramid:
        finest_h, finest_w = pyramid[0].shape[-2:]
        if target_hw[0] > finest_h or target_hw[1] > finest_w:
            raise InvalidConfigError(f"Alignment target {target_hw} exceeds the finest scale {(finest_h, finest_w)}")

        pooled = tuple(F.adaptive_avg_pool2d(stage, target_hw) for stage in pyramid)
        scales = tuple(projection(p) for projection, p in zip(self.projections, pooled))
        merged = torch.stack(scales, dim=0).sum(dim=0)
        return AlignedPyramid(pooled=pooled, scales=scales, merged=merged)


class ReasoningBranch(nn.Module):
    """Multi-head attention from X^fp positions to one linguistic view."""

    def __init__(self, fused_channels: int, text_dim: int, heads: int):
        super().__init__()
        self.attention = MultiHeadCrossAttention(fused_channels, text_dim, fused_channels, heads)

    def forward(self, merged: torch.Tensor, s: LinguisticEmbedding) -> torch.Tensor:
        """merged (B, C', H', W') -> alpha_s (B, H'W', C')."""
        queries = merged.flatten(2).transpose(1, 2)
        alpha, _ = self.attention(queries, s.sequence, s.token_mask)
        return alpha


class ScaleReasoningGate(nn.Module):
    """Global average pooling, two 1x1 convolutions with ReLU, softmax over (l, d, c)."""

    def __init__(self, fused_channels: int, hidden: Optional[int] = None):
        super().__init__()
        hidden = hidden or max(fused_channels // 4, 1)
        self.reduce = nn.Conv2d(fused_channels, hidden, kernel_size=1)
        self.expand = nn.Conv2d(hidden, 3, kernel_size=1)

    def logits(self, merged: torch.Tensor) -> torch.Tensor:
        pooled = F.adaptive_avg_pool2d(merged, 1)
        return self.expand(F.relu(self.reduce(pooled))).flatten(1)

    def forward(self, merged: torch.Tensor, branch_mask: Sequence[bool] = (True, True, True)) -> torch.Tensor:
        """Per-sample weights (B, 3); disabled branches get exactly zero."""
        logits = self.logits(merged)
        enabled = torch.tensor(branch_mask, dtype=torch.bool, device=logits.device)
        if not bool(enabled.any()):
            raise InvalidConfigError("At least one reasoning branch must be enabled")
        return torch.softmax(logits.masked_fill(~enabled, float("-inf")), dim=-1)


class ChannelFusion(nn.Module):
    """Concatenate the weighted branch responses and compress back to C'."""

    def __init__(self, fused_channels: int):
        super().__init__()
        self.projection = nn.Linear(3 * fused_channels, fused_channels)

    def forward(
            self,
            alpha_l: torch.Tensor,
            alpha_d: torch.Tensor,
            alpha_c: torch.Tensor,
            weights: torch.Tensor
    ) -> torch.Tensor:
        if not alpha_l.shape == alpha_d.shape == alpha_c.shape:
            raise ShapeError(
                f"Branch outputs differ: {tuple(alpha_l.shape)}, {tuple(alpha_d.shape)}, {tuple(alpha_c.shape)}"
            )
        w = weights.unsqueeze(1).unsqueeze(-1)  # (B, 1, 3, 1)
        stacked = torch.stack((alpha_l, alpha_d, alpha_c), dim=2) * w
        return self.projection(stacked.flatten(2))


class FeedForward(nn.Module):
    """Position-wise two-layer MLP with a residual connection."""

    def __init__(self, channels: int, expansion: int = 2):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(channels, expansion * channels),
            nn.GELU(),
            nn.Linear(expansion * channels, channels),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.net(x)


class ScaleGateFusion(nn.Module):
    """Redistribute the fused map to every pyramid resolution through a sigmoid gate.

    out_i = x_i + sigmoid(p_i) * p_i, with p_i a 1x1 projection of the
    nearest-upsampled fused map.
    """

    def __init__(self, fused_channels: int, channels: Sequence[int]):
        super().__init__()
        self.projections = nn.ModuleList(nn.Conv2d(fused_channels, c, kernel_size=1) for c in channels)

    def forward(self, fused: torch.Tensor, pyramid: MultiScaleFeatures) -> MultiScaleFeatures:
        outputs = []
        for projection, stage in zip(self.projections, pyramid):
            upsampled = F.interpolate(fused, size=stage.shape[-2:], mode="nearest")
            p = projection(upsampled)
            outputs.append(stage + torch.sigmoid(p) * p)
        return MultiScaleFeatures(stages=tuple(outputs))


class AdaptiveReasoningFusion(nn.Module):
    """Align the pyramid, reason over l, d and c in parallel, fuse and gate back to every scale."""

    def __init__(self, channels: Sequence[int], text_dim: int, heads: int = 4):
        super().__init__()
        self.channels = tuple(channels)
        self.fused_channels = self.channels[-1]
        self.aligner = PyramidAligner(self.channels, self.fused_channels)
        self.branches = nn.ModuleDict({
            name: ReasoningBranch(self.fused_channels, text_dim, heads) for name in BRANCHES
        })
        self.srg = ScaleReasoningGate(self.fused_channels)
        self.fusion = ChannelFusion(self.fused_channels)
        self.feed_forward = FeedForward(self.fused_channels)
        self.scale_gate = ScaleGateFusion(self.fused_channels, self.channels)

    def forward(
            self,
            pyramid: MultiScaleFeatures,
            l: LinguisticEmbedding,
            d: LinguisticEmbedding,
            c: LinguisticEmbedding,
            branch_mask: Sequence[bool] = (True, True, True)
    ) -> FusedFeature:
        coarsest = tuple(pyramid[-1].shape[-2:])
        aligned = self.aligner(pyramid, coarsest)
        merged = aligned.merged
        batch, channels, height, width = merged.shape

        alphas = []
        for name, s, enabled in zip(BRANCHES, (l, d, c), branch_mask):
            if enabled:
                alphas.append(self.branches[name](merged, s))
            else:
                alphas.append(merged.new_zeros(batch, height * width, channels))

        weights = self.srg(merged, branch_mask)
        alpha_f = self.fusion(*alphas, weights)

        residual = merged.flatten(2).transpose(1, 2) + alpha_f
        refined = self.feed_forward(residual)
        fused = refined.transpose(1, 2).reshape(batch, channels, height, width)
        return FusedFeature(
            fused=fused,
            scales=self.scale_gate(fused, pyramid),
            srg_weights=weights,
            aligned=aligned
        )


def align_pyramid(
        pyramid: MultiScaleFeatures,
        target_hw: Tuple[int, int],
        aligner: PyramidAligner
) -> AlignedPyramid:
    return aligner(pyramid, target_hw)


def arfb_branch(aligned: AlignedPyramid, s: LinguisticEmbedding, branch: ReasoningBranch) -> torch.Tensor:
    return branch(aligned.merged, s)


def scale_reasoning_gate(
        aligned: AlignedPyramid,
        srg: ScaleReasoningGate
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    weights = srg(aligned.merged)
    return weights[:, 0], weights[:, 1], weights[:, 2]


def fuse(
        alpha_l: torch.Tensor,
        alpha_d: torch.Tensor,
        alpha_c: torch.Tensor,
        weights: torch.Tensor,
        fusion: ChannelFusion
) -> torch.Tensor:
    return fusion(alpha_l, alpha_d, alpha_c, weights)


def arfm_forward(
        pyramid: MultiScaleFeatures,
        l: LinguisticEmbedding,
        d: LinguisticEmbedding,
        c: LinguisticEmbedding,
        module: AdaptiveReasoningFusion
) -> FusedFeature:
    return module(pyramid, l, d, c)
