# ladris/network/encoders.py

from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import torch
import torch.nn as nn

from ..exceptions import InvalidInputError, ShapeError
from .attention import MultiHeadCrossAttention
from .tokenizer import Tokenizer
from .types import LinguisticEmbedding, MultiScaleFeatures

STAGE_STRIDES = (4, 8, 16, 32)


class TextEncoder(nn.Module):
    """Small trainable stand-in for a pretrained language model.

    Word embeddings plus learned positions, followed by one pre-norm
    self-attention block. Padded positions never act as keys and are zeroed
    in the output.
    """

    def __init__(self, tokenizer: Tokenizer, dim: int = 64, max_tokens: int = 24, heads: int = 4):
        super().__init__()
        self.tokenizer = tokenizer
        self.dim = dim
        self.max_tokens = max_tokens
        self.embedding = nn.Embedding(len(tokenizer), dim, padding_idx=tokenizer.pad_id)
        self.position = nn.Embedding(max_tokens, dim)
        self.norm = nn.LayerNorm(dim)
        self.attention = MultiHeadCrossAttention(dim, dim, dim, heads)

    def embed_tokens(self, token_ids: torch.Tensor) -> torch.Tensor:
        """Token plus position embeddings before attention, (B, N, D_b)."""
        if token_ids.shape[1] > self.max_tokens:
            raise ShapeError(f"Sequence length {token_ids.shape[1]} exceeds max_tokens={self.max_tokens}")
        positions = torch.arange(token_ids.shape[1], device=token_ids.device)
        return self.embedding(token_ids) + self.position(positions).unsqueeze(0)

    def forward(self, token_ids: torch.Tensor, token_mask: torch.Tensor) -> LinguisticEmbedding:
        embedded = self.embed_tokens(token_ids)
        normed = self.norm(embedded)
        attended, _ = self.attention(normed, normed, token_mask)
        sequence = (embedded + attended) * token_mask.unsqueeze(-1).to(embedded.dtype)
        return LinguisticEmbedding.from_sequence(sequence, token_mask)

    def encode_text(self, text: str, max_tokens: Optional[int] = None) -> LinguisticEmbedding:
        """Embed a single text as a batch of one."""
        ids, mask = self.tokenizer.encode_batch([text], max_tokens or self.max_tokens)
        device = self.embedding.weight.device
        return self(ids.to(device), mask.to(device))


class PyramidEncoder(nn.Module, ABC):
    """Any visual backbone producing four stages at strides 4, 8, 16 and 32."""

    stage_channels: Tuple[int, int, int, int]

    @abstractmethod
    def run_stage(self, index: int, x: torch.Tensor) -> torch.Tensor:
        """Run stage index (0-based) on the previous stage output or the image."""

    def encode_image(
            self,
            image: torch.Tensor,
            cdle_stack: Optional[nn.Module] = None,
            class_embedding: Optional[LinguisticEmbedding] = None,
            global_embedding: Optional[LinguisticEmbedding] = None
    ) -> MultiScaleFeatures:
        """Extract the pyramid, enhancing each stage output before the next stage consumes it."""
        if image.dim() != 4 or image.shape[1] != 3:
            raise ShapeError(f"Image must be (B, 3, H, W), got {tuple(image.shape)}")
        height, width = image.shape[-2:]
        if height % 32 or width % 32:
            raise ShapeError(f"Image size {height}x{width} must be divisible by 32")
        if cdle_stack is not None and (class_embedding is None or global_embedding is None):
            raise InvalidInputError("Category enhancement needs both class and global embeddings")

        stages = []
        x = image
        for index in range(4):
            x = self.run_stage(index, x)
            if cdle_stack is not None:
                x = cdle_stack(index, x, class_embedding, global_embedding)
            stages.append(x)
        return MultiScaleFeatures(stages=tuple(stages))


def with_coordinates(x: torch.Tensor) -> torch.Tensor:
    """Append normalized x and y coordinate channels in [-1, 1] to a (B, C, H, W) map."""
    batch, _, height, width = x.shape
    ys = torch.linspace(-1.0, 1.0, height, device=x.device, dtype=x.dtype)
    xs = torch.linspace(-1.0, 1.0, width, device=x.device, dtype=x.dtype)
    grid_y, grid_x = torch.meshgrid(ys, xs, indexing="ij")
    coords = torch.stack((grid_x, grid_y), dim=0).unsqueeze(0).expand(batch, -1, -1, -1)
    return torch.cat((x, coords), dim=1)


class ConvStage(nn.Module):
    """Patch merging by strided convolution, then residual conv blocks."""

    def __init__(self, in_channels: int, out_channels: int, patch: int, depth: int = 2):
        super().__init__()
        self.merge = nn.Conv2d(in_channels, out_channels, kernel_size=patch, stride=patch)
        self.norm = nn.GroupNorm(1, out_channels)
        self.blocks = nn.ModuleList(
            nn.Sequential(
                nn.Conv2d(out_channels, out_channels, kernel_size=3, padding=1),
                nn.GroupNorm(1, out_channels),
                nn.GELU(),
            )
            for _ in range(depth)
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.norm(self.merge(x))
        for block in self.blocks:
            x = x + block(x)
        return x


class ConvPyramidEncoder(PyramidEncoder):
    """Four-stage convolutional stand-in for a hierarchical vision transformer.

    The first stage sees two extra coordinate channels, so region words
    ("top left", "in the middle") have absolute positions to ground on.
    """

    def __init__(self, channels: Sequence[int] = (32, 64, 128, 256), depth: int = 2):
        super().__init__()
        if len(channels) != 4:
            raise ShapeError(f"Expected four stage widths, got {tuple(channels)}")
        self.stage_channels = tuple(channels)
        in_channels = (3 + 2,) + self.stage_channels[:-1]
        patches = (4, 2, 2, 2)
        self.stages = nn.ModuleList(
            ConvStage(c_in, c_out, patch, depth)
            for c_in, c_out, patch in zip(in_channels, self.stage_channels, patches)
        )

    def run_stage(self, index: int, x: torch.Tensor) -> torch.Tensor:
        if index == 0:
            x = with_coordinates(x)
        return self.stages[index](x)
