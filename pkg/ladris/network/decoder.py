# ladris/network/decoder.py

from typing import Optional, Sequence

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..exceptions import InvalidInputError, ShapeError
from .encoders import with_coordinates
from .types import MultiScaleFeatures


def _conv_block(in_channels: int, out_channels: int, stride: int = 1) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1, stride=stride),
        nn.GroupNorm(1, out_channels),
        nn.GELU(),
    )


class DetailStem(nn.Module):
    """Shallow image features at full and half resolution for the last two upsampling steps."""

    def __init__(self, channels: int):
        super().__init__()
        self.full = _conv_block(3 + 2, channels)
        self.half_res = _conv_block(channels, channels, stride=2)

    def forward(self, image: torch.Tensor):
        full = self.full(with_coordinates(image))
        return full, self.half_res(full)


class MaskDecoder(nn.Module):
    """Top-down decoder: 2x upsampling with skip concatenation, then back to image size.

    With ``detail_channels > 0`` the two steps below stride 4 also concatenate
    shallow image features, so boundaries of objects a few pixels wide survive.
    """

    def __init__(self, channels: Sequence[int], fused_channels: int, detail_channels: int = 0):
        super().__init__()
        self.channels = tuple(channels)
        self.detail_channels = detail_channels
        self.inlet = nn.Conv2d(fused_channels, self.channels[-1], kernel_size=1)
        # stage i merges the running map (width channels[i+1], or channels[-1] at the top) with skip i
        running = self.channels[1:] + (self.channels[-1],)
        self.merges = nn.ModuleList(
            _conv_block(r + c, c) for r, c in zip(running, self.channels)
        )
        refine_channels = max(self.channels[0] // 2, 1)
        self.detail = DetailStem(detail_channels) if detail_channels else None
        self.refine = _conv_block(self.channels[0] + detail_channels, refine_channels)
        self.sharpen = _conv_block(refine_channels + detail_channels, refine_channels) if detail_channels else None
        self.head = nn.Conv2d(refine_channels, 1, kernel_size=1)

    def forward(
            self,
            fused: torch.Tensor,
            skips: MultiScaleFeatures,
            image: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        """fused (B, C', H', W') and the pyramid -> logits (B, 1, H0, W0)."""
        if fused.shape[-2:] != skips[-1].shape[-2:]:
            raise ShapeError(
                f"Fused map {tuple(fused.shape[-2:])} must match the coarsest skip {tuple(skips[-1].shape[-2:])}"
            )
        if self.detail is not None and image is None:
            raise InvalidInputError("Decoder was built with a detail path and needs the input image")

        x = self.inlet(fused)
        for index in reversed(range(4)):
            skip = skips[index]
            if x.shape[-2:] != skip.shape[-2:]:
                x = F.interpolate(x, scale_factor=2, mode="bilinear", align_corners=False)
            if x.shape[-2:] != skip.shape[-2:]:
                raise ShapeError(f"Skip {index} has size {tuple(skip.shape[-2:])}, expected {tuple(x.shape[-2:])}")
            x = self.merges[index](torch.cat((x, skip), dim=1))

        x = F.interpolate(x, scale_factor=2, mode="bilinear", align_corners=False)
        if self.detail is None:
            x = self.refine(x)
            x = F.interpolate(x, scale_factor=2, mode="bilinear", align_corners=False)
            return self.head(x)

        full, half = self.detail(image)
        if half.shape[-2:] != x.shape[-2:]:
            raise ShapeError(f"Image size {tuple(image.shape[-2:])} does not match the pyramid")
        x = self.refine(torch.cat((x, half), dim=1))
        x = F.interpolate(x, scale_factor=2, mode="bilinear", align_corners=False)
        x = self.sharpen(torch.cat((x, full), dim=1))
        return self.head(x)


def decode_mask(
        fused: torch.Tensor,
        skips: MultiScaleFeatures,
        decoder: MaskDecoder,
        image: Optional[torch.Tensor] = None
) -> torch.Tensor:
    return decoder(fused, skips, image)
