# ladris/models/samples.py

import math
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, Field, field_validator

from .language import CATEGORY_NAMES


class Split(str, Enum):
    """Dataset partition a sample belongs to."""
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class ReferringSample(BaseModel):
    """One image-text-mask triplet as stored in the annotation file."""
    sample_id: str
    image_path: str = Field(..., description="Image path relative to the dataset root")
    mask_path: str = Field(..., description="Mask path relative to the dataset root")
    expression: str = Field(..., min_length=1)
    category: str
    split: Split

    @field_validator("category")
    @classmethod
    def validate_category(cls, v: str) -> str:
        if v not in CATEGORY_NAMES:
            raise ValueError(f"Unknown category: {v}")
        return v

    model_config = {"use_enum_values": True}


class OrientedBox(BaseModel):
    """Rotated rectangle in pixel coordinates; angle in radians, counter-clockwise on screen."""
    cx: float
    cy: float
    w: float = Field(..., gt=0)
    h: float = Field(..., gt=0)
    angle: float = 0.0

    @field_validator("angle")
    @classmethod
    def validate_angle(cls, v: float) -> float:
        if not -math.pi / 2 <= v < math.pi / 2:
            raise ValueError(f"Angle must lie in [-pi/2, pi/2), got {v}")
        return v

    @property
    def area(self) -> float:
        return self.w * self.h

    def corners(self) -> Tuple[Tuple[float, float], ...]:
        """Box corners as (x, y) pairs in drawing order."""
        cos_a, sin_a = math.cos(self.angle), math.sin(self.angle)
        half_w, half_h = self.w / 2, self.h / 2
        corners = []
        for u, v in ((-half_w, -half_h), (half_w, -half_h), (half_w, half_h), (-half_w, half_h)):
            # image y grows downward, so a counter-clockwise turn on screen flips the sign of sin
            corners.append((self.cx + u * cos_a + v * sin_a, self.cy - u * sin_a + v * cos_a))
        return tuple(corners)

    model_config = {"frozen": True}
