# ladris/dataset/synthetic.py

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import logfire
import numpy as np
from PIL import Image

from ..exceptions import SceneGenerationError
from ..models import OrientedBox, SceneConfig
from .geometry import rasterize_obb

COLOR_RGB: Dict[str, Tuple[int, int, int]] = {
    "red": (220, 40, 40),
    "blue": (40, 80, 220),
    "green": (40, 170, 60),
    "yellow": (235, 210, 40),
    "white": (240, 240, 240),
    "black": (25, 25, 25),
    "orange": (240, 140, 30),
    "purple": (140, 60, 180),
}


@dataclass(frozen=True)
class GlyphFamily:
    """How one category is drawn: size scale, short/long side ratio and interior mark."""
    scale: float
    aspect: Tuple[float, float]
    pattern: str


GLYPHS: Dict[str, GlyphFamily] = {
    "people": GlyphFamily(0.55, (0.8, 1.0), "solid"),
    "car": GlyphFamily(0.85, (0.45, 0.6), "hstripe"),
    "motor": GlyphFamily(0.7, (0.3, 0.45), "front"),
    "bicycle": GlyphFamily(0.65, (0.25, 0.35), "ends"),
    "tricycle": GlyphFamily(0.75, (0.55, 0.7), "diagonal"),
    "truck": GlyphFamily(1.0, (0.35, 0.5), "cab"),
    "bus": GlyphFamily(1.0, (0.3, 0.4), "windows"),
    "boat": GlyphFamily(0.9, (0.35, 0.5), "deck"),
}

CLUSTER_SIZE_MAX = 4
CLUSTER_SHARED_COLOR_PROB = 0.5
NIGHT_DIMMING = 0.4


@dataclass(frozen=True)
class SceneInstance:
    category: str
    box: OrientedBox
    mask: np.ndarray
    color: str
    cluster_id: Optional[int] = None

    @property
    def area(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class SyntheticScene:
    image: np.ndarray
    instances: Tuple[SceneInstance, ...]
    is_night: bool = False

    @property
    def size(self) -> Tuple[int, int]:
        return self.image.shape[0], self.image.shape[1]

    def indices_of(self, category: str) -> List[int]:
        return [i for i, instance in enumerate(self.instances) if instance.category == category]


def _pattern_mask(pattern: str, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Interior mark in normalized box coordinates, u and v in [-1, 1]."""
    if pattern == "solid":
        return np.zeros_like(u, dtype=bool)
    if pattern == "hstripe":
        return np.abs(v) < 0.3
    if pattern == "front":
        return u > 0.4
    if pattern == "ends":
        return np.abs(u) > 0.6
    if pattern == "diagonal":
        return np.abs(u - v) < 0.35
    if pattern == "cab":
        return u > 0.45
    if pattern == "windows":
        return (np.floor((u + 1) * 3) % 2 == 0) & (np.abs(v) < 0.5)
    if pattern == "deck":
        return u ** 2 + v ** 2 < 0.3
    raise ValueError(f"Unknown glyph pattern: {pattern}")


def _render_background(size: int, rng: np.random.Generator) -> np.ndarray:
    coarse = rng.integers(70, 150, size=(8, 8, 3)).astype(np.uint8)
    coarse[..., 1] = np.clip(coarse[..., 1].astype(int) + 15, 0, 255)
    smooth = np.asarray(Image.fromarray(coarse).resize((size, size), Image.BILINEAR), dtype=np.float64)

    # one road band, horizontal or vertical
    band = int(rng.integers(size // 8, size // 4 + 1))
    start = int(rng.integers(0, size - band + 1))
    if rng.random() < 0.5:
        smooth[start:start + band, :] = smooth[start:start + band, :] * 0.4 + 60
    else:
        smooth[:, start:start + band] = smooth[:, start:start + band] * 0.4 + 60

    return smooth + rng.normal(0.0, 6.0, size=smooth.shape)


def _draw_glyph(canvas: np.ndarray, instance: SceneInstance) -> None:
    box = instance.box
    ys, xs = np.nonzero(instance.mask)
    dx, dy = xs + 0.5 - box.cx, ys + 0.5 - box.cy
    cos_a, sin_a = math.cos(box.angle), math.sin(box.angle)
    u = (dx * cos_a - dy * sin_a) / (box.w / 2)
    v = (dx * sin_a + dy * cos_a) / (box.h / 2)

    color = np.asarray(COLOR_RGB[instance.color], dtype=np.float64)
    # dark marks on light colors, light marks on dark ones
    mark = color * 0.45 if color.mean() > 110 else color * 0.4 + 150
    marked = _pattern_mask(GLYPHS[instance.category].pattern, u, v)
    canvas[ys, xs] = np.where(marked[:, None], mark, color)


class SceneGenerator:
    """Places category glyphs on a textured ground plane without overlaps."""

    def __init__(self, config: SceneConfig):
        self.config = config

    def _sample_box(
            self,
            category: str,
            rng: np.random.Generator,
            anchor: Optional[Tuple[float, float]] = None
    ) -> OrientedBox:
        size = self.config.image_size
        small, large = self.config.size_range
        glyph = GLYPHS[category]
        long_side = max(float(small), round(float(rng.integers(small, large + 1)) * glyph.scale))
        short_side = max(2.0, round(long_side * rng.uniform(*glyph.aspect)))
        angle = float(rng.uniform(-math.pi / 2, math.pi / 2))

        margin = long_side / 2 + 1
        if anchor is None:
            cx, cy = rng.uniform(margin, size - margin, size=2)
        else:
            spread = 1.5 * large
            cx = float(np.clip(anchor[0] + rng.uniform(-spread, spread), margin, size - margin))
            cy = float(np.clip(anchor[1] + rng.uniform(-spread, spread), margin, size - margin))
        return OrientedBox(cx=float(cx), cy=float(cy), w=long_side, h=short_side, angle=angle)

    def _place(
            self,
            category: str,
            color: str,
            occupied: np.ndarray,
            rng: np.random.Generator,
            anchor: Optional[Tuple[float, float]] = None,
            cluster_id: Optional[int] = None
    ) -> SceneInstance:
        size = self.config.image_size
        for _ in range(self.config.max_placement_retries):
            box = self._sample_box(category, rng, anchor)
            mask = rasterize_obb(box, size, size)
            if mask.any() and not (mask & occupied).any():
                return SceneInstance(category=category, box=box, mask=mask, color=color, cluster_id=cluster_id)
        raise SceneGenerationError(
            f"Could not place a {category} without overlap after {self.config.max_placement_retries} attempts"
        )

    @staticmethod
    def _reserve(occupied: np.ndarray, mask: np.ndarray) -> None:
        # keep one free pixel between instances
        grown = mask.copy()
        grown[1:, :] |= mask[:-1, :]
        grown[:-1, :] |= mask[1:, :]
        grown[:, 1:] |= mask[:, :-1]
        grown[:, :-1] |= mask[:, 1:]
        occupied |= grown

    def generate(self, rng: np.random.Generator, target_category: Optional[str] = None) -> SyntheticScene:
        config = self.config
        size = config.image_size
        colors = list(COLOR_RGB)
        low, high = config.instances_per_scene
        count = int(rng.integers(low, high + 1))
        target_category = target_category or str(rng.choice(config.categories))

        clustered = high >= 3 and rng.random() < config.same_class_cluster_prob
        if clustered:
            count = max(count, 3)
            cluster_size = int(rng.integers(3, min(count, CLUSTER_SIZE_MAX) + 1))
        else:
            cluster_size = 1

        occupied = np.zeros((size, size), dtype=bool)
        instances: List[SceneInstance] = []

        shared_color = str(rng.choice(colors)) if rng.random() < CLUSTER_SHARED_COLOR_PROB else None
        anchor = None
        if clustered:
            margin = config.size_range[1]
            anchor = tuple(float(v) for v in rng.uniform(margin, size - margin, size=2))
        for _ in range(cluster_size):
            color = shared_color if clustered and shared_color else str(rng.choice(colors))
            instance = self._place(
                target_category, color, occupied, rng,
                anchor=anchor, cluster_id=0 if clustered else None
            )
            self._reserve(occupied, instance.mask)
            instances.append(instance)

        for _ in range(count - cluster_size):
            category = str(rng.choice(config.categories))
            instance = self._place(category, str(rng.choice(colors)), occupied, rng)
            self._reserve(occupied, instance.mask)
            instances.append(instance)

        canvas = _render_background(size, rng)
        for instance in instances:
            _draw_glyph(canvas, instance)

        is_night = bool(rng.random() < config.night_prob)
        if is_night:
            canvas = canvas * NIGHT_DIMMING + np.array([0.0, 0.0, 20.0])

        image = np.clip(np.rint(canvas), 0, 255).astype(np.uint8)
        return SyntheticScene(image=image, instances=tuple(instances), is_night=is_night)


def generate_synthetic_scene(
        config: SceneConfig,
        rng: np.random.Generator,
        target_category: Optional[str] = None
) -> SyntheticScene:
    """Render one scene; the target category's instances come first in the instance list."""
    with logfire.span("generate_synthetic_scene"):
        return SceneGenerator(config).generate(rng, target_category)
