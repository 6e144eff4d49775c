# ladris/dataset/geometry.py

import math
from typing import Mapping

import logfire
import numpy as np

from ..exceptions import InvalidInputError
from ..models import CoverageReport, OrientedBox

# boundary tolerance so pixel centres lying exactly on an edge count as inside
_EDGE_EPS = 1e-9


def rasterize_obb(box: OrientedBox, height: int, width: int) -> np.ndarray:
    """Pixels whose centre lies inside the rotated rectangle (boundary inclusive).

    Pixel (row, col) has its centre at (col + 0.5, row + 0.5).
    """
    ys, xs = np.mgrid[0:height, 0:width]
    dx = xs + 0.5 - box.cx
    dy = ys + 0.5 - box.cy
    cos_a, sin_a = math.cos(box.angle), math.sin(box.angle)
    u = dx * cos_a - dy * sin_a
    v = dx * sin_a + dy * cos_a
    return (np.abs(u) <= box.w / 2 + _EDGE_EPS) & (np.abs(v) <= box.h / 2 + _EDGE_EPS)


def coverage_ratio(mask: np.ndarray) -> float:
    """Foreground pixels over all pixels."""
    mask = np.asarray(mask).astype(bool)
    if mask.size == 0:
        raise InvalidInputError("Mask has no pixels")
    return int(mask.sum()) / mask.size


def validate_coverage(
        samples: Mapping[str, float],
        max_ratio: float = 0.1,
        min_fraction: float = 0.9
) -> CoverageReport:
    """Check that at least min_fraction of samples cover strictly less than max_ratio.

    Args:
        samples: sample id -> coverage ratio
    """
    if not samples:
        raise InvalidInputError("Coverage validation needs at least one sample")

    violators = sorted(sample_id for sample_id, ratio in samples.items() if not ratio < max_ratio)
    fraction_below = (len(samples) - len(violators)) / len(samples)
    report = CoverageReport(
        passed=fraction_below >= min_fraction,
        n_samples=len(samples),
        fraction_below=fraction_below,
        max_ratio=max_ratio,
        min_fraction=min_fraction,
        violators=violators
    )
    logfire.info("Coverage validated",
                 passed=report.passed,
                 fraction_below=fraction_below,
                 violators=len(violators))
    return report
