# ladris/metrics/calculator.py

from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import math

import numpy as np

from ..exceptions import InvalidInputError, ShapeError
from ..models import PRECISION_THRESHOLDS, MetricsReport


def _as_bool(mask) -> np.ndarray:
    return np.asarray(mask).astype(bool)


def intersection_union(pred, gt) -> Tuple[int, int]:
    pred, gt = _as_bool(pred), _as_bool(gt)
    if pred.shape != gt.shape:
        raise ShapeError(f"Prediction {pred.shape} and ground truth {gt.shape} differ")
    return int(np.logical_and(pred, gt).sum()), int(np.logical_or(pred, gt).sum())


def iou(pred, gt) -> float:
    """|pred ∩ gt| / |pred ∪ gt|, defined as 1.0 when both masks are empty."""
    intersection, union = intersection_union(pred, gt)
    return 1.0 if union == 0 else intersection / union


@dataclass
class MetricsAccumulator:
    """Running (I, U, IoU) triples; shards merge by concatenation."""
    intersections: List[int] = field(default_factory=list)
    unions: List[int] = field(default_factory=list)
    ious: List[float] = field(default_factory=list)

    def add(self, pred, gt) -> float:
        intersection, union = intersection_union(pred, gt)
        value = 1.0 if union == 0 else intersection / union
        self.intersections.append(intersection)
        self.unions.append(union)
        self.ious.append(value)
        return value

    def merge(self, other: "MetricsAccumulator") -> "MetricsAccumulator":
        return MetricsAccumulator(
            intersections=self.intersections + other.intersections,
            unions=self.unions + other.unions,
            ious=self.ious + other.ious,
        )

    def __len__(self) -> int:
        return len(self.ious)

    def report(self, include_per_sample: bool = True) -> MetricsReport:
        if not self.ious:
            raise InvalidInputError("Cannot report metrics over zero samples")

        total_union = sum(self.unions)
        # every union empty means every prediction matched an empty target
        oiou = 1.0 if total_union == 0 else sum(self.intersections) / total_union
        n = len(self.ious)
        p_at = {f"{t:.1f}": sum(1 for v in self.ious if v > t) / n for t in PRECISION_THRESHOLDS}
        return MetricsReport(
            p_at=p_at,
            oiou=float(oiou),
            miou=math.fsum(self.ious) / n,
            n_samples=n,
            per_sample_iou=list(self.ious) if include_per_sample else None
        )


def compute_report(pairs: Iterable[Tuple[np.ndarray, np.ndarray]], include_per_sample: bool = True) -> MetricsReport:
    """P@0.5..0.9, oIoU and mIoU over (pred, gt) pairs."""
    accumulator = MetricsAccumulator()
    for pred, gt in pairs:
        accumulator.add(pred, gt)
    return accumulator.report(include_per_sample)
