# ladris/dataset/statistics.py

import math
from collections import Counter
from typing import Dict, List, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..exceptions import InvalidInputError
from ..models import CATEGORY_NAMES, ReferringSample
from ..network import split_words
from .geometry import coverage_ratio

COVERAGE_BINS = (0.0, 0.01, 0.02, 0.05, 0.1, 1.0)


class CorpusStatistics(BaseModel):
    n_samples: int = Field(..., ge=1)
    category_counts: Dict[str, int]
    split_counts: Dict[str, int]
    night_fraction: float = Field(..., ge=0, le=1)
    coverage_histogram: Dict[str, int] = Field(..., description="Sample counts per coverage bin '[lo, hi)'")
    mean_coverage: float
    mean_expression_words: float


def summarize_corpus(
        samples: Sequence[ReferringSample],
        masks: Sequence[np.ndarray],
        night_flags: Sequence[bool]
) -> CorpusStatistics:
    if not samples:
        raise InvalidInputError("Cannot summarize an empty corpus")
    if not len(samples) == len(masks) == len(night_flags):
        raise InvalidInputError("samples, masks and night_flags must have the same length")

    ratios = [coverage_ratio(mask) for mask in masks]
    edges = np.asarray(COVERAGE_BINS)
    # the last bin is closed so full coverage lands in it
    bins = np.clip(np.searchsorted(edges, ratios, side="right") - 1, 0, len(edges) - 2)
    labels: List[str] = [f"[{lo:g}, {hi:g})" for lo, hi in zip(COVERAGE_BINS, COVERAGE_BINS[1:])]
    histogram = {label: 0 for label in labels}
    for b in bins:
        histogram[labels[int(b)]] += 1

    categories = Counter(sample.category for sample in samples)
    splits = Counter(sample.split for sample in samples)
    return CorpusStatistics(
        n_samples=len(samples),
        category_counts={name: categories.get(name, 0) for name in CATEGORY_NAMES},
        split_counts={name: splits.get(name, 0) for name in ("train", "val", "test")},
        night_fraction=sum(bool(flag) for flag in night_flags) / len(samples),
        coverage_histogram=histogram,
        mean_coverage=math.fsum(ratios) / len(ratios),
        mean_expression_words=sum(len(split_words(s.expression)) for s in samples) / len(samples)
    )
