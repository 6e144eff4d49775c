# ladris/models/metrics.py

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

PRECISION_THRESHOLDS = (0.5, 0.6, 0.7, 0.8, 0.9)


class MetricsReport(BaseModel):
    """Segmentation quality over one split."""
    p_at: Dict[str, float] = Field(..., description="Fraction of samples with IoU above each threshold")
    oiou: float = Field(..., ge=0, le=1, description="Sum of intersections over sum of unions")
    miou: float = Field(..., ge=0, le=1, description="Mean per-sample IoU")
    n_samples: int = Field(..., ge=1)
    per_sample_iou: Optional[List[float]] = None

    @field_validator("p_at")
    @classmethod
    def validate_p_at(cls, v: Dict[str, float]) -> Dict[str, float]:
        expected = [f"{t:.1f}" for t in PRECISION_THRESHOLDS]
        if sorted(v) != expected:
            raise ValueError(f"p_at must have keys {expected}, got {sorted(v)}")
        for key in expected:
            if not 0 <= v[key] <= 1:
                raise ValueError(f"P@{key} outside [0, 1]: {v[key]}")
        values = [v[key] for key in expected]
        if any(later > earlier for earlier, later in zip(values, values[1:])):
            raise ValueError(f"P@t must not increase with t: {values}")
        return v

    @model_validator(mode="after")
    def validate_detail(self) -> "MetricsReport":
        if self.per_sample_iou is not None and len(self.per_sample_iou) != self.n_samples:
            raise ValueError("per_sample_iou length must equal n_samples")
        return self

    def precision(self, threshold: float) -> float:
        return self.p_at[f"{threshold:.1f}"]


class CoverageReport(BaseModel):
    """Outcome of the small-object coverage constraint."""
    passed: bool
    n_samples: int = Field(..., ge=1)
    fraction_below: float = Field(..., ge=0, le=1)
    max_ratio: float
    min_fraction: float
    violators: List[str] = Field(default_factory=list, description="Sample ids at or above max_ratio")
