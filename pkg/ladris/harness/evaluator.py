# ladris/harness/evaluator.py

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import logfire
import numpy as np
import torch
from PIL import Image

from ..dataset import ReferringBatch, ReferringDataset, make_loader
from ..metrics import MetricsAccumulator
from ..models import MetricsReport
from ..network import ReferringSegmenter, binarize

GT_COLOR = np.array([0, 255, 0], dtype=np.float64)
PRED_COLOR = np.array([255, 0, 0], dtype=np.float64)
OVERLAY_ALPHA = 0.5


class Predictor(ABC):
    """Anything that maps a batch to binary masks."""

    @abstractmethod
    def predict(self, batch: ReferringBatch) -> np.ndarray:
        """Return boolean masks of shape (B, H, W)."""
        pass


class ModelPredictor(Predictor):
    def __init__(self, model: ReferringSegmenter):
        self.model = model

    def predict(self, batch: ReferringBatch) -> np.ndarray:
        was_training = self.model.training
        self.model.eval()
        with torch.no_grad():
            output = self.model(batch.images, self.model.tokenize(batch.triples))
        self.model.train(was_training)
        return binarize(output.logits).cpu().numpy()


class GroundTruthPredictor(Predictor):
    """Returns the reference masks; every metric comes out at 1.0."""

    def predict(self, batch: ReferringBatch) -> np.ndarray:
        return batch.masks.numpy() > 0.5


class EmptyPredictor(Predictor):
    def predict(self, batch: ReferringBatch) -> np.ndarray:
        return np.zeros(tuple(batch.masks.shape), dtype=bool)


@dataclass
class EvaluationResult:
    report: MetricsReport
    category_breakdown: Dict[str, Dict[str, float]] = field(default_factory=dict)


def render_overlay(image: np.ndarray, gt: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Ground truth tinted green, prediction tinted red, overlap gets both."""
    canvas = image.astype(np.float64)
    canvas[gt] = (1 - OVERLAY_ALPHA) * canvas[gt] + OVERLAY_ALPHA * GT_COLOR
    canvas[pred] = (1 - OVERLAY_ALPHA) * canvas[pred] + OVERLAY_ALPHA * PRED_COLOR
    return np.clip(np.rint(canvas), 0, 255).astype(np.uint8)


def evaluate(
        predictor: Predictor,
        dataset: ReferringDataset,
        batch_size: int = 8,
        overlays_dir: Optional[Union[str, Path]] = None,
        visualize: int = 0
) -> EvaluationResult:
    """Metrics over a whole dataset in file order, plus a per-category breakdown."""
    overall = MetricsAccumulator()
    per_category: Dict[str, MetricsAccumulator] = {}
    written = 0
    if overlays_dir is not None and visualize > 0:
        overlays_dir = Path(overlays_dir)
        overlays_dir.mkdir(parents=True, exist_ok=True)

    with logfire.span("evaluate") as span:
        span.set_attributes({"n_samples": len(dataset)})
        for batch in make_loader(dataset, batch_size, shuffle=False):
            predictions = predictor.predict(batch)
            gts = batch.masks.numpy() > 0.5
            for sample, pred, gt, image in zip(batch.samples, predictions, gts, batch.images):
                overall.add(pred, gt)
                per_category.setdefault(sample.category, MetricsAccumulator()).add(pred, gt)
                if overlays_dir is not None and written < visualize:
                    rgb = np.rint(image.numpy().transpose(1, 2, 0) * 255).astype(np.uint8)
                    Image.fromarray(render_overlay(rgb, gt, pred)).save(overlays_dir / f"{sample.sample_id}.png")
                    written += 1

        report = overall.report()
        breakdown = {}
        for category in sorted(per_category):
            category_report = per_category[category].report(include_per_sample=False)
            breakdown[category] = {
                "miou": category_report.miou,
                "oiou": category_report.oiou,
                "n_samples": category_report.n_samples,
            }
        logfire.info("Evaluation finished", miou=report.miou, oiou=report.oiou, n_samples=report.n_samples)
    return EvaluationResult(report=report, category_breakdown=breakdown)


def write_breakdown_json(breakdown: Dict[str, Dict[str, float]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(breakdown, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
