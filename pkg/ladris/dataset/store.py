# ladris/dataset/store.py

import json
import threading
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Union

import logfire
import numpy as np
from PIL import Image

from ..exceptions import InvalidInputError
from ..models import ReferringSample, Split

ANNOTATIONS_FILE = "annotations.jsonl"


class AnnotationStore:
    """Triplets on disk: one JSON line per sample plus PNG images and 0/255 PNG masks.

    A single writer appends; any number of readers may read concurrently.
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.annotations_path = self.root / ANNOTATIONS_FILE
        self._write_lock = threading.Lock()

    @property
    def exists(self) -> bool:
        return self.annotations_path.is_file()

    def reset(self) -> None:
        """Start an empty annotation file."""
        (self.root / "images").mkdir(parents=True, exist_ok=True)
        (self.root / "masks").mkdir(parents=True, exist_ok=True)
        self.annotations_path.write_text("")

    def append(
            self,
            sample_id: str,
            image: np.ndarray,
            mask: np.ndarray,
            expression: str,
            category: str,
            split: Split
    ) -> ReferringSample:
        mask = np.asarray(mask)
        if mask.shape != image.shape[:2]:
            raise InvalidInputError(f"Mask {mask.shape} is not congruent with image {image.shape[:2]}")

        sample = ReferringSample(
            sample_id=sample_id,
            image_path=f"images/{sample_id}.png",
            mask_path=f"masks/{sample_id}.png",
            expression=expression,
            category=category,
            split=split
        )
        with self._write_lock:
            if not self.exists:
                self.reset()
            Image.fromarray(np.ascontiguousarray(image)).save(self.root / sample.image_path)
            Image.fromarray((mask.astype(bool) * 255).astype(np.uint8)).save(self.root / sample.mask_path)
            # files first so a reader never sees a line without its images
            with open(self.annotations_path, "a") as f:
                f.write(sample.model_dump_json() + "\n")
        return sample

    def iter_samples(self) -> Iterator[ReferringSample]:
        if not self.exists:
            raise FileNotFoundError(f"No annotation file at {self.annotations_path}")
        with open(self.annotations_path, "r") as f:
            for line in f:
                # a concurrent append may leave a partial last line
                if not line.endswith("\n"):
                    break
                yield ReferringSample.model_validate(json.loads(line))

    def read_samples(self, split: Optional[Split] = None) -> List[ReferringSample]:
        wanted = Split(split).value if split is not None else None
        return [s for s in self.iter_samples() if wanted is None or s.split == wanted]

    def load_image(self, sample: ReferringSample) -> np.ndarray:
        with Image.open(self.root / sample.image_path) as img:
            return np.asarray(img.convert("RGB"))

    def load_mask(self, sample: ReferringSample) -> np.ndarray:
        with Image.open(self.root / sample.mask_path) as img:
            return np.asarray(img.convert("L")) > 127

    def split_counts(self) -> Dict[str, int]:
        counts = {split.value: 0 for split in Split}
        for sample in self.iter_samples():
            counts[sample.split] += 1
        logfire.debug("Split counts", **counts)
        return counts
