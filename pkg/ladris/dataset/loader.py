# ladris/dataset/loader.py

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import torch
from torch.utils.data import DataLoader, Dataset

from ..exceptions import InvalidInputError
from ..language import decompose
from ..models import CategoryVocabulary, LinguisticTriple, ReferringSample, Split
from .store import AnnotationStore


@dataclass(frozen=True)
class ReferringItem:
    sample: ReferringSample
    image: torch.Tensor
    mask: torch.Tensor
    triple: LinguisticTriple


@dataclass(frozen=True)
class ReferringBatch:
    """Stacked images (B, 3, H, W) in [0, 1], masks (B, H, W) in {0, 1}, and their decomposed expressions."""
    images: torch.Tensor
    masks: torch.Tensor
    triples: List[LinguisticTriple]
    samples: List[ReferringSample]

    def __len__(self) -> int:
        return len(self.samples)


class ReferringDataset(Dataset):
    """Samples of one split, read from an annotation store in file order."""

    def __init__(self, store: AnnotationStore, split: Optional[Split], vocab: CategoryVocabulary):
        self.store = store
        self.vocab = vocab
        self.samples = store.read_samples(split)
        if not self.samples:
            raise InvalidInputError(f"Split {split} of {store.root} has no samples")

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index: int) -> ReferringItem:
        sample = self.samples[index]
        image = self.store.load_image(sample).astype(np.float32) / 255.0
        mask = self.store.load_mask(sample).astype(np.float32)
        return ReferringItem(
            sample=sample,
            image=torch.from_numpy(np.ascontiguousarray(image.transpose(2, 0, 1))),
            mask=torch.from_numpy(mask),
            triple=decompose(sample.expression, self.vocab)
        )


def collate_items(items: Sequence[ReferringItem]) -> ReferringBatch:
    return ReferringBatch(
        images=torch.stack([item.image for item in items]),
        masks=torch.stack([item.mask for item in items]),
        triples=[item.triple for item in items],
        samples=[item.sample for item in items]
    )


def make_loader(dataset: ReferringDataset, batch_size: int, shuffle: bool = False, seed: int = 0) -> DataLoader:
    """Single-process loader whose shuffle order is fixed by the seed."""
    generator = torch.Generator()
    generator.manual_seed(seed)
    return DataLoader(
        dataset,
        batch_size=batch_size,
        shuffle=shuffle,
        collate_fn=collate_items,
        generator=generator,
        num_workers=0
    )
