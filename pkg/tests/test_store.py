import numpy as np
import pytest
import torch

from ladris.dataset import (
    AnnotationStore, ReferringDataset, make_loader, rasterize_obb, summarize_corpus
)
from ladris.exceptions import InvalidInputError
from ladris.models import OrientedBox, Split


def _triplet(seed: int, size: int = 32):
    rng = np.random.default_rng(seed)
    image = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    mask = rasterize_obb(OrientedBox(cx=12.5, cy=17.2, w=9, h=4, angle=0.6), size, size)
    return image, mask


@pytest.fixture
def store(tmp_path):
    store = AnnotationStore(tmp_path / "data")
    store.reset()
    for i, (expression, category, split) in enumerate((
            ("the red car in the middle of the image", "car", Split.TRAIN),
            ("the white truck on the left", "truck", Split.TRAIN),
            ("blue boat in the top right corner", "boat", Split.TRAIN),
            ("the green bus at the bottom", "bus", Split.VAL),
            ("the yellow tricycle on the right", "tricycle", Split.TEST),
    )):
        image, mask = _triplet(i)
        store.append(f"sample-{i}", image, mask, expression, category, split)
    return store


def test_triplet_round_trip(store):
    image, mask = _triplet(1)
    sample = store.read_samples(Split.TRAIN)[1]
    assert sample.expression == "the white truck on the left"
    assert sample.category == "truck"
    assert sample.split == "train"
    assert np.array_equal(store.load_image(sample), image)
    assert np.array_equal(store.load_mask(sample), mask)


def test_split_counts(store):
    assert store.split_counts() == {"train": 3, "val": 1, "test": 1}


def test_partial_trailing_line_is_ignored(store):
    with open(store.annotations_path, "a") as f:
        f.write('{"sample_id": "sample-9", "image_pa')
    assert len(store.read_samples()) == 5


def test_incongruent_mask_rejected(store):
    image, _ = _triplet(0)
    with pytest.raises(InvalidInputError):
        store.append("bad", image, np.zeros((16, 32), dtype=bool), "the car", "car", Split.TRAIN)


def test_missing_store(tmp_path):
    with pytest.raises(FileNotFoundError):
        AnnotationStore(tmp_path).read_samples()


def test_loader_batches(store, vocab):
    dataset = ReferringDataset(store, Split.TRAIN, vocab)
    batches = list(make_loader(dataset, batch_size=2))
    assert [len(b) for b in batches] == [2, 1]

    batch = batches[0]
    assert batch.images.shape == (2, 3, 32, 32)
    assert batch.images.dtype == torch.float32
    assert 0.0 <= batch.images.min() and batch.images.max() <= 1.0
    assert batch.masks.shape == (2, 32, 32)
    assert set(batch.masks.unique().tolist()) <= {0.0, 1.0}
    assert batch.triples[0].class_text == "car"
    assert batch.triples[0].descriptive_text == "the red [masked] in the middle of the image"


def test_shuffled_loader_is_seeded(store, vocab):
    dataset = ReferringDataset(store, Split.TRAIN, vocab)

    def order(seed):
        return [s.sample_id for b in make_loader(dataset, 1, shuffle=True, seed=seed) for s in b.samples]

    assert order(5) == order(5)
    assert sorted(order(5)) == ["sample-0", "sample-1", "sample-2"]


def test_empty_split_rejected(tmp_path, vocab):
    store = AnnotationStore(tmp_path)
    store.reset()
    with pytest.raises(InvalidInputError):
        ReferringDataset(store, Split.VAL, vocab)


def test_corpus_statistics(store):
    samples = store.read_samples()
    masks = [store.load_mask(s) for s in samples]
    stats = summarize_corpus(samples, masks, [True, False, False, False, False])

    assert stats.n_samples == 5
    assert stats.split_counts == {"train": 3, "val": 1, "test": 1}
    assert stats.category_counts["car"] == 1
    assert stats.category_counts["people"] == 0
    assert stats.night_fraction == pytest.approx(0.2)
    assert sum(stats.coverage_histogram.values()) == 5
    assert stats.mean_coverage == pytest.approx(masks[0].sum() / 1024)


def test_statistics_reject_mismatched_inputs(store):
    samples = store.read_samples()
    with pytest.raises(InvalidInputError):
        summarize_corpus(samples, [], [])
