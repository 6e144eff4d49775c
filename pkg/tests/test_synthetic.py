from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

from ladris.dataset import (
    AnnotationPipeline, ReferringDescription, SceneInstance, SyntheticScene, coverage_ratio,
    describe_target, find_satisfiers, generate_expression, generate_synthetic_scene, rasterize_obb,
    validate_coverage
)
from ladris.dataset.clients import RasterSegmenterClient, TemplateCaptionerClient
from ladris.exceptions import ExpressionGenerationError, GenerationError, SceneGenerationError
from ladris.models import CATEGORY_NAMES, OrientedBox, SceneConfig


def _scene(*instances, size: int = 64) -> SyntheticScene:
    built = []
    for category, color, box in instances:
        built.append(SceneInstance(category=category, box=box, mask=rasterize_obb(box, size, size), color=color))
    return SyntheticScene(image=np.zeros((size, size, 3), dtype=np.uint8), instances=tuple(built))


def test_single_instance_scene():
    config = SceneConfig(instances_per_scene=(1, 1))
    scene = generate_synthetic_scene(config, np.random.default_rng(0))
    assert len(scene.instances) == 1
    assert scene.instances[0].mask.any()
    assert scene.image.shape == (64, 64, 3) and scene.image.dtype == np.uint8


def test_scene_generation_is_bit_identical_for_a_seed():
    config = SceneConfig(seed=5)
    first = generate_synthetic_scene(config, np.random.default_rng(5))
    second = generate_synthetic_scene(config, np.random.default_rng(5))
    assert np.array_equal(first.image, second.image)
    assert first.is_night == second.is_night
    for a, b in zip(first.instances, second.instances):
        assert a.box == b.box and a.color == b.color and np.array_equal(a.mask, b.mask)


def test_instances_never_overlap(tiny_scene_config):
    for seed in range(50):
        scene = generate_synthetic_scene(tiny_scene_config, np.random.default_rng(seed))
        stacked = np.stack([instance.mask for instance in scene.instances]).sum(axis=0)
        assert stacked.max() == 1


def test_target_category_comes_first():
    config = SceneConfig(same_class_cluster_prob=1.0, instances_per_scene=(3, 5))
    scene = generate_synthetic_scene(config, np.random.default_rng(2), target_category="boat")
    assert scene.instances[0].category == "boat"
    assert len(scene.indices_of("boat")) >= 3


def test_night_scenes_are_darker():
    day = generate_synthetic_scene(SceneConfig(night_prob=0.0), np.random.default_rng(9))
    night = generate_synthetic_scene(SceneConfig(night_prob=1.0), np.random.default_rng(9))
    assert night.is_night and not day.is_night
    assert night.image.mean() < day.image.mean()
    assert [i.box for i in night.instances] == [i.box for i in day.instances]


def test_infeasible_placement_raises():
    config = SceneConfig(image_size=32, instances_per_scene=(40, 40), size_range=(8, 10), max_placement_retries=5)
    with pytest.raises(SceneGenerationError):
        generate_synthetic_scene(config, np.random.default_rng(0))


def test_lone_red_car_in_the_middle(bank, rng):
    scene = _scene(("car", "red", OrientedBox(cx=32, cy=32, w=10, h=5)))
    description = describe_target(scene, 0)
    assert description == ReferringDescription(category="car", color="red", region="middle_center")
    assert bank.render(description, 0) == "the red car in the middle of the image"
    assert generate_expression(scene, 0, bank, rng) in bank.renderings(description)


def test_clustered_targets_use_size_and_relation(bank):
    scene = _scene(
        ("car", "red", OrientedBox(cx=24, cy=32, w=6, h=3)),
        ("car", "red", OrientedBox(cx=32, cy=32, w=6, h=3)),
        ("car", "red", OrientedBox(cx=40, cy=32, w=10, h=4)),
        ("bus", "red", OrientedBox(cx=32, cy=10, w=12, h=4)),
    )

    left = describe_target(scene, 0)
    assert left.relation == "left" and left.size is None
    assert find_satisfiers(left, scene) == [0]

    largest = describe_target(scene, 2)
    assert largest.size == "large" and largest.relation is None
    assert find_satisfiers(largest, scene) == [2]

    # the middle car shares color, region, size class and relation with the largest one
    with pytest.raises(ExpressionGenerationError):
        describe_target(scene, 1)


def test_generated_expressions_resolve_uniquely(bank, vocab):
    config = SceneConfig(same_class_cluster_prob=0.5)
    resolved = 0
    for index in range(1000):
        rng = np.random.default_rng([21, index])
        scene = generate_synthetic_scene(config, rng)
        target = int(rng.integers(len(scene.instances)))
        try:
            description = describe_target(scene, target)
        except ExpressionGenerationError:
            continue
        assert find_satisfiers(description, scene) == [target]
        resolved += 1
    assert resolved > 500


def test_corpus_passes_coverage_with_balanced_categories(vocab, bank):
    pipeline = AnnotationPipeline(RasterSegmenterClient(), TemplateCaptionerClient(bank), vocab)
    corpus = pipeline.build_corpus(SceneConfig(seed=0), num_scenes=512)

    assert len(corpus.records) == 512
    report = validate_coverage({r.sample_id: coverage_ratio(r.mask) for r in corpus.records})
    assert report.passed

    counts = Counter(record.category for record in corpus.records)
    uniform = 512 / len(CATEGORY_NAMES)
    assert all(abs(counts[name] - uniform) <= 0.2 * uniform for name in CATEGORY_NAMES)


def test_failed_placements_are_redrawn_then_skipped(vocab, bank):
    pipeline = AnnotationPipeline(
        RasterSegmenterClient(), TemplateCaptionerClient(bank), vocab, max_scene_attempts=2
    )
    config = SceneConfig(image_size=32, instances_per_scene=(40, 40), size_range=(8, 10), max_placement_retries=2)
    with pytest.raises(GenerationError, match="No sample survived"):
        pipeline.build_corpus(config, num_scenes=3)


@pytest.mark.parametrize("size", [48, 80, 100])
def test_scene_size_must_be_a_multiple_of_32(size):
    with pytest.raises(ValidationError, match="multiple of 32"):
        SceneConfig(image_size=size, size_range=(4, 10))


def test_default_scene_sizes_pass_coverage_on_64px():
    config = SceneConfig()
    assert config.size_range == (6, 16)
    assert config.size_range[1] ** 2 < 0.1 * config.image_size ** 2
