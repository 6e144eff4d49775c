# ladris/dataset/pipeline.py

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import logfire
import numpy as np

from ..exceptions import (
    ClientError, ExpressionGenerationError, GenerationError, MalformedResponseError, SceneGenerationError
)
from ..language import decompose
from ..models import CategoryVocabulary, SceneConfig, generate_sample_id
from .clients import (
    BaseCaptionerClient, BaseSegmenterClient, CaptionRequest, crop_instance, mark_instance
)
from .synthetic import SceneGenerator, SyntheticScene


@dataclass(frozen=True)
class AnnotatedInstance:
    """One image-text-mask triplet before it gets a split."""
    sample_id: str
    image: np.ndarray
    mask: np.ndarray
    expression: str
    category: str
    is_night: bool = False


@dataclass
class CorpusResult:
    records: List[AnnotatedInstance] = field(default_factory=list)
    skipped: List[Tuple[int, str]] = field(default_factory=list)


class AnnotationPipeline:
    """Box prompt to mask, dual-input caption to expression, with output checks in between."""

    def __init__(
            self,
            segmenter: BaseSegmenterClient,
            captioner: BaseCaptionerClient,
            vocab: CategoryVocabulary,
            max_scene_attempts: int = 20
    ):
        self.segmenter = segmenter
        self.captioner = captioner
        self.vocab = vocab
        self.max_scene_attempts = max_scene_attempts

    def _check_mask(self, mask, image: np.ndarray) -> np.ndarray:
        mask = np.asarray(mask)
        if mask.shape != image.shape[:2]:
            raise MalformedResponseError(f"Segmenter mask {mask.shape} does not match image {image.shape[:2]}")
        if not np.isin(mask, (0, 1)).all():
            raise MalformedResponseError("Segmenter mask is not binary")
        mask = mask.astype(bool)
        if not mask.any():
            raise MalformedResponseError("Segmenter returned an empty mask")
        return mask

    def _check_expression(self, expression, category: str) -> str:
        if not isinstance(expression, str) or not expression.strip():
            raise MalformedResponseError("Captioner returned no expression text")
        triple = decompose(expression, self.vocab)
        if triple.category_id is None or self.vocab.name_of(triple.category_id) != category:
            raise MalformedResponseError(
                f"Expression {expression!r} does not name the target category {category}"
            )
        return expression

    def annotate(
            self,
            scene: SyntheticScene,
            target_index: int,
            sample_id: str,
            seed: int = 0
    ) -> Optional[AnnotatedInstance]:
        """Annotate one target; client failures are logged and yield None."""
        target = scene.instances[target_index]
        try:
            mask = self._check_mask(self.segmenter.segment(scene.image, target.box), scene.image)
            request = CaptionRequest(
                crop_image=crop_instance(scene.image, target.box),
                marked_image=mark_instance(scene.image, target.box),
                scene=scene,
                target_index=target_index,
                seed=seed
            )
            expression = self._check_expression(self.captioner.describe(request), target.category)
        except ClientError as e:
            logfire.warn("Annotation skipped",
                         sample_id=sample_id,
                         error_type=type(e).__name__,
                         error=str(e))
            return None

        return AnnotatedInstance(
            sample_id=sample_id,
            image=scene.image,
            mask=mask,
            expression=expression,
            category=target.category,
            is_night=scene.is_night
        )

    def build_corpus(self, config: SceneConfig, num_scenes: int, seed: Optional[int] = None) -> CorpusResult:
        """Generate and annotate num_scenes scenes, one target each, seeded by config.seed unless overridden.

        Target categories cycle through a seeded permutation of the configured
        categories. A scene whose target cannot be described uniquely is redrawn.
        """
        seed = config.seed if seed is None else seed
        generator = SceneGenerator(config)
        order = np.random.default_rng(seed).permutation(len(config.categories))
        categories = [config.categories[int(i)] for i in order]
        result = CorpusResult()

        with logfire.span("build_corpus") as span:
            span.set_attributes({"num_scenes": num_scenes, "seed": seed})
            for index in range(num_scenes):
                category = categories[index % len(categories)]
                sample_id = generate_sample_id(seed, index)
                record, reason = None, None
                for attempt in range(self.max_scene_attempts):
                    rng = np.random.default_rng([seed, index, attempt])
                    try:
                        scene = generator.generate(rng, target_category=category)
                        target_index = int(rng.choice(scene.indices_of(category)))
                        record = self.annotate(scene, target_index, sample_id, seed=int(rng.integers(2 ** 31)))
                    except (SceneGenerationError, ExpressionGenerationError) as e:
                        reason = str(e)
                        continue
                    reason = None if record is not None else "client error"
                    break

                if record is None:
                    reason = reason or f"no resolvable target after {self.max_scene_attempts} scenes"
                    result.skipped.append((index, reason))
                else:
                    result.records.append(record)

            logfire.info("Corpus built", records=len(result.records), skipped=len(result.skipped))
        if not result.records:
            raise GenerationError(f"No sample survived annotation out of {num_scenes} scenes")
        return result
