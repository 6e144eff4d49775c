from types import SimpleNamespace

import httpx
import numpy as np
import openai
import pytest

from ladris.dataset import AnnotationPipeline, generate_synthetic_scene, rasterize_obb
from ladris.dataset.clients import (
    BaseCaptionerClient, BaseSegmenterClient, CaptionRequest, OpenAICaptionerClient,
    RasterSegmenterClient, TemplateCaptionerClient, crop_instance, mark_instance
)
from ladris.exceptions import (
    ClientTimeoutError, ClientTransportError, GenerationError, InvalidInputError, MalformedResponseError
)
from ladris.language import decompose
from ladris.models import OrientedBox, SceneConfig


class MalformedCaptioner(BaseCaptionerClient):
    def describe(self, request: CaptionRequest) -> str:
        raise MalformedResponseError("payload without text")


class WrongCategoryCaptioner(BaseCaptionerClient):
    def describe(self, request: CaptionRequest) -> str:
        return "the boat in the middle of the image"


class FlakyCaptioner(BaseCaptionerClient):
    """Times out on the first call only."""

    def __init__(self, inner: BaseCaptionerClient):
        self.inner = inner
        self.calls = 0

    def describe(self, request: CaptionRequest) -> str:
        self.calls += 1
        if self.calls == 1:
            raise ClientTimeoutError("no answer")
        return self.inner.describe(request)


class HalfMaskSegmenter(BaseSegmenterClient):
    def segment(self, image, box):
        return np.zeros((image.shape[0] // 2, image.shape[1]), dtype=bool)


def _fake_openai(create):
    return SimpleNamespace(chat=SimpleNamespace(completions=SimpleNamespace(create=create)))


def _request() -> CaptionRequest:
    image = np.zeros((32, 32, 3), dtype=np.uint8)
    return CaptionRequest(crop_image=image[:8, :8], marked_image=image)


@pytest.fixture
def scene(tiny_scene_config):
    return generate_synthetic_scene(tiny_scene_config.model_copy(update={"instances_per_scene": (1, 1)}),
                                    np.random.default_rng(0), target_category="truck")


def test_default_segmenter_is_rasterization(scene):
    box = scene.instances[0].box
    assert np.array_equal(RasterSegmenterClient().segment(scene.image, box), rasterize_obb(box, 32, 32))


def test_default_captioner_names_the_target_category(scene, bank, vocab):
    request = CaptionRequest(
        crop_image=crop_instance(scene.image, scene.instances[0].box),
        marked_image=mark_instance(scene.image, scene.instances[0].box),
        scene=scene,
        target_index=0,
    )
    text = TemplateCaptionerClient(bank).describe(request)
    assert decompose(text, vocab).class_text == "truck"


def test_template_captioner_needs_the_scene(bank):
    with pytest.raises(InvalidInputError):
        TemplateCaptionerClient(bank).describe(_request())


def test_dual_inputs():
    image = np.full((32, 32, 3), 100, dtype=np.uint8)
    box = OrientedBox(cx=16, cy=16, w=8, h=4)
    marked = mark_instance(image, box)
    assert (marked == [255, 0, 0]).all(axis=-1).any()
    assert np.array_equal(image, np.full((32, 32, 3), 100, dtype=np.uint8))

    crop = crop_instance(image, box, scale=4, padding=2)
    # hull 12..20 x 14..18 plus two pixels of padding, upsampled 4x
    assert crop.shape == (8 * 4, 12 * 4, 3)


@pytest.mark.parametrize("captioner, segmenter", [
    (MalformedCaptioner(), RasterSegmenterClient()),
    (WrongCategoryCaptioner(), RasterSegmenterClient()),
    (None, HalfMaskSegmenter()),
])
def test_pipeline_skips_faulty_client_output(scene, vocab, bank, captioner, segmenter):
    pipeline = AnnotationPipeline(segmenter, captioner or TemplateCaptionerClient(bank), vocab)
    assert pipeline.annotate(scene, 0, "s00000-test") is None


def test_pipeline_keeps_good_annotations(scene, vocab, bank):
    pipeline = AnnotationPipeline(RasterSegmenterClient(), TemplateCaptionerClient(bank), vocab)
    record = pipeline.annotate(scene, 0, "s00000-test")
    assert record.category == "truck"
    assert np.array_equal(record.mask, scene.instances[0].mask)


def test_corpus_skips_failed_samples(tiny_scene_config, vocab, bank):
    captioner = FlakyCaptioner(TemplateCaptionerClient(bank))
    pipeline = AnnotationPipeline(RasterSegmenterClient(), captioner, vocab)
    corpus = pipeline.build_corpus(tiny_scene_config, num_scenes=4)
    assert len(corpus.records) == 3
    assert corpus.skipped == [(0, "client error")]


def test_corpus_with_no_survivors_fails(tiny_scene_config, vocab):
    pipeline = AnnotationPipeline(RasterSegmenterClient(), MalformedCaptioner(), vocab)
    with pytest.raises(GenerationError):
        pipeline.build_corpus(tiny_scene_config, num_scenes=2)


def test_openai_captioner_maps_errors():
    request = httpx.Request("POST", "http://localhost/v1/chat/completions")

    def timeout(**kwargs):
        raise openai.APITimeoutError(request=request)

    def offline(**kwargs):
        raise openai.APIConnectionError(request=request)

    def empty(**kwargs):
        return SimpleNamespace(choices=[SimpleNamespace(message=SimpleNamespace(content="  "))])

    def no_choices(**kwargs):
        return SimpleNamespace(choices=[])

    for create, error in ((timeout, ClientTimeoutError), (offline, ClientTransportError),
                          (empty, MalformedResponseError), (no_choices, MalformedResponseError)):
        client = OpenAICaptionerClient(None, "test-model", client=_fake_openai(create))
        with pytest.raises(error):
            client.describe(_request())


def test_openai_captioner_sends_both_images():
    seen = {}

    def create(**kwargs):
        seen.update(kwargs)
        return SimpleNamespace(choices=[SimpleNamespace(message=SimpleNamespace(content='"the red car on the left"'))])

    client = OpenAICaptionerClient(None, "test-model", timeout_seconds=5, client=_fake_openai(create))
    assert client.describe(_request()) == "the red car on the left"
    images = seen["messages"][1]["content"]
    assert len(images) == 2
    assert all(part["image_url"]["url"].startswith("data:image/png;base64,") for part in images)
    assert seen["timeout"] == 5
