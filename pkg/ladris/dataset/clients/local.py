# ladris/dataset/clients/local.py

import numpy as np

from ...exceptions import InvalidInputError
from ...models import OrientedBox
from ..expressions import TemplateBank, generate_expression
from ..geometry import rasterize_obb
from .base import BaseCaptionerClient, BaseSegmenterClient, CaptionRequest


class RasterSegmenterClient(BaseSegmenterClient):
    """Segmenter stand-in: the box prompt rasterized as the mask."""

    def segment(self, image: np.ndarray, box: OrientedBox) -> np.ndarray:
        height, width = image.shape[:2]
        return rasterize_obb(box, height, width)


class TemplateCaptionerClient(BaseCaptionerClient):
    """Captioner stand-in that reads the scene layout instead of the pixels."""

    def __init__(self, template_bank: TemplateBank):
        self.template_bank = template_bank

    def describe(self, request: CaptionRequest) -> str:
        if request.scene is None or request.target_index is None:
            raise InvalidInputError("Template captioner needs the scene and the target index")
        rng = np.random.default_rng(request.seed)
        return generate_expression(request.scene, request.target_index, self.template_bank, rng)
