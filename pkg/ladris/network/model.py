# ladris/network/model.py

from dataclasses import dataclass
from typing import Optional, Sequence

import torch
import torch.nn as nn

from ..language import decompose
from ..models import CategoryVocabulary, LinguisticTriple, ModelConfig
from .arfm import AdaptiveReasoningFusion
from .cdle import CategoryLinguisticEnhancer
from .decoder import MaskDecoder
from .encoders import ConvPyramidEncoder, PyramidEncoder, TextEncoder
from .tokenizer import Tokenizer
from .types import LinguisticEmbedding, MultiScaleFeatures, TextBatch

TEXT_VIEWS = ("global", "class", "descriptive")


@dataclass(frozen=True)
class SegmenterOutput:
    logits: torch.Tensor
    pyramid: MultiScaleFeatures
    srg_weights: Optional[torch.Tensor] = None


class ReferringSegmenter(nn.Module):
    """Visual pyramid with optional category enhancement and reasoning fusion, decoded to a mask.

    Every module is built regardless of the toggles, so runs that differ
    only in toggles start from identical parameters for a given seed.
    """

    def __init__(
            self,
            config: ModelConfig,
            tokenizer: Tokenizer,
            visual_encoder: Optional[PyramidEncoder] = None
    ):
        super().__init__()
        self.config = config
        self.tokenizer = tokenizer
        channels = tuple(config.channels)

        self.visual_encoder = visual_encoder or ConvPyramidEncoder(channels)
        if tuple(self.visual_encoder.stage_channels) != channels:
            raise ValueError(
                f"Visual encoder widths {self.visual_encoder.stage_channels} differ from config {channels}"
            )

        views = ("shared",) if config.share_text_encoder else TEXT_VIEWS
        self.text_encoders = nn.ModuleDict({
            view: TextEncoder(tokenizer, config.text_dim, config.max_tokens, config.heads) for view in views
        })
        self.enhancer = CategoryLinguisticEnhancer(channels, config.text_dim)
        self.fusion = AdaptiveReasoningFusion(channels, config.text_dim, config.heads)
        self.decoder = MaskDecoder(channels, fused_channels=channels[-1], detail_channels=config.detail_channels)

    def text_encoder(self, view: str) -> TextEncoder:
        return self.text_encoders["shared" if self.config.share_text_encoder else view]

    def tokenize(self, triples: Sequence[LinguisticTriple]) -> TextBatch:
        max_tokens = self.config.max_tokens
        global_ids, global_mask = self.tokenizer.encode_batch([t.global_text for t in triples], max_tokens)
        class_ids, class_mask = self.tokenizer.encode_batch([t.class_text for t in triples], max_tokens)
        desc_ids, desc_mask = self.tokenizer.encode_batch([t.descriptive_text for t in triples], max_tokens)
        return TextBatch(
            global_ids=global_ids, global_mask=global_mask,
            class_ids=class_ids, class_mask=class_mask,
            descriptive_ids=desc_ids, descriptive_mask=desc_mask
        )

    def tokenize_expressions(self, expressions: Sequence[str], vocab: CategoryVocabulary) -> TextBatch:
        return self.tokenize([decompose(expression, vocab) for expression in expressions])

    def embed(self, texts: TextBatch):
        l = self.text_encoder("global")(texts.global_ids, texts.global_mask)
        c = self.text_encoder("class")(texts.class_ids, texts.class_mask)
        d = self.text_encoder("descriptive")(texts.descriptive_ids, texts.descriptive_mask)
        return l, c, d

    def forward(self, images: torch.Tensor, texts: TextBatch) -> SegmenterOutput:
        l, c, d = self.embed(texts)
        return self.forward_embedded(images, l, c, d)

    def forward_embedded(
            self,
            images: torch.Tensor,
            l: LinguisticEmbedding,
            c: LinguisticEmbedding,
            d: LinguisticEmbedding
    ) -> SegmenterOutput:
        pyramid = self.visual_encoder.encode_image(
            images,
            self.enhancer if self.config.cdle else None,
            class_embedding=c,
            global_embedding=l
        )

        if self.config.arfm:
            fused = self.fusion(pyramid, l, d, c, self.config.branch_mask)
            logits = self.decoder(fused.fused, fused.scales, images)
            return SegmenterOutput(logits=logits, pyramid=pyramid, srg_weights=fused.srg_weights)

        logits = self.decoder(pyramid[-1], pyramid, images)
        return SegmenterOutput(logits=logits, pyramid=pyramid)
