# ladris/network/__init__.py

from .types import LinguisticEmbedding, MultiScaleFeatures, AlignedPyramid, FusedFeature, TextBatch
from .tokenizer import Tokenizer, split_words, SPECIAL_TOKENS
from .encoders import TextEncoder, PyramidEncoder, ConvPyramidEncoder
from .cdle import CategoryLinguisticEnhancer, CategoryEnhancementStage
from .arfm import AdaptiveReasoningFusion
from .decoder import MaskDecoder
from .loss import segmentation_loss, binarize
from .model import ReferringSegmenter, SegmenterOutput
from .checkpoint import FORMAT_VERSION, save_checkpoint, load_checkpoint

__all__ = [
    'LinguisticEmbedding', 'MultiScaleFeatures', 'AlignedPyramid', 'FusedFeature', 'TextBatch',
    'Tokenizer', 'split_words', 'SPECIAL_TOKENS',
    'TextEncoder', 'PyramidEncoder', 'ConvPyramidEncoder',
    'CategoryLinguisticEnhancer', 'CategoryEnhancementStage',
    'AdaptiveReasoningFusion', 'MaskDecoder',
    'segmentation_loss', 'binarize',
    'ReferringSegmenter', 'SegmenterOutput',
    'FORMAT_VERSION', 'save_checkpoint', 'load_checkpoint',
]
