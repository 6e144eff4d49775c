# ladris/models/__init__.py

from .base import generate_sample_id
from .language import (
    CATEGORY_NAMES, MASK_TOKEN, UNKNOWN_CATEGORY_TOKEN,
    CategoryEntry, CategoryVocabulary, LinguisticTriple
)
from .samples import Split, ReferringSample, OrientedBox
from .config import (
    SceneConfig, ModelConfig, DataConfig, OptimConfig,
    CaptionerClientConfig, ClientsConfig, RunConfig
)
from .metrics import PRECISION_THRESHOLDS, MetricsReport, CoverageReport

__all__ = [
    'generate_sample_id',
    'CATEGORY_NAMES', 'MASK_TOKEN', 'UNKNOWN_CATEGORY_TOKEN',
    'CategoryEntry', 'CategoryVocabulary', 'LinguisticTriple',
    'Split', 'ReferringSample', 'OrientedBox',
    'SceneConfig', 'ModelConfig', 'DataConfig', 'OptimConfig',
    'CaptionerClientConfig', 'ClientsConfig', 'RunConfig',
    'PRECISION_THRESHOLDS', 'MetricsReport', 'CoverageReport',
]
