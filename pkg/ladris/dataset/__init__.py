# ladris/dataset/__init__.py

from .geometry import rasterize_obb, coverage_ratio, validate_coverage
from .tiling import TILE_SIZE, tile_image, tile_image_file
from .splits import split_sizes, split_dataset
from .synthetic import COLOR_RGB, SceneInstance, SyntheticScene, SceneGenerator, generate_synthetic_scene
from .expressions import (
    ReferringDescription, TemplateBank, describe_target, find_satisfiers, generate_expression
)
from .pipeline import AnnotatedInstance, AnnotationPipeline, CorpusResult
from .store import ANNOTATIONS_FILE, AnnotationStore
from .loader import ReferringBatch, ReferringDataset, collate_items, make_loader
from .statistics import CorpusStatistics, summarize_corpus

__all__ = [
    'rasterize_obb', 'coverage_ratio', 'validate_coverage',
    'TILE_SIZE', 'tile_image', 'tile_image_file',
    'split_sizes', 'split_dataset',
    'COLOR_RGB', 'SceneInstance', 'SyntheticScene', 'SceneGenerator', 'generate_synthetic_scene',
    'ReferringDescription', 'TemplateBank', 'describe_target', 'find_satisfiers', 'generate_expression',
    'AnnotatedInstance', 'AnnotationPipeline', 'CorpusResult',
    'ANNOTATIONS_FILE', 'AnnotationStore',
    'ReferringBatch', 'ReferringDataset', 'collate_items', 'make_loader',
    'CorpusStatistics', 'summarize_corpus',
]
