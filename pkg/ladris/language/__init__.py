# ladris/language/__init__.py

from .vocabulary import DEFAULT_VOCABULARY_PATH, load_vocabulary, parse_vocabulary
from .decomposition import detect_category, mask_category, decompose

__all__ = [
    'DEFAULT_VOCABULARY_PATH', 'load_vocabulary', 'parse_vocabulary',
    'detect_category', 'mask_category', 'decompose',
]
