# ladris/dataset/clients/__init__.py

from .base import BaseCaptionerClient, BaseSegmenterClient, CaptionRequest
from .imaging import crop_instance, mark_instance, to_png_bytes
from .local import RasterSegmenterClient, TemplateCaptionerClient
from .openai import OpenAICaptionerClient

__all__ = [
    'BaseCaptionerClient', 'BaseSegmenterClient', 'CaptionRequest',
    'crop_instance', 'mark_instance', 'to_png_bytes',
    'RasterSegmenterClient', 'TemplateCaptionerClient',
    'OpenAICaptionerClient',
]
