# ladris/dataset/clients/imaging.py

import io
import math

import numpy as np
from PIL import Image, ImageDraw

from ...models import OrientedBox

MARKER_COLOR = (255, 0, 0)


def crop_instance(image: np.ndarray, box: OrientedBox, scale: int = 4, padding: int = 2) -> np.ndarray:
    """Cut out the axis-aligned hull of a box and upsample it for the captioner."""
    height, width = image.shape[:2]
    xs, ys = zip(*box.corners())
    left = max(int(math.floor(min(xs))) - padding, 0)
    top = max(int(math.floor(min(ys))) - padding, 0)
    right = min(int(math.ceil(max(xs))) + padding, width)
    bottom = min(int(math.ceil(max(ys))) + padding, height)
    if right <= left or bottom <= top:
        raise ValueError(f"Box {box} does not intersect the image")

    crop = Image.fromarray(image[top:bottom, left:right])
    crop = crop.resize((crop.width * scale, crop.height * scale), Image.NEAREST)
    return np.asarray(crop)


def mark_instance(image: np.ndarray, box: OrientedBox, width: int = 1) -> np.ndarray:
    """Copy of the full image with the box outlined in red as a location marker."""
    canvas = Image.fromarray(image).convert("RGB")
    draw = ImageDraw.Draw(canvas)
    draw.polygon(list(box.corners()), outline=MARKER_COLOR, width=width)
    return np.asarray(canvas)


def to_png_bytes(image: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(image).save(buffer, format="PNG")
    return buffer.getvalue()
