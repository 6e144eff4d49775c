# ladris/dataset/tiling.py

from pathlib import Path
from typing import List, Tuple, Union

import logfire
import numpy as np
from PIL import Image

from ..exceptions import InvalidInputError

TILE_SIZE = 1080


def tile_origins(length: int, tile_size: int) -> List[int]:
    """Grid-anchored origins; the last one shifts back so the final tile ends at the border."""
    origins = list(range(0, length - tile_size + 1, tile_size))
    if origins[-1] + tile_size < length:
        origins.append(length - tile_size)
    return origins


def tile_image(image: np.ndarray, tile_size: int = TILE_SIZE) -> List[Tuple[np.ndarray, Tuple[int, int]]]:
    """Cut an (H, W, ...) image into full-size tiles covering it entirely.

    Returns:
        (tile, (y, x)) pairs in row-major order
    """
    height, width = image.shape[:2]
    if height < tile_size or width < tile_size:
        raise InvalidInputError(f"Image {height}x{width} is smaller than the {tile_size}px tile")

    return [
        (image[y:y + tile_size, x:x + tile_size], (y, x))
        for y in tile_origins(height, tile_size)
        for x in tile_origins(width, tile_size)
    ]


def tile_image_file(
        path: Union[str, Path],
        out_dir: Union[str, Path],
        tile_size: int = TILE_SIZE
) -> List[Path]:
    """Tile an image on disk, naming each PNG tile after its offset."""
    path, out_dir = Path(path), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with Image.open(path) as img:
        image = np.asarray(img.convert("RGB"))

    written = []
    for tile, (y, x) in tile_image(image, tile_size):
        tile_path = out_dir / f"{path.stem}_y{y}_x{x}.png"
        Image.fromarray(tile).save(tile_path)
        written.append(tile_path)

    logfire.info("Image tiled", source=str(path), tiles=len(written), tile_size=tile_size)
    return written
