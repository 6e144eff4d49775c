"""Base classes for annotation model clients."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ...models import OrientedBox
from ..synthetic import SyntheticScene


@dataclass(frozen=True)
class CaptionRequest:
    """Dual input for a captioner: the cropped instance and the full image with a red marker.

    Local captioners also receive the scene and the target index; remote ones only see pixels.
    """
    crop_image: np.ndarray
    marked_image: np.ndarray
    scene: Optional[SyntheticScene] = None
    target_index: Optional[int] = None
    seed: int = 0


class BaseSegmenterClient(ABC):
    """Turns a box prompt into an instance mask."""

    @abstractmethod
    def segment(self, image: np.ndarray, box: OrientedBox) -> np.ndarray:
        """Return a boolean (H, W) mask for the instance inside the box.

        Raises:
            ClientTimeoutError, ClientTransportError, MalformedResponseError
        """
        pass


class BaseCaptionerClient(ABC):
    """Writes a referring expression for one marked instance."""

    @abstractmethod
    def describe(self, request: CaptionRequest) -> str:
        """Return the expression text.

        Raises:
            ClientTimeoutError, ClientTransportError, MalformedResponseError
        """
        pass
