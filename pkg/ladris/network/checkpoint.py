# ladris/network/checkpoint.py

from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import logfire
import torch

from ..exceptions import CheckpointFormatError
from ..models import ModelConfig
from .model import ReferringSegmenter
from .tokenizer import Tokenizer

FORMAT_VERSION = 1


def save_checkpoint(
        path: Union[str, Path],
        model: ReferringSegmenter,
        metadata: Optional[Dict[str, Any]] = None
) -> Path:
    """Write named parameter arrays plus everything needed to rebuild the model."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    state = {name: tensor.detach().cpu() for name, tensor in model.state_dict().items()}
    payload = {
        "format_version": FORMAT_VERSION,
        "model_config": model.config.model_dump(mode="json"),
        "tokens": list(model.tokenizer.tokens),
        "parameter_shapes": {name: list(tensor.shape) for name, tensor in state.items()},
        "parameters": state,
        "metadata": metadata or {},
    }
    torch.save(payload, path)
    logfire.info("Checkpoint saved", path=str(path), parameters=len(state))
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[ReferringSegmenter, Dict[str, Any]]:
    """Rebuild a model from a checkpoint, refusing any other format version."""
    path = Path(path)
    if not path.exists():
        raise CheckpointFormatError(f"Checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CheckpointFormatError(f"Unreadable checkpoint {path}: {str(e)}")

    version = payload.get("format_version") if isinstance(payload, dict) else None
    if version != FORMAT_VERSION:
        raise CheckpointFormatError(f"Checkpoint format {version} is not supported (expected {FORMAT_VERSION})")

    config = ModelConfig(**payload["model_config"])
    model = ReferringSegmenter(config, Tokenizer(payload["tokens"]))

    parameters = payload["parameters"]
    for name, shape in payload["parameter_shapes"].items():
        if name not in parameters or list(parameters[name].shape) != shape:
            raise CheckpointFormatError(f"Parameter {name} is missing or has the wrong shape")
    try:
        model.load_state_dict(parameters, strict=True)
    except RuntimeError as e:
        raise CheckpointFormatError(f"Checkpoint does not fit the model: {str(e)}")

    model.eval()
    logfire.info("Checkpoint loaded", path=str(path), config=payload["model_config"])
    return model, payload.get("metadata", {})
