# ladris/harness/config.py

import os
from pathlib import Path
from typing import Optional, Union

import logfire
import yaml
from pydantic import ValidationError

from ..exceptions import InvalidConfigError
from ..models import RunConfig

RESOLVED_CONFIG_FILE = "resolved_config.yaml"


def load_run_config(
        path: Union[str, Path],
        seed: Optional[int] = None,
        output_dir: Optional[str] = None
) -> RunConfig:
    """Read a YAML run config, expand ${VARS} and apply CLI overrides.

    Raises:
        InvalidConfigError: missing file, YAML syntax error or failed validation
    """
    path = Path(path)
    try:
        with open(path, "r") as f:
            content = os.path.expandvars(f.read())
        data = yaml.safe_load(content) or {}
    except FileNotFoundError:
        raise InvalidConfigError(f"Config file not found: {path}")
    except yaml.YAMLError as e:
        raise InvalidConfigError(f"Config file {path} is not valid YAML: {str(e)}")

    if not isinstance(data, dict):
        raise InvalidConfigError(f"Config file {path} must hold a mapping at the top level")
    if seed is not None:
        data["seed"] = seed
    if output_dir is not None:
        data["output_dir"] = output_dir

    try:
        config = RunConfig(**data)
    except ValidationError as e:
        raise InvalidConfigError(f"Invalid configuration in {path}: {str(e)}")

    logfire.info(f"Loaded configuration from {path}", seed=config.seed, output_dir=config.output_dir)
    return config


def archive_config(config: RunConfig, directory: Union[str, Path]) -> Path:
    """Write the resolved config next to a run's outputs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / RESOLVED_CONFIG_FILE
    path.write_text(yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False))
    return path
