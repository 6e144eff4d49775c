# ladris/models/config.py

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from .language import CATEGORY_NAMES


class SceneConfig(BaseModel):
    """Parameters of the synthetic drone-scene generator."""
    image_size: int = Field(64, ge=32, description="Square scene side in pixels")
    categories: List[str] = Field(default_factory=lambda: list(CATEGORY_NAMES))
    instances_per_scene: Tuple[int, int] = Field((2, 5), description="Inclusive instance-count range")
    size_range: Tuple[int, int] = Field((6, 16), description="Inclusive range of the box's longer side")
    same_class_cluster_prob: float = Field(0.35, ge=0, le=1)
    night_prob: float = Field(0.15, ge=0, le=1)
    max_placement_retries: int = Field(60, ge=1)
    seed: int = 0

    @field_validator("image_size")
    @classmethod
    def validate_image_size(cls, v: int) -> int:
        if v % 32:
            raise ValueError(f"image_size {v} must be a multiple of 32, the coarsest pyramid stride")
        return v

    @field_validator("categories")
    @classmethod
    def validate_categories(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("At least one category is required")
        unknown = [name for name in v if name not in CATEGORY_NAMES]
        if unknown:
            raise ValueError(f"Unknown categories: {unknown}")
        return v

    @model_validator(mode="after")
    def validate_ranges(self) -> "SceneConfig":
        low, high = self.instances_per_scene
        if not 1 <= low <= high:
            raise ValueError(f"Invalid instances_per_scene range: {self.instances_per_scene}")
        small, large = self.size_range
        if not 2 <= small <= large:
            raise ValueError(f"Invalid size_range: {self.size_range}")
        # the largest box must stay under the 0.1 coverage limit
        if large * large >= 0.1 * self.image_size ** 2:
            raise ValueError(
                f"size_range upper bound {large} cannot satisfy coverage < 0.1 on {self.image_size}px scenes"
            )
        return self


class ModelConfig(BaseModel):
    """Network dimensions and module toggles."""
    channels: Tuple[int, int, int, int] = (32, 64, 128, 256)
    text_dim: int = Field(64, ge=1, description="Shared linguistic embedding size D_b")
    heads: int = Field(4, ge=1)
    max_tokens: int = Field(24, ge=1)
    detail_channels: int = Field(16, ge=0, description="Decoder detail-path width, 0 disables it")
    share_text_encoder: bool = Field(True, description="Encode l, c and d with one encoder")
    cdle: bool = True
    arfm: bool = True
    use_global: bool = Field(True, description="ARFB branch for l")
    use_class: bool = Field(True, description="ARFB branch for c")
    use_descriptive: bool = Field(True, description="ARFB branch for d")

    @field_validator("channels")
    @classmethod
    def validate_channels(cls, v: Tuple[int, int, int, int]) -> Tuple[int, int, int, int]:
        if any(c <= 0 for c in v):
            raise ValueError("Channel counts must be positive")
        return v

    @model_validator(mode="after")
    def validate_toggles(self) -> "ModelConfig":
        branches = (self.use_global, self.use_class, self.use_descriptive)
        if not self.arfm and any(branches):
            raise ValueError("ARFB branch toggles require arfm to be enabled")
        if self.arfm and not any(branches):
            raise ValueError("arfm needs at least one enabled linguistic branch")
        if self.channels[-1] % self.heads:
            raise ValueError(f"heads={self.heads} must divide the fusion width {self.channels[-1]}")
        return self

    @property
    def branch_mask(self) -> Tuple[bool, bool, bool]:
        """Enabled ARFB branches in (l, d, c) order."""
        return (self.use_global, self.use_descriptive, self.use_class)


class DataConfig(BaseModel):
    """Where training data comes from and how it is batched."""
    dataset_dir: str = "runs/data"
    num_scenes: int = Field(512, ge=1)
    batch_size: int = Field(8, ge=1)
    scene: SceneConfig = Field(default_factory=SceneConfig)
    max_coverage_ratio: float = Field(0.1, ge=0, le=1)
    min_coverage_fraction: float = Field(0.9, ge=0, le=1)


class OptimConfig(BaseModel):
    """AdamW with polynomial learning-rate decay."""
    epochs: int = Field(20, ge=1)
    base_lr: float = Field(1e-3, gt=0)
    weight_decay: float = Field(0.01, ge=0)
    poly_power: float = Field(0.9, gt=0)


class CaptionerClientConfig(BaseModel):
    """Captioner selection; remote credentials come from the environment."""
    provider: Literal["template", "openai"] = "template"
    model: str = "qwen2.5-vl-7b-instruct"
    base_url: Optional[str] = None
    timeout_seconds: float = Field(30.0, gt=0)


class ClientsConfig(BaseModel):
    captioner: CaptionerClientConfig = Field(default_factory=CaptionerClientConfig)


class RunConfig(BaseModel):
    """Complete configuration of one harness run."""
    model: ModelConfig = Field(default_factory=ModelConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    optim: OptimConfig = Field(default_factory=OptimConfig)
    clients: ClientsConfig = Field(default_factory=ClientsConfig)
    seed: int = Field(0, ge=0)
    output_dir: str = "runs/default"

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "model": {"channels": [32, 64, 128, 256], "text_dim": 64, "heads": 4},
                    "data": {"dataset_dir": "runs/data", "num_scenes": 512, "batch_size": 8},
                    "optim": {"epochs": 20, "base_lr": 0.001, "weight_decay": 0.01, "poly_power": 0.9},
                    "seed": 0,
                    "output_dir": "runs/default"
                }
            ]
        }
    }
