# ladris/dataset/expressions.py

import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import logfire
import numpy as np
import yaml
from jinja2 import Environment, StrictUndefined, Template
from pydantic import BaseModel, Field

from ..exceptions import ExpressionGenerationError, InvalidConfigError
from .synthetic import SyntheticScene

DEFAULT_TEMPLATES_PATH = Path(__file__).parent / "templates.yaml"

ROWS = ("top", "middle", "bottom")
COLUMNS = ("left", "center", "right")
SIZE_MARGIN = 1.25

# attribute sets tried in order until one resolves the target uniquely
ATTRIBUTE_COMBOS: Tuple[Tuple[str, ...], ...] = (
    ("color", "region"),
    ("color", "size", "region"),
    ("color", "region", "relation"),
    ("color", "size", "region", "relation"),
)


class ReferringDescription(BaseModel):
    """Structured content of a referring expression before it is rendered to text."""
    category: str
    color: str
    region: str = Field(..., description="Grid cell key such as 'middle_center'")
    size: Optional[str] = Field(default=None, description="'small' or 'large' among same-category instances")
    relation: Optional[str] = Field(
        default=None,
        description="Direction from the target to its nearest same-category neighbour"
    )

    model_config = {"frozen": True}


def region_of(scene: SyntheticScene, index: int) -> str:
    height, width = scene.size
    box = scene.instances[index].box
    row = min(max(int(box.cy * 3 / height), 0), 2)
    col = min(max(int(box.cx * 3 / width), 0), 2)
    return f"{ROWS[row]}_{COLUMNS[col]}"


def size_of(scene: SyntheticScene, index: int) -> Optional[str]:
    """'large' or 'small' when the instance is the clear extreme of its category."""
    instance = scene.instances[index]
    others = [scene.instances[j].area for j in scene.indices_of(instance.category) if j != index]
    if not others:
        return None
    if all(instance.area >= SIZE_MARGIN * area for area in others):
        return "large"
    if all(instance.area * SIZE_MARGIN <= area for area in others):
        return "small"
    return None


def relation_of(scene: SyntheticScene, index: int) -> Optional[str]:
    """Where the instance lies relative to its nearest same-category neighbour."""
    instance = scene.instances[index]
    neighbours = [j for j in scene.indices_of(instance.category) if j != index]
    if not neighbours:
        return None

    def distance(j: int) -> float:
        other = scene.instances[j].box
        return math.hypot(other.cx - instance.box.cx, other.cy - instance.box.cy)

    nearest = scene.instances[min(neighbours, key=lambda j: (distance(j), j))].box
    dx, dy = nearest.cx - instance.box.cx, nearest.cy - instance.box.cy
    if abs(dx) >= abs(dy):
        return "left" if dx > 0 else "right"
    return "above" if dy > 0 else "below"


def find_satisfiers(description: ReferringDescription, scene: SyntheticScene) -> List[int]:
    """Every scene instance the description could refer to."""
    matches = []
    for index, instance in enumerate(scene.instances):
        if instance.category != description.category or instance.color != description.color:
            continue
        if region_of(scene, index) != description.region:
            continue
        if description.size is not None and size_of(scene, index) != description.size:
            continue
        if description.relation is not None and relation_of(scene, index) != description.relation:
            continue
        matches.append(index)
    return matches


def describe_target(scene: SyntheticScene, target_index: int) -> ReferringDescription:
    """Smallest attribute set that singles out the target."""
    if not 0 <= target_index < len(scene.instances):
        raise IndexError(f"Target {target_index} not in a scene of {len(scene.instances)} instances")

    target = scene.instances[target_index]
    available = {
        "color": target.color,
        "region": region_of(scene, target_index),
        "size": size_of(scene, target_index),
        "relation": relation_of(scene, target_index),
    }
    for combo in ATTRIBUTE_COMBOS:
        if any(available[name] is None for name in combo):
            continue
        description = ReferringDescription(
            category=target.category, **{name: available[name] for name in combo}
        )
        if find_satisfiers(description, scene) == [target_index]:
            return description

    raise ExpressionGenerationError("no attribute combination resolves the target uniquely", target_index)


class TemplateBank:
    """Jinja2 expression templates plus the phrase tables they draw from."""

    def __init__(
            self,
            templates: Sequence[str],
            sizes: Dict[str, str],
            regions: Dict[str, str],
            relations: Dict[str, str]
    ):
        if not templates:
            raise InvalidConfigError("Template bank needs at least one template")
        missing = {f"{r}_{c}" for r in ROWS for c in COLUMNS} - set(regions)
        if missing:
            raise InvalidConfigError(f"Template bank lacks region phrases for {sorted(missing)}")

        env = Environment(undefined=StrictUndefined, autoescape=False)
        self.sources = list(templates)
        self.templates: List[Template] = [env.from_string(source) for source in self.sources]
        self.sizes = dict(sizes)
        self.regions = dict(regions)
        self.relations = dict(relations)

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "TemplateBank":
        path = Path(path) if path is not None else DEFAULT_TEMPLATES_PATH
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
            return cls(data["templates"], data["sizes"], data["regions"], data["relations"])
        except InvalidConfigError:
            raise
        except Exception as e:
            raise InvalidConfigError(f"Error loading template bank {path}: {str(e)}")

    def __len__(self) -> int:
        return len(self.templates)

    def render(self, description: ReferringDescription, variant: int = 0) -> str:
        text = self.templates[variant].render(
            noun=description.category,
            color=description.color,
            region=self.regions[description.region],
            size=self.sizes[description.size] if description.size else None,
            relation=self.relations[description.relation] if description.relation else None,
        )
        return " ".join(text.split())

    def renderings(self, description: ReferringDescription) -> List[str]:
        return [self.render(description, variant) for variant in range(len(self))]

    def vocabulary_texts(self) -> List[str]:
        """Every phrase the bank can emit, for building a tokenizer."""
        texts = [Template(source).render(noun="", color="", region="", size="", relation="")
                 for source in self.sources]
        return texts + list(self.sizes.values()) + list(self.regions.values()) + list(self.relations.values())


def generate_expression(
        scene: SyntheticScene,
        target_index: int,
        template_bank: TemplateBank,
        rng: np.random.Generator
) -> str:
    """Render a uniquely resolving referring expression for one scene instance.

    The category's canonical name is the head noun and appears exactly once.
    Raises ExpressionGenerationError when no attribute set singles out the target.
    """
    try:
        description = describe_target(scene, target_index)
    except ExpressionGenerationError as e:
        logfire.info("Expression generation exhausted", target_index=target_index, error=str(e))
        raise
    variant = int(rng.integers(len(template_bank)))
    return template_bank.render(description, variant)
