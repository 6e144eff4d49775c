# ladris/harness/ablation.py

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import logfire
from pydantic import BaseModel
from rich.table import Table

from ..dataset import AnnotationStore, ReferringDataset
from ..models import CategoryVocabulary, ModelConfig, RunConfig, Split
from ..network import Tokenizer, load_checkpoint
from .evaluator import ModelPredictor, evaluate
from .trainer import Trainer


@dataclass(frozen=True)
class Toggles:
    cdle: bool
    arfm: bool
    use_global: bool = False
    use_class: bool = False
    use_descriptive: bool = False

    @classmethod
    def module_grid(cls, cdle: bool, arfm: bool) -> "Toggles":
        return cls(cdle=cdle, arfm=arfm, use_global=arfm, use_class=arfm, use_descriptive=arfm)

    @classmethod
    def components(cls, l: bool, c: bool, d: bool) -> "Toggles":
        return cls(cdle=True, arfm=l or c or d, use_global=l, use_class=c, use_descriptive=d)

    @property
    def slug(self) -> str:
        flags = (self.cdle, self.arfm, self.use_global, self.use_class, self.use_descriptive)
        return "row-" + "".join("1" if flag else "0" for flag in flags)


MODULE_ROWS: Tuple[Tuple[str, Toggles], ...] = (
    ("baseline", Toggles.module_grid(cdle=False, arfm=False)),
    ("+ARFM", Toggles.module_grid(cdle=False, arfm=True)),
    ("+CDLE", Toggles.module_grid(cdle=True, arfm=False)),
    ("+CDLE +ARFM", Toggles.module_grid(cdle=True, arfm=True)),
)

COMPONENT_ROWS: Tuple[Tuple[str, Toggles], ...] = (
    ("none", Toggles.components(l=False, c=False, d=False)),
    ("l", Toggles.components(l=True, c=False, d=False)),
    ("l + d", Toggles.components(l=True, c=False, d=True)),
    ("l + c", Toggles.components(l=True, c=True, d=False)),
    ("l + c + d", Toggles.components(l=True, c=True, d=True)),
)


class AblationRow(BaseModel):
    label: str
    cdle: bool
    arfm: bool
    use_global: bool
    use_class: bool
    use_descriptive: bool
    val_oiou: float
    val_miou: float
    test_oiou: float
    test_miou: float
    first_batch_loss: float


class AblationResult(BaseModel):
    modules: List[AblationRow]
    components: List[AblationRow]


def _mark(flag: bool) -> str:
    return "x" if flag else "-"


class AblationRunner:
    """Trains and evaluates each toggle setting once; rows sharing a setting share the run."""

    def __init__(
            self,
            config: RunConfig,
            store: AnnotationStore,
            vocab: CategoryVocabulary,
            tokenizer: Tokenizer,
            output_dir: Union[str, Path]
    ):
        self.config = config
        self.store = store
        self.vocab = vocab
        self.tokenizer = tokenizer
        self.output_dir = Path(output_dir)
        self._cache: Dict[Toggles, Dict[str, float]] = {}

    def _run(self, toggles: Toggles) -> Dict[str, float]:
        if toggles in self._cache:
            return self._cache[toggles]

        model_config = ModelConfig(**{
            **self.config.model.model_dump(),
            "cdle": toggles.cdle,
            "arfm": toggles.arfm,
            "use_global": toggles.use_global,
            "use_class": toggles.use_class,
            "use_descriptive": toggles.use_descriptive,
        })
        row_config = self.config.model_copy(update={"model": model_config})
        row_dir = self.output_dir / toggles.slug

        with logfire.span(f"ablation {toggles.slug}"):
            trainer = Trainer(row_config, self.store, self.vocab, self.tokenizer, row_dir)
            training = trainer.train()
            model, _ = load_checkpoint(training.best_checkpoint)
            predictor = ModelPredictor(model)
            batch_size = self.config.data.batch_size
            val = evaluate(predictor, ReferringDataset(self.store, Split.VAL, self.vocab), batch_size).report
            test = evaluate(predictor, ReferringDataset(self.store, Split.TEST, self.vocab), batch_size).report

        values = {
            "val_oiou": val.oiou, "val_miou": val.miou,
            "test_oiou": test.oiou, "test_miou": test.miou,
            "first_batch_loss": training.first_batch_loss,
        }
        self._cache[toggles] = values
        return values

    def _rows(self, grid: Sequence[Tuple[str, Toggles]]) -> List[AblationRow]:
        rows = []
        for label, toggles in grid:
            rows.append(AblationRow(
                label=label,
                cdle=toggles.cdle,
                arfm=toggles.arfm,
                use_global=toggles.use_global,
                use_class=toggles.use_class,
                use_descriptive=toggles.use_descriptive,
                **self._run(toggles)
            ))
        return rows

    def run(self) -> AblationResult:
        result = AblationResult(modules=self._rows(MODULE_ROWS), components=self._rows(COMPONENT_ROWS))
        logfire.info("Ablation finished", runs=len(self._cache))
        return result


def _row_cells(row: AblationRow, components: bool) -> List[str]:
    flags = (row.use_global, row.use_class, row.use_descriptive) if components else (row.cdle, row.arfm)
    values = (row.val_oiou, row.val_miou, row.test_oiou, row.test_miou)
    return [_mark(flag) for flag in flags] + [f"{100 * v:.2f}" for v in values]


def _headers(components: bool) -> List[str]:
    flags = ["l", "c", "d"] if components else ["CDLE", "ARFM"]
    return flags + ["Val oIoU", "Val mIoU", "Test oIoU", "Test mIoU"]


def render_ablation_text(rows: Sequence[AblationRow], components: bool = False) -> str:
    header = _headers(components)
    body = [_row_cells(row, components) for row in rows]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in [header] + body]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_ablation_rich(rows: Sequence[AblationRow], title: str, components: bool = False) -> Table:
    table = Table(title=title)
    for column in _headers(components):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(*_row_cells(row, components))
    return table


def write_ablation(result: AblationResult, output_dir: Union[str, Path]) -> List[Path]:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        output_dir / "ablation.json",
        output_dir / "ablation_modules.txt",
        output_dir / "ablation_components.txt",
    ]
    paths[0].write_text(json.dumps(result.model_dump(), indent=2) + "\n")
    paths[1].write_text(render_ablation_text(result.modules))
    paths[2].write_text(render_ablation_text(result.components, components=True))
    return paths
