# ladris/harness/commands.py

import json
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import logfire
from rich.console import Console

from ..container import Container, build_container
from ..dataset import (
    AnnotationStore, ReferringDataset, coverage_ratio, split_dataset, summarize_corpus, validate_coverage
)
from ..exceptions import InvalidInputError
from ..metrics import render_rich_table, render_text_table, write_report_json
from ..models import CoverageReport, MetricsReport, RunConfig, Split
from ..network import load_checkpoint
from .ablation import AblationResult, AblationRunner, render_ablation_rich, write_ablation
from .config import archive_config
from .evaluator import ModelPredictor, Predictor, evaluate, write_breakdown_json
from .trainer import Trainer, TrainingResult, build_tokenizer

EVAL_SPLITS = {"train": (Split.TRAIN,), "val": (Split.VAL,), "test": (Split.TEST,), "all": (Split.VAL, Split.TEST)}


def _open_store(config: RunConfig) -> AnnotationStore:
    store = AnnotationStore(config.data.dataset_dir)
    if not store.exists:
        raise InvalidInputError(f"No dataset at {config.data.dataset_dir}; run gen-data first")
    return store


def cmd_gen_data(config: RunConfig, container: Optional[Container] = None) -> CoverageReport:
    """Generate, annotate, split and store the synthetic corpus, then check its coverage."""
    container = container or build_container(config)
    dataset_dir = Path(config.data.dataset_dir)
    scene_config = config.data.scene.model_copy(update={"seed": config.seed})

    with logfire.span("gen_data") as span:
        span.set_attributes({"dataset_dir": str(dataset_dir), "num_scenes": config.data.num_scenes})
        corpus = container.annotation_pipeline().build_corpus(scene_config, config.data.num_scenes)
        assignment = split_dataset([record.sample_id for record in corpus.records], config.seed)

        store = AnnotationStore(dataset_dir)
        store.reset()
        samples = [
            store.append(r.sample_id, r.image, r.mask, r.expression, r.category, assignment[r.sample_id])
            for r in corpus.records
        ]

        report = validate_coverage(
            {r.sample_id: coverage_ratio(r.mask) for r in corpus.records},
            max_ratio=config.data.max_coverage_ratio,
            min_fraction=config.data.min_coverage_fraction
        )
        statistics = summarize_corpus(
            samples, [r.mask for r in corpus.records], [r.is_night for r in corpus.records]
        )
        (dataset_dir / "coverage_report.json").write_text(report.model_dump_json(indent=2) + "\n")
        (dataset_dir / "statistics.json").write_text(statistics.model_dump_json(indent=2) + "\n")
        (dataset_dir / "skipped.json").write_text(json.dumps(corpus.skipped, indent=2) + "\n")
        archive_config(config, dataset_dir)

        logfire.info("Dataset generated",
                     samples=len(samples),
                     skipped=len(corpus.skipped),
                     splits=statistics.split_counts,
                     coverage_passed=report.passed)
    return report


def cmd_train(config: RunConfig, container: Optional[Container] = None) -> TrainingResult:
    container = container or build_container(config)
    store = _open_store(config)
    vocab = container.vocabulary()
    expressions = [sample.expression for sample in store.read_samples(Split.TRAIN)]
    tokenizer = build_tokenizer(vocab, container.template_bank(), expressions)

    archive_config(config, config.output_dir)
    with logfire.span("train"):
        return Trainer(config, store, vocab, tokenizer).train()


def evaluate_splits(
        predictor: Predictor,
        config: RunConfig,
        splits: Sequence[Split],
        container: Optional[Container] = None,
        visualize: int = 0,
        console: Optional[Console] = None
) -> Dict[str, MetricsReport]:
    """Evaluate each split and write reports, breakdowns and optional overlays under output_dir."""
    container = container or build_container(config)
    store = _open_store(config)
    vocab = container.vocabulary()
    output_dir = Path(config.output_dir)

    reports: Dict[str, MetricsReport] = {}
    breakdowns = {}
    for split in splits:
        dataset = ReferringDataset(store, split, vocab)
        result = evaluate(
            predictor, dataset, config.data.batch_size,
            overlays_dir=output_dir / "overlays" / split.value,
            visualize=visualize
        )
        reports[split.value] = result.report
        breakdowns[split.value] = result.category_breakdown
        write_report_json(result.report, output_dir / f"report_{split.value}.json")

    write_breakdown_json(breakdowns, output_dir / "category_breakdown.json")
    (output_dir / "report.txt").write_text(render_text_table(reports))
    if console is not None:
        console.print(render_rich_table(reports, title="Referring segmentation"))
    return reports


def cmd_eval(
        config: RunConfig,
        checkpoint: Union[str, Path],
        split: str = "val",
        container: Optional[Container] = None,
        visualize: int = 0,
        console: Optional[Console] = None
) -> Dict[str, MetricsReport]:
    model, metadata = load_checkpoint(checkpoint)
    archive_config(config, config.output_dir)
    with logfire.span("eval") as span:
        span.set_attributes({"checkpoint": str(checkpoint), "split": split, "epoch": metadata.get("epoch")})
        return evaluate_splits(ModelPredictor(model), config, EVAL_SPLITS[split], container, visualize, console)


def cmd_ablate(
        config: RunConfig,
        container: Optional[Container] = None,
        console: Optional[Console] = None
) -> AblationResult:
    """Both ablation grids from one command, every row on the same seed and data order."""
    container = container or build_container(config)
    store = _open_store(config)
    vocab = container.vocabulary()
    expressions = [sample.expression for sample in store.read_samples(Split.TRAIN)]
    tokenizer = build_tokenizer(vocab, container.template_bank(), expressions)

    output_dir = Path(config.output_dir) / "ablation"
    archive_config(config, output_dir)
    with logfire.span("ablate"):
        result = AblationRunner(config, store, vocab, tokenizer, output_dir).run()
    write_ablation(result, output_dir)

    if console is not None:
        console.print(render_ablation_rich(result.modules, "CDLE x ARFM"))
        console.print(render_ablation_rich(result.components, "Linguistic components", components=True))
    return result
