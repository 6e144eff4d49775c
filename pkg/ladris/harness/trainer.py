# ladris/harness/trainer.py

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Union

import logfire
import numpy as np
import torch
from pydantic import BaseModel

from ..dataset import AnnotationStore, COLOR_RGB, ReferringDataset, TemplateBank, make_loader
from ..exceptions import TrainingDivergedError
from ..models import CategoryVocabulary, RunConfig, Split
from ..network import ReferringSegmenter, Tokenizer, save_checkpoint, segmentation_loss
from .evaluator import ModelPredictor, evaluate
from .schedule import polynomial_factor

TRAIN_LOG_FILE = "train_log.jsonl"
METRICS_LOG_FILE = "metrics_log.jsonl"
BEST_CHECKPOINT = "best.pt"
LAST_CHECKPOINT = "last.pt"


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


def build_tokenizer(
        vocab: CategoryVocabulary,
        template_bank: TemplateBank,
        expressions: Iterable[str] = ()
) -> Tokenizer:
    """Word vocabulary covering every category form, template phrase and color, plus the given expressions."""
    texts: List[str] = list(template_bank.vocabulary_texts()) + list(COLOR_RGB)
    for entry in vocab.entries:
        texts.extend(entry.surface_forms)
    texts.extend(expressions)
    return Tokenizer.from_texts(texts)


class EpochLog(BaseModel):
    epoch: int
    train_loss: float
    val_miou: float
    val_oiou: float
    lr: float


@dataclass
class TrainingResult:
    best_checkpoint: Path
    last_checkpoint: Path
    best_val_miou: float
    first_batch_loss: float
    history: List[EpochLog] = field(default_factory=list)


class Trainer:
    """AdamW with polynomial decay over the train split, validated on val after every epoch."""

    def __init__(
            self,
            config: RunConfig,
            store: AnnotationStore,
            vocab: CategoryVocabulary,
            tokenizer: Tokenizer,
            output_dir: Optional[Union[str, Path]] = None
    ):
        self.config = config
        self.store = store
        self.vocab = vocab
        self.tokenizer = tokenizer
        self.output_dir = Path(output_dir or config.output_dir)

    def build_model(self) -> ReferringSegmenter:
        seed_everything(self.config.seed)
        return ReferringSegmenter(self.config.model, self.tokenizer)

    def _write_jsonl(self, path: Path, record: dict) -> None:
        with open(path, "a") as f:
            f.write(json.dumps(record) + "\n")

    def train(self, model: Optional[ReferringSegmenter] = None) -> TrainingResult:
        config = self.config
        model = model or self.build_model()
        train_set = ReferringDataset(self.store, Split.TRAIN, self.vocab)
        val_set = ReferringDataset(self.store, Split.VAL, self.vocab)
        loader = make_loader(train_set, config.data.batch_size, shuffle=True, seed=config.seed)

        total_steps = config.optim.epochs * len(loader)
        optimizer = torch.optim.AdamW(
            model.parameters(), lr=config.optim.base_lr, weight_decay=config.optim.weight_decay
        )
        scheduler = torch.optim.lr_scheduler.LambdaLR(
            optimizer, polynomial_factor(total_steps, config.optim.poly_power)
        )

        self.output_dir.mkdir(parents=True, exist_ok=True)
        train_log = self.output_dir / TRAIN_LOG_FILE
        metrics_log = self.output_dir / METRICS_LOG_FILE
        train_log.write_text("")
        metrics_log.write_text("")

        best_path = self.output_dir / BEST_CHECKPOINT
        last_path = self.output_dir / LAST_CHECKPOINT
        best_miou = -1.0
        first_batch_loss = None
        history: List[EpochLog] = []
        step = 0

        for epoch in range(1, config.optim.epochs + 1):
            with logfire.span(f"epoch {epoch}") as span:
                model.train()
                losses = []
                lr = optimizer.param_groups[0]["lr"]
                for batch in loader:
                    output = model(batch.images, model.tokenize(batch.triples))
                    loss = segmentation_loss(output.logits, batch.masks)
                    value = float(loss.detach())
                    if not math.isfinite(value):
                        logfire.error("Training diverged", epoch=epoch, step=step, loss=value)
                        raise TrainingDivergedError(epoch, step, value)
                    if first_batch_loss is None:
                        first_batch_loss = value

                    optimizer.zero_grad()
                    loss.backward()
                    optimizer.step()
                    scheduler.step()

                    record = {"epoch": epoch, "step": step, "loss": value, "w_l": None, "w_d": None, "w_c": None}
                    if output.srg_weights is not None:
                        w_l, w_d, w_c = output.srg_weights.detach().mean(dim=0).tolist()
                        record.update(w_l=w_l, w_d=w_d, w_c=w_c)
                    self._write_jsonl(metrics_log, record)
                    losses.append(value)
                    step += 1

                val = evaluate(ModelPredictor(model), val_set, config.data.batch_size).report
                entry = EpochLog(
                    epoch=epoch,
                    train_loss=math.fsum(losses) / len(losses),
                    val_miou=val.miou,
                    val_oiou=val.oiou,
                    lr=lr
                )
                history.append(entry)
                self._write_jsonl(train_log, entry.model_dump())
                span.set_attributes(entry.model_dump())

                metadata = {"epoch": epoch, "val_miou": val.miou, "seed": config.seed}
                if val.miou > best_miou:
                    best_miou = val.miou
                    save_checkpoint(best_path, model, metadata)
                save_checkpoint(last_path, model, metadata)

        logfire.info("Training finished", epochs=config.optim.epochs, best_val_miou=best_miou)
        return TrainingResult(
            best_checkpoint=best_path,
            last_checkpoint=last_path,
            best_val_miou=best_miou,
            first_batch_loss=first_batch_loss,
            history=history
        )
