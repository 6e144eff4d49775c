# ladris/harness/__init__.py

from .config import RESOLVED_CONFIG_FILE, archive_config, load_run_config
from .schedule import polynomial_lr, polynomial_factor
from .trainer import EpochLog, Trainer, TrainingResult, build_tokenizer, seed_everything
from .evaluator import (
    EmptyPredictor, EvaluationResult, GroundTruthPredictor, ModelPredictor, Predictor, evaluate
)
from .ablation import COMPONENT_ROWS, MODULE_ROWS, AblationResult, AblationRow, AblationRunner
from .commands import cmd_ablate, cmd_eval, cmd_gen_data, cmd_train, evaluate_splits

__all__ = [
    'RESOLVED_CONFIG_FILE', 'archive_config', 'load_run_config',
    'polynomial_lr', 'polynomial_factor',
    'EpochLog', 'Trainer', 'TrainingResult', 'build_tokenizer', 'seed_everything',
    'EmptyPredictor', 'EvaluationResult', 'GroundTruthPredictor', 'ModelPredictor', 'Predictor', 'evaluate',
    'COMPONENT_ROWS', 'MODULE_ROWS', 'AblationResult', 'AblationRow', 'AblationRunner',
    'cmd_ablate', 'cmd_eval', 'cmd_gen_data', 'cmd_train', 'evaluate_splits',
]
