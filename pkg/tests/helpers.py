from pathlib import Path

from ladris.models import DataConfig, ModelConfig, OptimConfig, RunConfig, SceneConfig


def make_run_config(root: Path, seed: int = 7, epochs: int = 2, num_scenes: int = 16, **model_overrides) -> RunConfig:
    """16 scenes at 32x32 with a narrow network; small enough for end-to-end runs on CPU."""
    model = ModelConfig(channels=(8, 16, 16, 32), text_dim=16, heads=2, max_tokens=24, **model_overrides)
    return RunConfig(
        model=model,
        data=DataConfig(
            dataset_dir=str(root / "data"),
            num_scenes=num_scenes,
            batch_size=4,
            scene=SceneConfig(image_size=32, instances_per_scene=(2, 4), size_range=(4, 10)),
        ),
        optim=OptimConfig(epochs=epochs, base_lr=1e-3),
        seed=seed,
        output_dir=str(root / "run"),
    )
