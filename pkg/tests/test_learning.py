import pytest

from ladris.harness import cmd_eval, cmd_gen_data, cmd_train
from ladris.models import RunConfig


@pytest.mark.slow
def test_default_config_learns_the_synthetic_corpus(tmp_path):
    config = RunConfig(output_dir=str(tmp_path / "run"))
    config = config.model_copy(update={
        "data": config.data.model_copy(update={"dataset_dir": str(tmp_path / "data")}),
    })
    assert cmd_gen_data(config).passed

    result = cmd_train(config)
    losses = [epoch.train_loss for epoch in result.history[:5]]
    assert all(later < earlier for earlier, later in zip(losses, losses[1:]))

    report = cmd_eval(config, result.best_checkpoint, "test")["test"]
    assert report.miou >= 0.50
