import numpy as np
import pytest
import torch

from ladris.dataset import TemplateBank
from ladris.language import load_vocabulary
from ladris.models import ModelConfig, SceneConfig
from ladris.network import Tokenizer
from ladris.harness import build_tokenizer


@pytest.fixture(scope="session")
def vocab():
    return load_vocabulary()


@pytest.fixture(scope="session")
def bank():
    return TemplateBank.load()


@pytest.fixture(scope="session")
def tokenizer(vocab, bank) -> Tokenizer:
    return build_tokenizer(vocab, bank)


@pytest.fixture
def tiny_scene_config() -> SceneConfig:
    return SceneConfig(image_size=32, instances_per_scene=(2, 4), size_range=(4, 10), seed=3)


@pytest.fixture
def tiny_model_config() -> ModelConfig:
    return ModelConfig(channels=(8, 16, 16, 32), text_dim=16, heads=2, max_tokens=24)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _torch_seed():
    torch.manual_seed(0)
    yield


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full desk-scale training tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full desk-scale training, minutes on a CPU")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
