import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fashsent.batch import pack
from fashsent.config import ModelConfig
from fashsent.data import generate_synthetic
from fashsent.encoders import SyntheticEmbeddings, encode_record

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_cfg():
    return ModelConfig.small()


@pytest.fixture(scope="session")
def small_provider(small_cfg):
    return SyntheticEmbeddings(small_cfg.embedding_sub_dim, seed=0)


def encoded_posts(n, seed, cfg, provider, signal=1.0):
    return [encode_record(r, provider, cfg.vision_dim) for r in generate_synthetic(n, seed, signal)]


@pytest.fixture
def posts(small_cfg, small_provider):
    return encoded_posts(6, 3, small_cfg, small_provider)


@pytest.fixture
def batch(posts):
    return pack(posts)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
