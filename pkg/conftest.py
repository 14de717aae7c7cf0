"""
pytest 共通フィクスチャ
"""

import numpy as np
import pytest

from classical_automata import Dfa
from logging_config import reset_app_logging


@pytest.fixture
def rng():
    """固定シードの乱数生成器"""
    return np.random.default_rng(20240607)


@pytest.fixture
def binary_all_dfa():
    """Σ* を受理する 1 状態 DFA"""
    return Dfa(["a"], ["0", "1"], "a", {"a": {"0": "a", "1": "a"}}, {"a"})


@pytest.fixture
def binary_empty_dfa():
    """空言語の 1 状態 DFA"""
    return Dfa(["z"], ["0", "1"], "z", {"z": {"0": "z", "1": "z"}}, set())


@pytest.fixture(autouse=True)
def _fresh_logging():
    yield
    reset_app_logging()
