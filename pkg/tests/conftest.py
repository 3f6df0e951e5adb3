"""Shared fixtures and strategies of the test suite."""

from typing import List
import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import settings
from shadowinv.log import SILENT, Logger
from shadowinv.comb.model import Observable

settings.register_profile('shadowinv', max_examples = 25, deadline = None)
settings.load_profile('shadowinv')

@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

@pytest.fixture
def logger() -> Logger:
    return SILENT

@pytest.fixture
def pauli_z() -> Observable:
    return Observable.named('Z')

@pytest.fixture(autouse = True)
def isolated_config(tmp_path, monkeypatch) -> None:
    """Keeps every test away from the configs of the machine running it."""
    monkeypatch.setenv('SHADOWINV_CONFIG_DIR', str(tmp_path / 'site'))
    monkeypatch.setenv('SHADOWINV_THREADS', '1')
    monkeypatch.chdir(tmp_path)

@st.composite
def subsystem_dims(draw, min_size: int = 1, max_size: int = 4) -> List[int]:
    """Draws a short list of small subsystem dimensions."""
    return draw(st.lists(st.integers(min_value = 1, max_value = 3), min_size = min_size,
        max_size = max_size))

@st.composite
def permutations_of(draw, size: int) -> List[int]:
    return draw(st.permutations(list(range(size))))

@st.composite
def dims_and_permutation(draw):
    dims: List[int] = draw(subsystem_dims(min_size = 1, max_size = 4))
    return dims, draw(permutations_of(len(dims)))

@st.composite
def seeds(draw) -> int:
    return draw(st.integers(min_value = 0, max_value = 2 ** 32 - 1))
