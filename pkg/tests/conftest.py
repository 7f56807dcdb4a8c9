# tests/conftest.py - Test configuration and fixtures
import numpy as np
import pytest

from src.algebra.field import field_create, field_from_order
from src.algebra.group import GroupCtx, heisenberg


@pytest.fixture
def f3():
    """The prime field F_3"""
    return field_create(3)


@pytest.fixture
def f5():
    """The prime field F_5"""
    return field_create(5)


@pytest.fixture
def f9():
    """F_9 with the default modulus"""
    return field_from_order(9)


@pytest.fixture
def h1_3() -> GroupCtx:
    """H^1(F_3), 27 points"""
    return heisenberg(1, 3)


@pytest.fixture
def h1_5() -> GroupCtx:
    """H^1(F_5), 125 points"""
    return heisenberg(1, 5)


@pytest.fixture
def h1_7() -> GroupCtx:
    """H^1(F_7), 343 points"""
    return heisenberg(1, 7)


@pytest.fixture
def h2_3() -> GroupCtx:
    """H^2(F_3), 243 points"""
    return heisenberg(2, 3)


@pytest.fixture
def h1_9() -> GroupCtx:
    """H^1(F_9), 729 points"""
    return heisenberg(1, 9)


@pytest.fixture
def rng():
    """Seeded generator for sampled inputs"""
    return np.random.default_rng(12345)


@pytest.fixture
def report_path(tmp_path):
    """Report file inside a not-yet-created directory"""
    return tmp_path / "reports" / "run.jsonl"
