"""
Pytest configuration and shared fixtures for superflag tests.
"""

import shutil
import tempfile
from pathlib import Path

import pytest
import yaml

from parabolic import FlagType
from superalgebra import Series, build_superalgebra


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def config_dir(temp_dir):
    """A data directory with small sweep bounds and few seeds."""
    sweep_cfg = {
        "gl": {"max_m": 2, "max_n": 1, "max_r": 1},
        "osp": {"max_m": 2, "max_n": 2, "max_r": 1},
        "pisp": {"max_m": 2, "max_n": 2, "max_r": 1},
        "q": {"max_m": 2, "max_n": 2, "max_r": 1},
    }
    atlas_cfg = {"seeds": 2, "retries": 100, "bound": 4, "sweep": {"max_total": 3, "max_r": 1}}
    with open(temp_dir / "sweep.yml", "w") as f:
        yaml.dump(sweep_cfg, f)
    with open(temp_dir / "atlas.yml", "w") as f:
        yaml.dump(atlas_cfg, f)
    return temp_dir


@pytest.fixture
def flag():
    """Factory: flag("gl", 2, 1, (2,), (0,))."""

    def make(series, m, n, k, l):  # noqa: E741
        return FlagType(Series(series), m, n, tuple(k), tuple(l))

    return make


@pytest.fixture
def gl22():
    return build_superalgebra(Series.GL, 2, 2)


@pytest.fixture
def gl21():
    return build_superalgebra(Series.GL, 2, 1)


@pytest.fixture
def osp22():
    return build_superalgebra(Series.OSP, 2, 2)


@pytest.fixture
def pisp22():
    return build_superalgebra(Series.PISP, 2, 2)


@pytest.fixture
def q22():
    return build_superalgebra(Series.Q, 2, 2)

