"""Shared fixtures for tests."""

import numpy as np
import pytest

from fraccusum.engine import fbm
from fraccusum.models.grid import Grid, SamplePath
from fraccusum.models.trace import LLRTrace


@pytest.fixture
def grid() -> Grid:
    """Unit-horizon grid with 256 steps."""
    return Grid(step=1.0 / 256, count=256)


@pytest.fixture
def zero_path(grid) -> SamplePath:
    return SamplePath(grid=grid, values=np.zeros(grid.count + 1))


@pytest.fixture
def clear_sampler_caches():
    """Drop cached eigenvalues and Cholesky factors around a test."""
    fbm._circulant_sqrt_eigenvalues.cache_clear()
    fbm._cholesky_factor.cache_clear()
    yield
    fbm._circulant_sqrt_eigenvalues.cache_clear()
    fbm._cholesky_factor.cache_clear()


@pytest.fixture
def make_llr():
    """Build an LLRTrace from plain lists; <u> defaults to 0, 1, 2, ..."""

    def _make(u, qv_u=None, step: float = 0.5) -> LLRTrace:
        u = np.asarray(u, dtype=float)
        if qv_u is None:
            qv_u = np.arange(u.size, dtype=float)
        return LLRTrace(grid=Grid(step=step, count=u.size - 1), u=u, qv_u=qv_u)

    return _make


@pytest.fixture
def write_config(tmp_path):
    """Write a TOML experiment config and return its path."""

    def _write(text: str, name: str = "experiment.toml"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
