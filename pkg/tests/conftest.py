import numpy as np
import pytest

from parapde.datasets import (
    BenchmarkSpec,
    solve_advection_diffusion,
    solve_burgers,
    solve_kuramoto_sivashinsky,
)


@pytest.fixture(scope="session")
def burgers_clean():
    return solve_burgers(BenchmarkSpec("burgers"))


@pytest.fixture(scope="session")
def ad_clean():
    return solve_advection_diffusion(BenchmarkSpec("advection_diffusion"))


@pytest.fixture(scope="session")
def ks_clean():
    return solve_kuramoto_sivashinsky(BenchmarkSpec("kuramoto_sivashinsky"))


def periodic_mass(values: np.ndarray, dx: float) -> np.ndarray:
    """Trapezoid integral over the full periodic cell, per frame."""
    closed = np.vstack([values, values[:1]])
    return np.trapezoid(closed, dx=dx, axis=0)
