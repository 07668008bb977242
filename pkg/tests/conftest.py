"""Shared test fixtures for MomentRate tests."""

import numpy as np
import pytest

from momentrate.representations import Standard, TorusRep


@pytest.fixture
def rng():
    """Seeded generator so every test run draws the same instances."""
    return np.random.default_rng(20240601)


@pytest.fixture
def qubit_state():
    """The standard qubit test state diag(0.7, 0.3)."""
    return np.diag([0.7, 0.3]).astype(complex)


@pytest.fixture
def qubit_rep():
    """U(2) acting on C^2."""
    return Standard(2)


@pytest.fixture
def bernoulli_rep():
    """U(1) acting with weights 0 and 1: one copy of a Bernoulli variable."""
    return TorusRep.of({0: 1, 1: 1})


@pytest.fixture
def bernoulli_state():
    """Factory for the state whose weight-1 probability is p."""

    def make(p: float) -> np.ndarray:
        return np.diag([1.0 - p, p]).astype(complex)

    return make


@pytest.fixture
def random_state(rng):
    """Factory for random faithful density matrices drawn from the seeded generator."""

    def make(dim: int, floor: float = 0.05) -> np.ndarray:
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = z @ z.conj().T + floor * np.eye(dim)
        return rho / np.trace(rho).real

    return make
