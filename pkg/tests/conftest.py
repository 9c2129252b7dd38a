import pytest

from kpho.model import LatticeConfig


@pytest.fixture(scope="session")
def cfg6():
    """Reference lattice: v0 = 6, w/l = 2/3."""
    return LatticeConfig(6.0, 2.0 / 3.0)


@pytest.fixture(scope="session")
def cfg5():
    """Tight-binding regime: v0 = 5, b/l = 0.2."""
    return LatticeConfig.from_barrier(5.0, 0.2)
