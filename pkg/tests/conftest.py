import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for sampled evaluation points."""
    return np.random.default_rng(42)
