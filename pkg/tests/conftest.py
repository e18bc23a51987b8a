import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)


def max_abs(x):
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def rel_scale_err(candidate, reference):
    """max|candidate - reference| relative to the reference's largest entry."""
    scale = max(max_abs(reference), 1e-300)
    return max_abs(np.asarray(candidate) - np.asarray(reference)) / scale
