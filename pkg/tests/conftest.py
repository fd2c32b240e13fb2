import numpy as np
import pytest

from oscillab.kernels import available_backends


@pytest.fixture(params=sorted(available_backends()))
def kernel_impl(request):
    """Run kernel-level tests against every importable backend."""
    return available_backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def ramp(k: int) -> np.ndarray:
    """Interior samples of the line dropping from 1 at the left boundary to 0
    at the right boundary (the CLI's 'ramp' generator)."""
    i = np.arange(1, k + 1, dtype=float)
    return (k + 1 - i) / (k + 1)
