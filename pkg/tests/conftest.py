import numpy as np
import pytest

from ckptmerge import Checkpoint, kernels

BACKENDS = ["numpy"] + (["numba"] if kernels.numba_available() else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return kernels.get_backend(request.param)


@pytest.fixture(params=BACKENDS)
def bound_backend(request, monkeypatch):
    """Rebind the kernels used by the library modules to one backend."""
    impl = kernels.get_backend(request.param)
    for name in kernels.KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


def random_ckpt(rng, shapes, scale=1.0):
    return Checkpoint({name: (scale * rng.standard_normal(shape)).astype(np.float32) for name, shape in shapes.items()})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
