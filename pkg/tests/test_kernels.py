import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catgkp import kernels

needs_compiled = pytest.mark.skipif(kernels.compiled_backend is None, reason="Cython extension not built")


def test_backend_label():
    assert kernels.BACKEND in ("cython", "python")
    assert (kernels.BACKEND == "cython") == (kernels.compiled_backend is not None)


def test_fallback_forced_by_environment():
    env = dict(os.environ, CATGKP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import catgkp; print(catgkp.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@given(st.complex_numbers(max_magnitude=4.0, allow_nan=False, allow_infinity=False))
def test_displacement_backends_agree(beta):
    a = kernels.compiled_backend.displacement_elements(beta, 30, 25)
    b = kernels.python_backend.displacement_elements(beta, 30, 25)
    assert np.allclose(a, b, atol=1e-12)


@needs_compiled
def test_wigner_backends_agree(rng):
    d = 20
    v = rng.normal(size=(2, d)) + 1j * rng.normal(size=(2, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    w = np.array([0.7, 0.3])
    ax = np.linspace(-3, 3, 31)
    a = kernels.compiled_backend.wigner_pure(np.ascontiguousarray(v), w, ax, ax)
    b = kernels.python_backend.wigner_pure(v, w, ax, ax)
    assert np.allclose(a, b, atol=1e-12)


def test_displacement_kernel_zero_is_identity():
    for impl in filter(None, (kernels.python_backend, kernels.compiled_backend)):
        assert np.allclose(impl.displacement_elements(0j, 6, 6), np.eye(6))
