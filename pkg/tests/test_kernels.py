"""Compiled and numpy kernels must agree; both are always importable."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maslovkit import _kernels_py, kernels

backends = [_kernels_py]
try:
    from maslovkit import _kernels as _compiled
    backends.append(_compiled)
except ImportError:  # extension not built in this environment
    _compiled = None

needs_ext = pytest.mark.skipif(_compiled is None, reason="compiled extension not built")


def test_dispatch_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    if _compiled is not None:
        assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__)
def test_orthonormalize(mod):
    rng = np.random.default_rng(0)
    frames = rng.standard_normal((20, 6, 3))
    q, ratio = mod.orthonormalize(frames)
    assert np.allclose(np.einsum("mdi,mdj->mij", q, q), np.eye(3), atol=1e-12)
    # same column spans: projecting the input onto q loses nothing
    assert np.allclose(np.einsum("mdi,mei,mej->mdj", q, q, frames), frames, atol=1e-10)
    assert np.all(ratio > 0)


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__)
def test_orthonormalize_flags_rank_loss(mod):
    f = np.array([[[1.0, 2.0], [1.0, 2.0], [0.0, 0.0], [0.0, 0.0]]])
    _, ratio = mod.orthonormalize(f)
    assert ratio[0] < 1e-12


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__)
def test_wrapped_increments(mod):
    ph = np.angle(np.exp(1j * np.array([0.0, 2.0, 4.0])))
    inc = mod.wrapped_increments(ph)
    assert np.all(inc > -np.pi) and np.all(inc <= np.pi)
    assert np.sum(inc) == pytest.approx(2 * np.pi)   # one full turn


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__)
def test_left_chain(mod):
    rng = np.random.default_rng(1)
    mats = rng.standard_normal((5, 3, 3))
    out = mod.left_chain(mats)
    acc = np.eye(3)
    for k in range(5):
        acc = mats[k] @ acc if k else mats[0]
        assert np.allclose(out[k], acc)


@needs_ext
@given(st.integers(1, 4), st.integers(3, 40), st.integers(0, 2**32 - 1))
def test_backends_agree(n, m, seed):
    rng = np.random.default_rng(seed)
    frames = rng.standard_normal((m, 2 * n, n))
    qa, ra = _kernels_py.orthonormalize(frames)
    qb, rb = _compiled.orthonormalize(frames)
    assert np.allclose(qa, qb, atol=1e-10) and np.allclose(ra, rb, rtol=1e-8)
    ph = rng.uniform(-np.pi, np.pi, m)
    assert np.allclose(_kernels_py.wrapped_increments(ph), _compiled.wrapped_increments(ph))
    mats = rng.standard_normal((m, n, n)) / np.sqrt(n)
    assert np.allclose(_kernels_py.left_chain(mats), _compiled.left_chain(mats), atol=1e-10)


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys
    code = ("import maslovkit.kernels as K, maslovkit.maslov as M;"
            "print(K.BACKEND, M.maslov_index(M.circle_gauss_loop(64)))")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True,
                         env={**os.environ, "MASLOVKIT_PURE_PYTHON": "1"}).stdout.split()
    assert out == ["python", "2"]
