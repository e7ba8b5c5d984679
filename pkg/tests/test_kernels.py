import numpy as np
import pytest

from parhodge import _kernels_py, kernels
from parhodge import generators as gen

compiled = pytest.importorskip("parhodge._kernels")


def _rand(rng, shape, p):
    return rng.integers(0, p, size=shape, dtype=np.int64)


@pytest.mark.parametrize("p,m", [(2, 1), (3, 2), (5, 1), (7, 3)])
def test_backends_agree(p, m):
    ctx = gen.field(p, m)
    rng = np.random.default_rng(p * 10 + m)
    for L, n in [(1, 2), (6, 3), (17, 2)]:
        A, B = _rand(rng, (L, n, n, m), p), _rand(rng, (L, n, n, m), p)
        c = _rand(rng, (n, n, m), p)
        assert (compiled.matmul_series(A, B, ctx.red, p) == _kernels_py.matmul_series(A, B, ctx.red, p)).all()
        assert (compiled.const_left(c, A, ctx.red, p) == _kernels_py.const_left(c, A, ctx.red, p)).all()
        assert (compiled.const_right(A, c, ctx.red, p) == _kernels_py.const_right(A, c, ctx.red, p)).all()
        x, y = _rand(rng, (L, m), p), _rand(rng, (L, m), p)
        assert (compiled.field_mul(x, y, ctx.red, p) == _kernels_py.field_mul(x, y, ctx.red, p)).all()


def test_zero_length_and_mixed_lengths():
    ctx = gen.field(5, 2)
    rng = np.random.default_rng(1)
    A, B = _rand(rng, (4, 2, 2, 2), 5), _rand(rng, (7, 2, 2, 2), 5)
    assert (compiled.matmul_series(A, B, ctx.red, 5) == _kernels_py.matmul_series(A, B, ctx.red, 5)).all()
    Z = np.zeros((0, 2, 2, 2), dtype=np.int64)
    assert compiled.matmul_series(Z, Z, ctx.red, 5).shape == (0, 2, 2, 2)


def test_dispatch_reports_backend():
    assert kernels.BACKEND in ("cython", "numpy")
