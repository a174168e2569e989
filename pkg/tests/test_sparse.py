import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgekit import _sparse_py, sparse
from hodgekit.scalars import QQ, QQ_I
from hodgekit.sparse import ExactSparse

compiled = pytest.importorskip("hodgekit._sparse_ext")

entry = st.builds(QQ_I, st.integers(-9, 9).map(lambda a: QQ(a, 1)), st.integers(-9, 9).map(lambda b: QQ(b, 2)))


@st.composite
def matrices(draw, rows=None, cols=None):
    r = rows if rows is not None else draw(st.integers(1, 6))
    c = cols if cols is not None else draw(st.integers(1, 6))
    cells = draw(st.dictionaries(st.tuples(st.integers(0, r - 1), st.integers(0, c - 1)), entry, max_size=r * c))
    return ExactSparse.from_dict((r, c), cells)


def dense(A: ExactSparse):
    return A.to_rows()


def dense_mul(A, B):
    return [[sum((a * b for a, b in zip(row, col)), QQ_I(0, 0)) for col in zip(*B)] for row in A]


@given(st.integers(1, 5).flatmap(lambda k: st.tuples(matrices(cols=k), matrices(rows=k))))
def test_matmul_matches_dense(pair):
    A, B = pair
    assert (A @ B).to_rows() == dense_mul(dense(A), dense(B))


@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.tuples(matrices(r, c), matrices(r, c), entry, entry))))
def test_lincomb_matches_dense(args):
    A, B, a, b = args
    expected = [[a * x + b * y for x, y in zip(ra, rb)] for ra, rb in zip(dense(A), dense(B))]
    assert A.lincomb(a, B, b).to_rows() == expected


@given(st.integers(1, 5).flatmap(lambda k: st.tuples(matrices(cols=k), matrices(rows=k))))
def test_kernels_agree(pair):
    A, B = pair
    args = (A.indptr, A.indices, A.re, A.im, B.indptr, B.indices, B.re, B.im, A.shape[0], B.shape[1])
    fast = compiled.matmul(*args)
    slow = _sparse_py.matmul(*args)
    for x, y in zip(fast, slow):
        assert [int(v) for v in x] == [int(v) for v in y]


def test_gcd_maxabs_kernels_agree():
    re = np.array([6, -4, 0, 10], dtype=np.int64)
    im = np.array([2, 8, -6, 0], dtype=np.int64)
    assert compiled.gcd_maxabs(re, im, 14) == _sparse_py.gcd_maxabs(re, im, 14) == (2, 12)


def test_big_integers_take_the_python_path():
    big = 1 << 40
    A = ExactSparse.from_dict((2, 2), {(0, 0): big, (0, 1): 3, (1, 1): big + 1})
    C = A @ A @ A
    assert C.re.dtype == object
    assert C.entries()[(0, 0)] == QQ_I(big ** 3, 0)
    assert C.entries()[(1, 1)] == QQ_I((big + 1) ** 3, 0)
    back = ExactSparse.from_dict((2, 2), {(0, 0): 1}) @ ExactSparse.identity(2)
    assert back.re.dtype == np.int64


def test_denominator_beyond_int64_with_small_numerators():
    tiny = QQ(1, 1 << 40)
    A = ExactSparse.from_dict((2, 2), {(0, 0): tiny, (1, 1): QQ(3, 1 << 40)})
    C = A @ A
    assert C.den > (1 << 63)
    assert C.entries() == {(0, 0): QQ_I(QQ(1, 1 << 80), 0), (1, 1): QQ_I(QQ(9, 1 << 80), 0)}


def test_mixed_width_parts_stay_exact():
    big = 1 << 70
    A = ExactSparse.from_dict((1, 2), {(0, 0): QQ_I(0, big), (0, 1): QQ_I(1, big)})
    assert A.re.dtype == A.im.dtype == object
    assert (A @ ExactSparse.identity(2)).entries() == A.entries()


def test_normalization_reduces_denominator():
    A = ExactSparse.from_dict((1, 2), {(0, 0): QQ(2, 6), (0, 1): QQ(1, 3)})
    assert A.den == 3
    assert A.scale(3) == ExactSparse.from_dict((1, 2), {(0, 0): 1, (0, 1): 1})


def test_adjoint_helpers():
    A = ExactSparse.from_dict((2, 2), {(0, 1): QQ_I(1, 2)})
    assert A.H.entries() == {(1, 0): QQ_I(1, -2)}
    w = np.array([1, 4])
    S = A.diagonal_similarity(w)
    assert S.entries() == {(0, 1): QQ_I(4, 8)}
    assert A.commutator(A.H) == (A @ A.H) - (A.H @ A)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        ExactSparse.identity(2) @ ExactSparse.identity(3)
    with pytest.raises(ValueError):
        ExactSparse.identity(2) + ExactSparse.identity(3)


def test_pure_python_fallback_is_selected_by_env():
    code = "import hodgekit; print(hodgekit.BACKEND)"
    env = dict(os.environ, HODGEKIT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert sparse.backend_name() == "compiled"


def test_fallback_gives_same_kahler_residuals():
    code = ("from hodgekit import kahler_identity_suite as k; r = k(1, max_mode=1); "
            "print(r.passed, sorted(x.modes_checked for x in r.relations.values())[-1])")
    env = dict(os.environ, HODGEKIT_PURE_PYTHON="1")
    slow = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    fast = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert slow.stdout == fast.stdout == "True 9\n"
