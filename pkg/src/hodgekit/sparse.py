"""Exact sparse matrices over the Gaussian rationals.

An :class:`ExactSparse` stores CSR arrays of Gaussian-integer numerators
together with one positive integer denominator.  Products and linear
combinations run in the compiled kernel (``hodgekit._sparse_ext``) when it
is importable and every partial sum provably fits in int64; otherwise the
pure-Python kernel in ``hodgekit._sparse_py`` is used with unbounded ints.

Set ``HODGEKIT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from typing import Iterable, Mapping

import numpy as np

from . import _sparse_py
from .scalars import QQ, QQ_I, re_im, to_gauss

try:  # pragma: no cover - depends on the build
    if os.environ.get("HODGEKIT_PURE_PYTHON"):
        raise ImportError("pure-Python kernels forced")
    from . import _sparse_ext as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

_SAFE = 1 << 62
_INT64_MAX = (1 << 63) - 1


def backend_name() -> str:
    return "compiled" if _compiled is not None else "python"


def _int_array(values) -> np.ndarray:
    values = list(values)
    if all(-_INT64_MAX <= int(v) <= _INT64_MAX for v in values):
        return np.array(values, dtype=np.int64)
    return np.array([int(v) for v in values], dtype=object)


_GAUSS = type(QQ_I(0, 1))


def _split_scalar(c) -> tuple[int, int, int]:
    """Gaussian rational ``c`` as ``(a + b i) / q`` with integers."""
    if type(c) is int:
        return c, 0, 1
    if type(c) is _GAUSS:
        re, im = c.x, c.y
    else:
        re, im = re_im(to_gauss(c))
    q = math.lcm(int(re.denominator), int(im.denominator))
    return int(re * q), int(im * q), q


class ExactSparse:
    """Immutable sparse matrix with exact Gaussian-rational entries."""

    __slots__ = ("shape", "indptr", "indices", "re", "im", "den", "_maxabs", "_backend")

    def __init__(self, shape, indptr, indices, re, im, den: int = 1, normalize: bool = True):
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.re = re if isinstance(re, np.ndarray) else _int_array(re)
        self.im = im if isinstance(im, np.ndarray) else _int_array(im)
        if self.re.dtype != self.im.dtype:  # one part overflowed int64: both go to Python ints
            self.re, self.im = self.re.astype(object), self.im.astype(object)
        self.den = int(den)
        self._maxabs = None
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if normalize:
            self._normalize()

    # construction -------------------------------------------------------
    @classmethod
    def from_dict(cls, shape, entries: Mapping) -> "ExactSparse":
        """Build from ``{(row, col): scalar}``; scalars may be int, QQ or QQ_I."""
        items = []
        den = 1
        for (r, c), v in entries.items():
            a, b, q = _split_scalar(v)
            if a or b:
                items.append((int(r), int(c), a, b, q))
                den = math.lcm(den, q)
        items.sort()
        indptr = [0] * (shape[0] + 1)
        indices, re, im = [], [], []
        for r, c, a, b, q in items:
            indptr[r + 1] += 1
            indices.append(c)
            re.append(a * (den // q))
            im.append(b * (den // q))
        for r in range(shape[0]):
            indptr[r + 1] += indptr[r]
        return cls(shape, indptr, indices, re, im, den)

    @classmethod
    def from_rows(cls, rows) -> "ExactSparse":
        rows = [list(r) for r in rows]
        shape = (len(rows), len(rows[0]) if rows else 0)
        return cls.from_dict(shape, {(i, j): x for i, r in enumerate(rows) for j, x in enumerate(r) if x})

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> "ExactSparse":
        ncols = nrows if ncols is None else ncols
        return cls((nrows, ncols), np.zeros(nrows + 1, dtype=np.int64), [], [], [], 1, normalize=False)

    @classmethod
    def identity(cls, n: int) -> "ExactSparse":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Iterable) -> "ExactSparse":
        values = list(values)
        return cls.from_dict((len(values), len(values)), {(i, i): v for i, v in enumerate(values)})

    # bookkeeping --------------------------------------------------------
    def _normalize(self):
        if self.re.size == 0:
            self.den = 1
            self._maxabs = 0
            return
        if self.re.dtype == object or _compiled is None or self.den > _INT64_MAX:
            g, mx = _sparse_py.gcd_maxabs(self.re, self.im, self.den)
        else:
            g, mx = _compiled.gcd_maxabs(self.re, self.im, self.den)
        if g > 1:
            self.re = self.re // g
            self.im = self.im // g
            self.den //= g
            mx //= g
        self._maxabs = mx

    def _max_abs(self) -> int:
        if self._maxabs is None:
            if self.re.size == 0:
                self._maxabs = 0
            elif self.re.dtype == object:
                self._maxabs = max(abs(int(a)) + abs(int(b)) for a, b in zip(self.re, self.im))
            else:
                self._maxabs = int((np.abs(self.re) + np.abs(self.im)).max())
        return self._maxabs

    def _compiled_ok(self) -> bool:
        return _compiled is not None and self.re.dtype != object

    @property
    def nnz(self) -> int:
        return int(self.re.size)

    def is_zero(self) -> bool:
        return self.re.size == 0

    # arithmetic ---------------------------------------------------------
    def __matmul__(self, other: "ExactSparse") -> "ExactSparse":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        nrows, ncols = self.shape[0], other.shape[1]
        bound = self.shape[1] * self._max_abs() * other._max_abs()
        args = (self.indptr, self.indices, self.re, self.im, other.indptr, other.indices, other.re, other.im, nrows, ncols)
        if bound < _SAFE and self._compiled_ok() and other._compiled_ok():
            p, i, r, m = _compiled.matmul(*args)
        else:
            p, i, r, m = _sparse_py.matmul(*args)
        return ExactSparse((nrows, ncols), p, i, r, m, self.den * other.den)

    def lincomb(self, a, other: "ExactSparse", b) -> "ExactSparse":
        """``a*self + b*other`` for Gaussian-rational scalars ``a``, ``b``."""
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        ar, ai, aq = _split_scalar(a)
        br, bi, bq = _split_scalar(b)
        # a*A + b*B = (ar+i ai)/aq * NA/dA + (br+i bi)/bq * NB/dB
        da, db = aq * self.den, bq * other.den
        L = math.lcm(da, db)
        fa, fb = L // da, L // db
        sa = (ar * fa, ai * fa)
        sb = (br * fb, bi * fb)
        bound = (abs(sa[0]) + abs(sa[1])) * self._max_abs() + (abs(sb[0]) + abs(sb[1])) * other._max_abs()
        nrows = self.shape[0]
        if bound < _SAFE and self._compiled_ok() and other._compiled_ok():
            p, i, r, m = _compiled.lincomb(self.indptr, self.indices, self.re, self.im, sa[0], sa[1],
                                           other.indptr, other.indices, other.re, other.im, sb[0], sb[1], nrows)
        else:
            p, i, r, m = _sparse_py.lincomb(self.indptr, self.indices, self.re, self.im, sa[0], sa[1],
                                            other.indptr, other.indices, other.re, other.im, sb[0], sb[1], nrows)
        return ExactSparse(self.shape, p, i, r, m, L)

    def __add__(self, other):
        return self.lincomb(1, other, 1)

    def __sub__(self, other):
        return self.lincomb(1, other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "ExactSparse":
        a, b, q = _split_scalar(c)
        if a == 0 and b == 0:
            return ExactSparse.zeros(*self.shape)
        if self.re.dtype != object and (abs(a) + abs(b)) * self._max_abs() < _SAFE:
            re = a * self.re - b * self.im
            im = a * self.im + b * self.re
        else:
            re = _int_array(a * int(x) - b * int(y) for x, y in zip(self.re, self.im))
            im = _int_array(a * int(y) + b * int(x) for x, y in zip(self.re, self.im))
        return ExactSparse(self.shape, self.indptr, self.indices, re, im, self.den * q)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def commutator(self, other: "ExactSparse", sign: int = 1) -> "ExactSparse":
        """Graded commutator ``AB - sign·BA`` (``sign = (-1)^{deg A·deg B}``)."""
        return (self @ other).lincomb(1, other @ self, -sign)

    # structure ----------------------------------------------------------
    def rows_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.shape[0], dtype=np.int64), np.diff(self.indptr))

    def transpose(self, conjugate: bool = False) -> "ExactSparse":
        rows = self.rows_of()
        order = np.lexsort((rows, self.indices))
        cols_t = self.indices[order]
        indptr = np.zeros(self.shape[1] + 1, dtype=np.int64)
        np.add.at(indptr, cols_t + 1, 1)
        indptr = np.cumsum(indptr)
        im = self.im[order]
        if conjugate:
            im = -im
        return ExactSparse((self.shape[1], self.shape[0]), indptr, rows[order], self.re[order], im, self.den,
                           normalize=False)

    @property
    def H(self) -> "ExactSparse":
        return self.transpose(conjugate=True)

    def diagonal_similarity(self, weights: np.ndarray) -> "ExactSparse":
        """``diag(w)^{-1} @ self @ diag(w)`` for positive integer weights ``w``.

        Done entrywise: ``(r, c) ↦ a_rc · w_c / w_r``, over the common
        denominator ``lcm(w)``.
        """
        w = np.asarray(weights, dtype=np.int64)
        R = int(np.lcm.reduce(w)) if w.size else 1
        rows = self.rows_of()
        factor = w[self.indices] * (R // w[rows])
        if self.re.dtype != object and self._max_abs() * int(factor.max(initial=1)) < _SAFE:
            re, im = self.re * factor, self.im * factor
        else:
            re = _int_array(int(a) * int(f) for a, f in zip(self.re, factor))
            im = _int_array(int(a) * int(f) for a, f in zip(self.im, factor))
        return ExactSparse(self.shape, self.indptr, self.indices, re, im, self.den * R)

    def entries(self) -> dict:
        """``{(row, col): QQ_I}`` of the nonzero entries."""
        out = {}
        rows = self.rows_of()
        for r, c, a, b in zip(rows, self.indices, self.re, self.im):
            out[(int(r), int(c))] = QQ_I(QQ(int(a), self.den), QQ(int(b), self.den))
        return out

    def to_rows(self) -> list[list]:
        rows = [[QQ_I(0, 0)] * self.shape[1] for _ in range(self.shape[0])]
        for (r, c), v in self.entries().items():
            rows[r][c] = v
        return rows

    def apply(self, vec: list) -> list:
        """Matrix-vector product with a list of Gaussian rationals."""
        out = [QQ_I(0, 0)] * self.shape[0]
        for (r, c), v in self.entries().items():
            if vec[c]:
                out[r] = out[r] + v * vec[c]
        return out

    def frobenius(self) -> float:
        if self.re.size == 0:
            return 0.0
        re = np.array([float(x) for x in self.re])
        im = np.array([float(x) for x in self.im])
        return float(np.sqrt(np.sum(re * re + im * im)) / self.den)

    def __eq__(self, other):
        if not isinstance(other, ExactSparse):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    def __repr__(self):
        return f"ExactSparse(shape={self.shape}, nnz={self.nnz}, den={self.den})"
