"""Small exact linear-algebra helpers over QQ and QQ_I.

Matrices are plain nested lists (row-major) of QQ / QQ_I scalars; the heavy
lifting (determinants, rref, inverses) is delegated to sympy's DomainMatrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy.polys.matrices import DomainMatrix

from .scalars import QQ, QQ_I, conj, re_im, to_gauss

_GAUSS = type(QQ_I(0, 1))


def _domain_of(rows):
    for row in rows:
        for x in row:
            if isinstance(x, _GAUSS):
                return QQ_I
    return QQ


def to_domain(rows, domain=None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    K = domain or _domain_of(rows)
    conv = [[K.convert(x) for x in r] for r in rows]
    return DomainMatrix(conv, (nrows, ncols), K)


def det(rows):
    if not rows:
        return QQ(1)
    return to_domain(rows).det()


def inverse(rows):
    M = to_domain(rows)
    if M.rank() < M.shape[0]:
        raise ValueError("matrix is singular")
    return M.inv().to_list()


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return to_domain(rows).rank()


def kernel_basis(rows, ncols: int | None = None, domain=None) -> list[list]:
    """Basis of the right kernel ``{x : A x = 0}`` from the reduced row echelon form.

    Each basis vector has a 1 in its free column and 0 in the other free
    columns, which makes the result deterministic.
    """
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        K = domain or QQ
        return [[K.one if i == j else K.zero for i in range(ncols)] for j in range(ncols)]
    M = to_domain(rows, domain)
    ncols = M.shape[1]
    K = M.domain
    R, pivots = M.rref()
    R = R.to_list()
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [K.zero] * ncols
        v[f] = K.one
        for r, p in enumerate(pivots):
            v[p] = -R[r][f]
        basis.append(v)
    return basis


def matmul(A, B):
    return (to_domain(A, QQ_I) * to_domain(B, QQ_I)).to_list()


def conj_transpose(A):
    return [[conj(A[i][j]) for i in range(len(A))] for j in range(len(A[0]))]


def _same(a, b) -> bool:
    # sympy never equates QQ and QQ_I elements, so compare mixed pairs as Gaussian
    if type(a) is type(b):
        return a == b
    return to_gauss(a) == to_gauss(b)


def is_hermitian(A) -> bool:
    n = len(A)
    return all(_same(A[i][j], conj(A[j][i])) for i in range(n) for j in range(i, n))


def is_symmetric(A) -> bool:
    n = len(A)
    return all(_same(A[i][j], A[j][i]) for i in range(n) for j in range(i + 1, n))


def leading_minors(A) -> list:
    """Leading principal minors ``det A[:k,:k]`` for k = 1..n (exact)."""
    return [det([row[:k] for row in A[:k]]) for k in range(1, len(A) + 1)]


@dataclass(frozen=True)
class Definiteness:
    """Verdict of a definiteness test; ``method`` is ``"exact"`` or ``"approximate"``."""

    positive: bool
    minors: tuple
    method: str = "exact"

    def __bool__(self):
        return self.positive


def sylvester(A) -> Definiteness:
    """Exact Sylvester test for a Hermitian (or real symmetric) matrix.

    Raises ``ValueError`` for non-Hermitian input.  The empty matrix counts
    as positive definite.
    """
    if not is_hermitian(A):
        raise ValueError("matrix is not Hermitian")
    minors = []
    for m in leading_minors(A):
        re, im = re_im(m)
        if im:
            raise ArithmeticError("Hermitian minor with nonzero imaginary part")
        minors.append(re)
    return Definiteness(all(m > 0 for m in minors), tuple(minors))


def positive_definite_float(A, tol: float = 1e-9) -> Definiteness:
    """Eigenvalue test for inexact (float/irrational) input; tagged approximate."""
    M = np.asarray(A, dtype=complex)
    if not np.allclose(M, M.conj().T, atol=tol):
        raise ValueError("matrix is not Hermitian")
    w = np.linalg.eigvalsh(M) if M.size else np.zeros(0)
    return Definiteness(bool(np.all(w > tol)), tuple(float(x) for x in w), "approximate")


def is_positive_definite(A) -> Definiteness:
    """Dispatch: exact minors for QQ/QQ_I/int entries, eigenvalues for floats."""
    if any(isinstance(x, float) for row in A for x in row):
        return positive_definite_float(A)
    return sylvester([[to_gauss(x) if isinstance(x, complex) else x for x in row] for row in A])


def _as_float(v):
    out = []
    for x in v:
        re, im = re_im(x)
        out.append(complex(float(re), float(im)))
    return out


def orthogonal_projector(basis) -> np.ndarray:
    """Orthogonal projector (float, standard Hermitian inner product) onto span(basis)."""
    B = np.array([_as_float(v) for v in basis], dtype=complex).T
    if B.size == 0:
        return None
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    r = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    U = U[:, :r]
    return U @ U.conj().T


def gap_distance(basis_a, basis_b, dim: int) -> float:
    """Operator 2-norm of the difference of orthogonal projectors onto two spans."""
    Pa = orthogonal_projector(basis_a) if basis_a else np.zeros((dim, dim))
    Pb = orthogonal_projector(basis_b) if basis_b else np.zeros((dim, dim))
    return float(np.linalg.norm(Pa - Pb, 2))
