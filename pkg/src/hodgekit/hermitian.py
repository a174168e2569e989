"""Complexified exterior algebra of ``C^n``: bigrading, Hermitian forms, star and Weil operator.

Real cotangent basis is ordered ``(x_1*, y_1*, …, x_n*, y_n*)`` (real index
``2j-1`` and ``2j``), which is the standard orientation.  Bigraded elements
are stored as coefficients of ``dz_I ∧ dz̄_J`` with all holomorphic factors
first; internally they are exterior elements over the ``2n`` generators
``(dz_1, …, dz_n, dz̄_1, …, dz̄_n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Mapping

from . import linalg
from .exterior import (
    ExteriorElement,
    MetricSpec,
    OrientationSpec,
    check_index,
    dual_metric,
    hodge_star,
    inner_product,
    pushforward,
    volume_element,
    wedge,
)
from .scalars import (
    QQ,
    QQ_I,
    conj,
    gauss_from_json,
    gauss_to_json,
    i_power,
    re_im,
    to_gauss,
)

HALF = QQ(1, 2)


def _split(K: tuple, n: int) -> tuple[tuple, tuple]:
    return tuple(k for k in K if k <= n), tuple(k - n for k in K if k > n)


def _join(I: tuple, J: tuple, n: int) -> tuple:
    return tuple(I) + tuple(j + n for j in J)


@dataclass(frozen=True, eq=False)
class BigradedElement:
    """Sparse ``Σ u_{IJ} dz_I ∧ dz̄_J`` with Gaussian-rational coefficients."""

    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (I, J), c in self.terms.items():
            key = (check_index(I, self.n), check_index(J, self.n))
            c = to_gauss(c)
            if c:
                clean[key] = clean[key] + c if key in clean else c
        object.__setattr__(self, "terms", {k: v for k, v in sorted(clean.items()) if v})

    @classmethod
    def basis(cls, n: int, I=(), J=(), coeff=QQ_I(1, 0)) -> "BigradedElement":
        return cls(n, {(tuple(I), tuple(J)): coeff})

    @classmethod
    def zero(cls, n: int) -> "BigradedElement":
        return cls(n, {})

    @classmethod
    def dz(cls, n: int, j: int) -> "BigradedElement":
        return cls.basis(n, (j,), ())

    @classmethod
    def dzbar(cls, n: int, j: int) -> "BigradedElement":
        return cls.basis(n, (), (j,))

    # generator-basis view ------------------------------------------------
    def to_exterior(self) -> ExteriorElement:
        return ExteriorElement(2 * self.n, {_join(I, J, self.n): c for (I, J), c in self.terms.items()})

    @classmethod
    def from_exterior(cls, n: int, e: ExteriorElement) -> "BigradedElement":
        if e.dim != 2 * n:
            raise ValueError("dimension mismatch")
        return cls(n, {_split(K, n): c for K, c in e.terms.items()})

    # queries ------------------------------------------------------------
    def bidegrees(self) -> set[tuple[int, int]]:
        return {(len(I), len(J)) for I, J in self.terms}

    @property
    def bidegree(self) -> tuple[int, int]:
        b = self.bidegrees()
        if len(b) != 1:
            raise ValueError("element is not of pure type")
        return b.pop()

    def coeff(self, I=(), J=()):
        return self.terms.get((tuple(I), tuple(J)), QQ_I(0, 0))

    def is_zero(self) -> bool:
        return not self.terms

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, BigradedElement):
            raise TypeError("expected a BigradedElement")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return BigradedElement(self.n, out)

    def __neg__(self):
        return BigradedElement(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, BigradedElement):
            return self.wedge(c)
        c = to_gauss(c)
        return BigradedElement(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return self.wedge(other)

    def wedge(self, other: "BigradedElement") -> "BigradedElement":
        self._check(other)
        return BigradedElement.from_exterior(self.n, wedge(self.to_exterior(), other.to_exterior()))

    def __eq__(self, other):
        if not isinstance(other, BigradedElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return f"BigradedElement({self.n}, 0)"
        parts = []
        for (I, J), c in self.terms.items():
            b = "∧".join([f"dz{i}" for i in I] + [f"dz̄{j}" for j in J]) or "1"
            parts.append(f"({c}){b}")
        return f"BigradedElement({self.n}, {' + '.join(parts)})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"I": list(I), "J": list(J), **gauss_to_json(c)} for (I, J), c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "BigradedElement":
        return cls(int(obj["n"]), {(tuple(t["I"]), tuple(t["J"])): gauss_from_json(t) for t in obj["terms"]})


@dataclass(frozen=True, eq=False)
class RealForm:
    """Element over the real basis ``(x_1*, y_1*, …)`` with Gaussian-rational coefficients."""

    n: int
    element: ExteriorElement

    def __post_init__(self):
        if self.element.dim != 2 * self.n:
            raise ValueError("real form must live in dimension 2n")

    @property
    def is_real(self) -> bool:
        return all(re_im(c)[1] == 0 for c in self.element.terms.values())

    def __eq__(self, other):
        return isinstance(other, RealForm) and self.n == other.n and self.element == other.element

    @classmethod
    def basis(cls, n: int, I, coeff=QQ_I(1, 0)) -> "RealForm":
        return cls(n, ExteriorElement.basis(2 * n, I, to_gauss(coeff)))

    @classmethod
    def dx(cls, n: int, j: int) -> "RealForm":
        return cls.basis(n, (2 * j - 1,))

    @classmethod
    def dy(cls, n: int, j: int) -> "RealForm":
        return cls.basis(n, (2 * j,))


# ---------------------------------------------------------------------------
# basis changes


@lru_cache(maxsize=None)
def _real_to_generators(n: int) -> tuple:
    # dx_j = ½(dz_j + dz̄_j),  dy_j = (1/2i)(dz_j − dz̄_j)
    imgs = []
    for j in range(1, n + 1):
        imgs.append(ExteriorElement(2 * n, {(j,): QQ_I(HALF, 0), (n + j,): QQ_I(HALF, 0)}))
        imgs.append(ExteriorElement(2 * n, {(j,): QQ_I(0, -HALF), (n + j,): QQ_I(0, HALF)}))
    return tuple(imgs)


@lru_cache(maxsize=None)
def _generators_to_real(n: int) -> tuple:
    # dz_j = dx_j + i dy_j,  dz̄_j = dx_j − i dy_j
    hol = [ExteriorElement(2 * n, {(2 * j - 1,): QQ_I(1, 0), (2 * j,): QQ_I(0, 1)}) for j in range(1, n + 1)]
    anti = [ExteriorElement(2 * n, {(2 * j - 1,): QQ_I(1, 0), (2 * j,): QQ_I(0, -1)}) for j in range(1, n + 1)]
    return tuple(hol + anti)


def to_complex_basis(u: RealForm) -> BigradedElement:
    e = u.element.map_coeffs(to_gauss)
    return BigradedElement.from_exterior(u.n, pushforward(e, list(_real_to_generators(u.n)), 2 * u.n))


def to_real_basis(v: BigradedElement) -> RealForm:
    return RealForm(v.n, pushforward(v.to_exterior(), list(_generators_to_real(v.n)), 2 * v.n))


def project_bidegree(u: BigradedElement, p: int, q: int) -> BigradedElement:
    return BigradedElement(u.n, {(I, J): c for (I, J), c in u.terms.items() if len(I) == p and len(J) == q})


def conjugate(u: BigradedElement) -> BigradedElement:
    """Antilinear involution exchanging ``Λ^{p,q}`` and ``Λ^{q,p}``."""
    out = {}
    for (I, J), c in u.terms.items():
        s = -1 if (len(I) * len(J)) % 2 else 1
        out[(J, I)] = conj(c) * s
    return BigradedElement(u.n, out)


def weil_apply(u: BigradedElement) -> BigradedElement:
    """Multiply each ``(p,q)`` component by ``i^(p-q)``."""
    return BigradedElement(u.n, {(I, J): c * i_power(len(I) - len(J)) for (I, J), c in u.terms.items()})


# ---------------------------------------------------------------------------
# Hermitian forms


@dataclass(frozen=True, eq=False)
class HermitianForm:
    """``h_{jk} = h(e_j, e_k)`` with ``h_{jk} = conj(h_{kj})``, exact Gaussian rationals."""

    h: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_gauss(x) for x in r) for r in self.h)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("Hermitian matrix must be square")
        if not linalg.is_hermitian([list(r) for r in rows]):
            raise ValueError("matrix is not Hermitian")
        object.__setattr__(self, "h", rows)

    @classmethod
    def identity(cls, n: int) -> "HermitianForm":
        return cls(tuple(tuple(QQ_I(int(i == j), 0) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.h)

    def __eq__(self, other):
        return isinstance(other, HermitianForm) and self.h == other.h

    def __hash__(self):
        return hash(self.h)

    def is_positive_definite(self) -> bool:
        return linalg.sylvester([list(r) for r in self.h]).positive

    def require_metric(self):
        if not self.is_positive_definite():
            raise ValueError("Hermitian form is not positive definite")

    def real_gram(self) -> list[list]:
        """Gram matrix of ``S_h = Re h`` on the real basis ``(e_1, i e_1, …, e_n, i e_n)``."""
        n = self.n
        G = [[QQ(0)] * (2 * n) for _ in range(2 * n)]
        for j in range(n):
            for k in range(n):
                a, b = re_im(self.h[j][k])
                G[2 * j][2 * k] = a
                G[2 * j][2 * k + 1] = b
                G[2 * j + 1][2 * k] = -b
                G[2 * j + 1][2 * k + 1] = a
        return G

    def cotangent_metric(self) -> MetricSpec:
        """Dual metric ``S_h*`` on the real cotangent basis ``(x_1*, y_1*, …)``."""
        return _cotangent_metric(self)

    def to_json(self) -> dict:
        return {"n": self.n, "h": [[gauss_to_json(x) for x in r] for r in self.h]}

    @classmethod
    def from_json(cls, obj) -> "HermitianForm":
        rows = obj["h"] if isinstance(obj, Mapping) else obj
        return cls(tuple(tuple(gauss_from_json(x) for x in r) for r in rows))


@lru_cache(maxsize=64)
def _cotangent_metric(h: HermitianForm) -> MetricSpec:
    h.require_metric()
    return dual_metric(h.real_gram())


STANDARD_ORIENTATION = OrientationSpec(1)


def associated_form(h: HermitianForm) -> BigradedElement:
    """``ω_h = (i/2) Σ h_{jk} dz_j ∧ dz̄_k``, a real (1,1)-form."""
    half_i = QQ_I(0, HALF)
    return BigradedElement(h.n, {((j + 1,), (k + 1,)): half_i * h.h[j][k] for j in range(h.n) for k in range(h.n)})


def is_real_element(u: BigradedElement) -> bool:
    return conjugate(u) == u


def hermitian_inner(u: BigradedElement, v: BigradedElement, h: HermitianForm):
    """``<u, v> = g*(u, v̄)``; Hermitian, with distinct bidegrees orthogonal."""
    u._check(v)
    if h.n != u.n:
        raise ValueError("dimension mismatch")
    g = h.cotangent_metric()
    ur = to_real_basis(u).element
    vr = to_real_basis(v).element.map_coeffs(conj)
    return to_gauss(inner_product(ur, vr, g))


def complex_star(u: BigradedElement, h: HermitianForm) -> BigradedElement:
    """C-linear extension of the real star for ``S_h*`` and the standard orientation."""
    if h.n != u.n:
        raise ValueError("dimension mismatch")
    g = h.cotangent_metric()
    s = hodge_star(to_real_basis(u).element, g, STANDARD_ORIENTATION)
    return to_complex_basis(RealForm(u.n, s.map_coeffs(to_gauss)))


def complex_volume(h: HermitianForm) -> BigradedElement:
    dV = volume_element(h.cotangent_metric(), STANDARD_ORIENTATION)
    return to_complex_basis(RealForm(h.n, dV.map_coeffs(to_gauss)))


def wirtinger_volume_check(h: HermitianForm) -> bool:
    """Compare ``ω_h^n / n!`` with the metric volume element, exactly."""
    h.require_metric()
    omega = associated_form(h)
    power = BigradedElement.basis(h.n)
    for _ in range(h.n):
        power = power.wedge(omega)
    lhs = power * QQ_I(QQ(1, factorial(h.n)), 0)
    return lhs == complex_volume(h)
