"""Exact exterior algebra of a finite-dimensional real vector space.

Basis elements ``e_I`` are indexed by strictly increasing 1-based tuples.
Coefficients are exact scalars (QQ, QQ_I, or :class:`~hodgekit.scalars.Surd`).
The metric enters only through its Gram matrix on the chosen basis; the
inner product on ``Λ^p`` is the Gram determinant of the factors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

from . import linalg
from .scalars import (
    QQ,
    QQ_I,
    Surd,
    exact_sqrt,
    rational_from_json,
    rational_to_json,
    re_im,
    to_rational,
)

MultiIndex = tuple


def check_index(I: Iterable[int], m: int) -> MultiIndex:
    I = tuple(int(i) for i in I)
    if any(a >= b for a, b in zip(I, I[1:])):
        raise ValueError(f"multi-index {I} is not strictly increasing")
    if I and (I[0] < 1 or I[-1] > m):
        raise ValueError(f"multi-index {I} out of range 1..{m}")
    return I


@lru_cache(maxsize=None)
def multi_indices(m: int, p: int | None = None) -> tuple[MultiIndex, ...]:
    """All increasing multi-indices of 1..m (of length p, or every length by degree)."""
    if p is not None:
        if p < 0 or p > m:
            return ()
        return tuple(combinations(range(1, m + 1), p))
    return tuple(I for q in range(m + 1) for I in combinations(range(1, m + 1), q))


@lru_cache(maxsize=None)
def merge_sign(I: MultiIndex, J: MultiIndex) -> tuple[int, MultiIndex]:
    """``e_I ∧ e_J = sign · e_K``; sign is 0 when I and J overlap."""
    if set(I) & set(J):
        return 0, ()
    # each pair (i in I, j in J) with i > j is one transposition
    inversions = sum(1 for i in I for j in J if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(I + J))


def complement(I: MultiIndex, m: int) -> MultiIndex:
    s = set(I)
    return tuple(i for i in range(1, m + 1) if i not in s)


def complement_sign(I: Iterable[int], m: int) -> tuple[int, MultiIndex]:
    """Sign of the permutation ``(I, CI)`` of ``1..m`` together with ``CI``."""
    I = check_index(I, m)
    CI = complement(I, m)
    sign, _ = merge_sign(I, CI)
    return sign, CI


def _prune(terms: Mapping) -> dict:
    return {I: c for I, c in sorted(terms.items()) if c}


@dataclass(frozen=True, eq=False)
class ExteriorElement:
    """Sparse element ``Σ_I u_I e_I`` of ``Λ(R^m)`` (complexified as needed)."""

    dim: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for I, c in self.terms.items():
            I = check_index(I, self.dim)
            if c:
                clean[I] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def _trusted(cls, dim: int, terms: dict) -> "ExteriorElement":
        # keys already valid: skip index checks, keep the canonical order
        obj = object.__new__(cls)
        object.__setattr__(obj, "dim", dim)
        object.__setattr__(obj, "terms", {I: c for I, c in sorted(terms.items()) if c})
        return obj

    # construction -------------------------------------------------------
    @classmethod
    def basis(cls, dim: int, I: Iterable[int], coeff=QQ(1)) -> "ExteriorElement":
        return cls(dim, {tuple(I): coeff})

    @classmethod
    def scalar(cls, dim: int, c=QQ(1)) -> "ExteriorElement":
        return cls(dim, {(): c})

    @classmethod
    def zero(cls, dim: int) -> "ExteriorElement":
        return cls(dim, {})

    @classmethod
    def one_form(cls, dim: int, coeffs: Iterable) -> "ExteriorElement":
        return cls(dim, {(i + 1,): c for i, c in enumerate(coeffs)})

    @classmethod
    def top(cls, dim: int, coeff=QQ(1)) -> "ExteriorElement":
        return cls(dim, {tuple(range(1, dim + 1)): coeff})

    # queries ------------------------------------------------------------
    def coeff(self, I) -> object:
        return self.terms.get(tuple(I), QQ(0))

    def degrees(self) -> set[int]:
        return {len(I) for I in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds.pop() if ds else 0

    def part(self, p: int) -> "ExteriorElement":
        return ExteriorElement(self.dim, {I: c for I, c in self.terms.items() if len(I) == p})

    def is_zero(self) -> bool:
        return not self.terms

    def map_coeffs(self, f) -> "ExteriorElement":
        return ExteriorElement._trusted(self.dim, {I: f(c) for I, c in self.terms.items()})

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "ExteriorElement"):
        if not isinstance(other, ExteriorElement):
            raise TypeError("expected an ExteriorElement")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for I, c in other.terms.items():
            out[I] = out[I] + c if I in out else c
        return ExteriorElement._trusted(self.dim, out)

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, ExteriorElement):
            return wedge(self, c)
        return self.map_coeffs(lambda x: x * c)

    def __rmul__(self, c):
        return self.map_coeffs(lambda x: c * x)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        if self.dim != other.dim or self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[I] == other.terms[I] for I in self.terms)

    def __repr__(self):
        if not self.terms:
            return f"ExteriorElement({self.dim}, 0)"
        body = " + ".join(f"({c})e{''.join(map(str, I)) or '∅'}" for I, c in self.terms.items())
        return f"ExteriorElement({self.dim}, {body})"

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"dim": self.dim, "terms": [_coeff_to_json(I, c) for I, c in self.terms.items()]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ExteriorElement":
        dim = int(obj["dim"])
        terms = {}
        for t in obj["terms"]:
            terms[tuple(t["index"])] = _coeff_from_json(t)
        return cls(dim, terms)


def _coeff_to_json(I, c) -> dict:
    out = {"index": list(I)}
    if isinstance(c, Surd):
        out.update(rational_to_json(c.a))
        out["surd"] = {**rational_to_json(c.b), "radicand": c.d}
        return out
    re, im = re_im(c)
    out.update(rational_to_json(re))
    if im:
        out["im"] = rational_to_json(im)
    return out


def _coeff_from_json(t: Mapping):
    c = rational_from_json(t)
    if "surd" in t:
        s = t["surd"]
        return Surd(c, rational_from_json(s), int(s["radicand"]))
    if "im" in t:
        return QQ_I(c, rational_from_json(t["im"]))
    return c


def wedge(u: ExteriorElement, v: ExteriorElement) -> ExteriorElement:
    """Bilinear extension of ``e_I ∧ e_J = ±e_{I∪J}``."""
    u._check(v)
    out: dict = {}
    for I, a in u.terms.items():
        for J, b in v.terms.items():
            s, K = merge_sign(I, J)
            if s == 0:
                continue
            c = a * b if s > 0 else -(a * b)
            out[K] = out[K] + c if K in out else c
    return ExteriorElement._trusted(u.dim, out)


def wedge_all(elems: Iterable[ExteriorElement], dim: int) -> ExteriorElement:
    out = ExteriorElement.scalar(dim)
    for e in elems:
        out = wedge(out, e)
    return out


def pushforward(u: ExteriorElement, images: list[ExteriorElement], target_dim: int) -> ExteriorElement:
    """Apply the algebra map induced by ``e_i ↦ images[i-1]`` (1-forms in the target)."""
    out = ExteriorElement.zero(target_dim)
    for I, c in u.terms.items():
        out = out + c * wedge_all((images[i - 1] for i in I), target_dim)
    return out


# ---------------------------------------------------------------------------
# metric and orientation


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """Positive definite symmetric Gram matrix of the chosen basis (exact rationals)."""

    gram: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_rational(x) for x in row) for row in self.gram)
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise ValueError("Gram matrix must be square")
        if not linalg.is_symmetric(rows):
            raise ValueError("Gram matrix must be symmetric")
        if not linalg.sylvester([list(r) for r in rows]).positive:
            raise ValueError("Gram matrix must be positive definite")
        object.__setattr__(self, "gram", rows)
        object.__setattr__(self, "_minors", {})

    @classmethod
    def euclidean(cls, m: int) -> "MetricSpec":
        return cls(tuple(tuple(QQ(int(i == j)) for j in range(m)) for i in range(m)))

    @property
    def dim(self) -> int:
        return len(self.gram)

    def is_euclidean(self) -> bool:
        return all(self.gram[i][j] == (i == j) for i in range(self.dim) for j in range(self.dim))

    def minor(self, I: MultiIndex, J: MultiIndex):
        """``det ||<e_i, e_j>||`` for i in I, j in J: the inner product of e_I and e_J."""
        key = (I, J)
        cache = self._minors
        if key not in cache:
            if len(I) != len(J):
                cache[key] = QQ(0)
            elif not I:
                cache[key] = QQ(1)
            else:
                # Laplace expansion along the first row; smaller minors are cached
                row = self.gram[I[0] - 1]
                total = QQ(0)
                for k, j in enumerate(J):
                    a = row[j - 1]
                    if a:
                        t = a * self.minor(I[1:], J[:k] + J[k + 1:])
                        total = total - t if k % 2 else total + t
                cache[key] = total
        return cache[key]

    @property
    def determinant(self):
        I = tuple(range(1, self.dim + 1))
        return self.minor(I, I)

    def __eq__(self, other):
        return isinstance(other, MetricSpec) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def to_json(self) -> dict:
        return {"dim": self.dim, "gram": [[rational_to_json(x) for x in r] for r in self.gram]}

    @classmethod
    def from_json(cls, obj) -> "MetricSpec":
        rows = obj["gram"] if isinstance(obj, Mapping) else obj
        return cls(tuple(tuple(rational_from_json(x) for x in r) for r in rows))


@dataclass(frozen=True)
class OrientationSpec:
    """Orientation relative to ``e_1 ∧ … ∧ e_m``."""

    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("orientation sign must be +1 or -1")


def inner_product(u: ExteriorElement, v: ExteriorElement, g: MetricSpec):
    """Gram-determinant inner product, extended bilinearly; distinct degrees are orthogonal."""
    u._check(v)
    if g.dim != u.dim:
        raise ValueError("metric dimension mismatch")
    total = QQ(0)
    for I, a in u.terms.items():
        for J, b in v.terms.items():
            if len(I) != len(J):
                continue
            gij = g.minor(I, J)
            if gij:
                total = a * b * gij + total
    return total


def dual_metric(gram) -> MetricSpec:
    """Metric on the dual space: the exact inverse of a positive definite Gram matrix."""
    if isinstance(gram, MetricSpec):
        gram = gram.gram
    rows = [[to_rational(x) for x in r] for r in gram]
    if not linalg.is_symmetric(rows):
        raise ValueError("input must be symmetric")
    if not linalg.det(rows):
        raise ValueError("input is singular")
    return MetricSpec(tuple(tuple(r) for r in linalg.inverse(rows)))


def _inv_sqrt_det(g: MetricSpec):
    return QQ(1) / exact_sqrt(g.determinant)


def volume_element(g: MetricSpec, o: OrientationSpec = OrientationSpec()) -> ExteriorElement:
    """Unit-norm top form in the orientation component ``o``."""
    c = _inv_sqrt_det(g)
    return ExteriorElement.top(g.dim, c if o.sign > 0 else -c)


@lru_cache(maxsize=256)
def _star_table(g: MetricSpec, sign: int) -> dict:
    # ⋆e_J = (o/√det g) Σ_I ε(I,CI) <e_I,e_J> e_CI  solves u∧⋆v = <u,v> dV on the basis
    m = g.dim
    scale = _inv_sqrt_det(g)
    if sign < 0:
        scale = -scale
    table = {}
    for J in multi_indices(m):
        terms = {}
        for I in multi_indices(m, len(J)):
            gij = g.minor(I, J)
            if not gij:
                continue
            s, CI = complement_sign(I, m)
            terms[CI] = scale * gij if s > 0 else -(scale * gij)
        table[J] = ExteriorElement._trusted(m, terms)
    return table


def hodge_star(u: ExteriorElement, g: MetricSpec, o: OrientationSpec = OrientationSpec()) -> ExteriorElement:
    """Hodge star, linear across degrees.

    For an orthonormal basis this is ``e_I ↦ ε(I, CI) e_CI``.  For a general
    Gram matrix the coefficients pick up ``1/sqrt(det g)``, which is kept
    exact as a :class:`~hodgekit.scalars.Surd` when irrational.
    """
    if g.dim != u.dim:
        raise ValueError("metric dimension mismatch")
    table = _star_table(g, o.sign)
    out: dict = {}
    for J, c in u.terms.items():
        for K, t in table[J].terms.items():
            x = c * t
            out[K] = out[K] + x if K in out else x
    return ExteriorElement._trusted(u.dim, out)


def star_star_sign(p: int, m: int) -> int:
    return -1 if (p * (m - p)) % 2 else 1
