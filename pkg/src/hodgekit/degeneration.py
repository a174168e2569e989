"""Intersection matrices of contracted fibres and limits of primitive subspaces.

``contractibility_check`` decides whether ``(−1)^m E`` is positive definite
for the intersection matrix ``E`` of the middle-dimensional components of
a contracted fibre.  ``primitive_limit`` follows ``P_{M+εL} = ker(M+εL)``
in the middle degree of a ring as ``ε → 0`` and compares it with ``ker M``.
Subspaces are computed exactly; only the gap distances are floats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import linalg
from .lefschetz import GradedRing, _check_lefschetz_class, hard_lefschetz_check, lefschetz_matrix
from .scalars import QQ, QQ_I, gauss_to_json, rational_from_json, to_gauss, to_rational

GAP_TOL = 1e-9


@dataclass(frozen=True)
class IntersectionMatrix:
    """Symmetric rational matrix ``E_j·E_k`` of m-dimensional cycles on a 2m-fold."""

    m: int
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_rational(x) for x in row) for row in self.entries)
        r = len(rows)
        if any(len(row) != r for row in rows):
            raise ValueError("intersection matrix must be square")
        if not linalg.is_symmetric(rows):
            raise ValueError("intersection matrix must be symmetric")
        if self.m < 1:
            raise ValueError("half-dimension m must be positive")
        object.__setattr__(self, "entries", rows)

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {"m": self.m, "entries": [[_rat_out(x) for x in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "IntersectionMatrix":
        return cls(int(obj["m"]), tuple(tuple(rational_from_json(x) for x in row) for row in obj["entries"]))


def _rat_out(x):
    x = to_rational(x)
    return int(x.numerator) if x.denominator == 1 else f"{int(x.numerator)}/{int(x.denominator)}"


@dataclass(frozen=True)
class ContractibilityVerdict:
    m: int
    twisted: tuple
    minors: tuple
    consistent: bool

    @property
    def verdict(self) -> str:
        return "consistent with contraction" if self.consistent else "inconsistent"

    def to_json(self) -> dict:
        return {
            "relation": "grmu",
            "m": self.m,
            "twisted_matrix": [[_rat_out(x) for x in row] for row in self.twisted],
            "minors": [_rat_out(x) for x in self.minors],
            "verdict": self.verdict,
            "passed": self.consistent,
        }


def contractibility_check(M: IntersectionMatrix) -> ContractibilityVerdict:
    s = -1 if M.m % 2 else 1
    twisted = tuple(tuple(x * s for x in row) for row in M.entries)
    result = linalg.sylvester([list(r) for r in twisted])
    return ContractibilityVerdict(M.m, twisted, result.minors, result.positive)


# ---------------------------------------------------------------------------
# primitive limits


@dataclass
class LimitStep:
    eps: object
    basis: list
    dim: int
    gap: float

    def to_json(self) -> dict:
        return {
            "eps": _rat_out(self.eps),
            "dim": self.dim,
            "basis": [[gauss_to_json(x) for x in v] for v in self.basis],
            "gap_distance": self.gap,
        }


@dataclass
class PrimitiveLimitTrace:
    ring: str
    middle_degree: int
    expected_dim: int
    steps: list
    limit_basis: list
    hl_L: bool
    hl_M: bool
    limit_dim_ok: bool
    polarization_matrix: list
    polarization: linalg.Definiteness | None
    exceptional: dict = field(default_factory=dict)

    @property
    def dims_constant(self) -> bool:
        return all(s.dim == self.expected_dim for s in self.steps)

    @property
    def monotone(self) -> bool:
        gaps = [s.gap for s in self.steps]
        return all(b <= a + GAP_TOL for a, b in zip(gaps, gaps[1:]))

    @property
    def polarization_ok(self) -> bool:
        return self.polarization is not None and self.polarization.positive

    @property
    def passed(self) -> bool:
        exc_ok = all(v for k, v in self.exceptional.items() if k in ("in_primitive", "positive"))
        return (self.hl_L and self.dims_constant and self.monotone and self.limit_dim_ok
                and self.polarization_ok and exc_ok)

    def to_json(self) -> dict:
        return {
            "relation": "apprxu",
            "ring": self.ring,
            "middle_degree": self.middle_degree,
            "expected_dim": self.expected_dim,
            "hard_lefschetz_L": self.hl_L,
            "hard_lefschetz_M": self.hl_M,
            "steps": [s.to_json() for s in self.steps],
            "limit_basis": [[gauss_to_json(x) for x in v] for v in self.limit_basis],
            "dims_constant": self.dims_constant,
            "gaps_monotone": self.monotone,
            "limit_dim_ok": self.limit_dim_ok,
            "polarization_matrix": [[gauss_to_json(x) for x in r] for r in self.polarization_matrix],
            "polarization_positive": self.polarization_ok,
            "exceptional": self.exceptional,
            "passed": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _middle_kernel(ring: GradedRing, cls: Sequence, deg: int) -> tuple[list[int], list[list]]:
    src = ring.positions(deg)
    dst = ring.positions(deg + 2)
    A = lefschetz_matrix(ring, cls, 1, src, dst)
    return src, linalg.kernel_basis(A, ncols=len(src))


def primitive_limit(
    ring: GradedRing,
    M,
    L,
    eps: Iterable,
    exceptional: Sequence | None = None,
) -> PrimitiveLimitTrace:
    """Trace ``P_{M+εL}`` in the middle degree ``2m`` (ring dimension ``n = 2m``).

    ``exceptional`` optionally lists classes ``[E_j]`` expected to lie in
    ``P_M``; they are checked for membership and for positivity of
    ``(−1)^m ∫ E_j E_k``.  Their linear independence is a hypothesis on the
    input and is checked only as nondegeneracy of that matrix.
    """
    if ring.n % 2:
        raise ValueError("the ring must have even complex dimension 2m")
    m = ring.n // 2
    deg = 2 * m
    M = _check_lefschetz_class(ring, M)
    L = _check_lefschetz_class(ring, L)
    eps = [to_rational(e) for e in eps]
    if any(e <= 0 for e in eps):
        raise ValueError("ε values must be positive")
    hl_L = hard_lefschetz_check(ring, L).passed
    if not hl_L:
        raise ValueError("Hard Lefschetz fails for L")
    hl_M = hard_lefschetz_check(ring, M).passed
    b = ring.betti(deg) - ring.betti(deg - 2)

    src, limit = _middle_kernel(ring, M, deg)
    steps = []
    for e in eps:
        cls = [x + y * QQ_I(e, 0) for x, y in zip(M, L)]
        _, K = _middle_kernel(ring, cls, deg)
        steps.append(LimitStep(e, K, len(K), linalg.gap_distance(K, limit, len(src))))

    sign = -1 if m % 2 else 1
    full = [_embed(ring, v, src) for v in limit]
    # C is the identity on rational (m,m) classes, so Ψ̃ = Ψ = (−1)^m ∫ x·y there
    weil_ok = all(ring.bidegree_of(v) <= {(m, m)} for v in full)
    P = [[ring.integrate(ring.mul(x, y)) * sign for y in full] for x in full]
    pol = linalg.sylvester(P) if (P and weil_ok and linalg.is_hermitian(P)) else None

    exc = {}
    if exceptional:
        E = [ring.element(v) for v in exceptional]
        Mx = [ring.mul(M, v) for v in E]
        exc["in_primitive"] = all(not any(v) for v in Mx)
        G = [[ring.integrate(ring.mul(x, y)) * sign for y in E] for x in E]
        exc["matrix"] = [[gauss_to_json(x) for x in r] for r in G]
        exc["positive"] = linalg.is_hermitian(G) and linalg.sylvester(G).positive
    return PrimitiveLimitTrace(ring.name, deg, b, steps, full, hl_L, hl_M,
                               (len(limit) == b) if hl_M else True, P, pol, exc)


def _embed(ring: GradedRing, coords, positions):
    vec = [QQ_I(0, 0)] * ring.dim
    for c, i in zip(coords, positions):
        vec[i] = to_gauss(c)
    return vec


def geometric_eps(count: int, ratio=QQ(1, 2)) -> list:
    """``ratio^j`` for j = 1..count."""
    return [to_rational(ratio) ** j for j in range(1, count + 1)]
