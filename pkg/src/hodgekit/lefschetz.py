"""Bigraded cohomology rings given by structure constants.

A :class:`GradedRing` is certified when it is built: the product must be
graded-commutative, associative and additive in bidegree, the integral
must live on the top bidegree ``(n, n)``, and the Poincaré pairing must be
nondegenerate.  Ring elements are dense coordinate lists over the basis,
with Gaussian-rational entries.

On top of that sit the Lefschetz checks for a real ``(1,1)`` class ``ω``:
Hard Lefschetz, primitive subspaces and the primitive decomposition,
Hodge–Riemann signatures, polarizations of Hodge structure slices, and
the Hodge diamond.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct
from math import comb
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg
from .scalars import QQ, QQ_I, conj, gauss_to_json, i_power, rational_from_json, re_im, to_gauss

ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)


class RingCertificationError(ValueError):
    """A loaded ring violates one of the structural invariants."""

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant
        self.detail = detail


@dataclass(frozen=True)
class BasisElement:
    name: str
    p: int
    q: int

    @property
    def degree(self) -> int:
        return self.p + self.q


def _sparse(vec: Mapping) -> dict:
    return {k: v for k, v in vec.items() if v}


class GradedRing:
    """Finite-dimensional bigraded ring with an integration functional."""

    def __init__(
        self,
        n: int,
        basis: Sequence[BasisElement],
        mult: Mapping,
        integral: Mapping,
        conjugation: Mapping | None = None,
        kahler: Mapping | None = None,
        name: str = "ring",
        certify: bool = True,
    ):
        self.n = int(n)
        self.name = name
        self.basis = tuple(basis)
        self.index = {b.name: i for i, b in enumerate(self.basis)}
        if len(self.index) != len(self.basis):
            raise RingCertificationError("schema", "duplicate basis names")
        for b in self.basis:
            if not (0 <= b.p <= self.n and 0 <= b.q <= self.n):
                raise RingCertificationError("schema", f"bidegree of {b.name} out of range")
        self.dim = len(self.basis)
        units = [i for i, b in enumerate(self.basis) if (b.p, b.q) == (0, 0)]
        self.unit = units[0] if len(units) == 1 else None

        table = {}
        for (a, b), out in mult.items():
            ia, ib = self._idx(a), self._idx(b)
            table[(ia, ib)] = _sparse({self._idx(k): to_gauss(v) for k, v in out.items()})
        self._table = self._complete_table(table)
        self._integral = _sparse({self._idx(k): to_gauss(v) for k, v in integral.items()})
        if conjugation is None:
            conjugation = {}
        self._conj = {}
        for i, b in enumerate(self.basis):
            if b.name in conjugation:
                self._conj[i] = _sparse({self._idx(k): to_gauss(v) for k, v in conjugation[b.name].items()})
            elif b.p == b.q:
                self._conj[i] = {i: ONE}
            else:
                raise RingCertificationError("conjugation", f"no conjugate given for {b.name} of type ({b.p},{b.q})")
        self.kahler = None if kahler is None else self.element(kahler)
        if certify:
            self.certify()

    # basic access -------------------------------------------------------
    def _idx(self, name) -> int:
        if isinstance(name, int):
            return name
        if name not in self.index:
            raise RingCertificationError("schema", f"unknown basis element {name!r}")
        return self.index[name]

    def _complete_table(self, table: dict) -> dict:
        """Fill in unit products and graded-commutative mirrors; clashes surface in certify()."""
        full = dict(table)
        if self.unit is not None:
            for i in range(self.dim):
                full.setdefault((self.unit, i), {i: ONE})
                full.setdefault((i, self.unit), {i: ONE})
        for (a, b), out in table.items():
            if (b, a) not in full:
                s = -1 if (self.basis[a].degree * self.basis[b].degree) % 2 else 1
                full[(b, a)] = {k: v * s for k, v in out.items()}
        return full

    def element(self, coeffs) -> list:
        """Coordinate vector from ``{name: scalar}`` or an existing vector."""
        if isinstance(coeffs, Mapping):
            vec = [ZERO] * self.dim
            for k, v in coeffs.items():
                vec[self._idx(k)] = vec[self._idx(k)] + to_gauss(v)
            return vec
        vec = [to_gauss(x) for x in coeffs]
        if len(vec) != self.dim:
            raise ValueError("element has the wrong length")
        return vec

    def basis_vector(self, name) -> list:
        vec = [ZERO] * self.dim
        vec[self._idx(name)] = ONE
        return vec

    def one(self) -> list:
        if self.unit is None:
            raise ValueError("ring has no distinguished unit")
        return self.basis_vector(self.unit)

    def mul(self, x: Sequence, y: Sequence) -> list:
        out = [ZERO] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                prod = self._table.get((a, b))
                if prod:
                    c = xa * yb
                    for k, v in prod.items():
                        out[k] = out[k] + c * v
        return out

    def power(self, x: Sequence, r: int) -> list:
        out = self.one()
        for _ in range(r):
            out = self.mul(out, x)
        return out

    def integrate(self, x: Sequence):
        total = ZERO
        for k, v in self._integral.items():
            if x[k]:
                total = total + x[k] * v
        return total

    def conj(self, x: Sequence) -> list:
        out = [ZERO] * self.dim
        for a, xa in enumerate(x):
            if xa:
                c = conj(xa)
                for k, v in self._conj[a].items():
                    out[k] = out[k] + c * v
        return out

    def positions(self, degree: int | None = None, bidegree: tuple | None = None) -> list[int]:
        if bidegree is not None:
            return [i for i, b in enumerate(self.basis) if (b.p, b.q) == tuple(bidegree)]
        return [i for i, b in enumerate(self.basis) if b.degree == degree]

    def betti(self, l: int) -> int:
        return len(self.positions(l))

    def bidegree_of(self, x: Sequence) -> set:
        return {(self.basis[i].p, self.basis[i].q) for i, v in enumerate(x) if v}

    def is_real(self, x: Sequence) -> bool:
        return self.conj(x) == list(x)

    def pairing_matrix(self, left: Sequence[Sequence], right: Sequence[Sequence], weight=None) -> list[list]:
        """``[∫ w·a·b]`` for a in ``left``, b in ``right``; ``w`` defaults to 1."""
        if weight is not None:
            left = [self.mul(weight, a) for a in left]
        return [[self.integrate(self.mul(a, b)) for b in right] for a in left]

    # certification ------------------------------------------------------
    def certify(self):
        basis = self.basis
        for (a, b), out in self._table.items():
            pa, qa = basis[a].p, basis[a].q
            pb, qb = basis[b].p, basis[b].q
            for k in out:
                if (basis[k].p, basis[k].q) != (pa + pb, qa + qb):
                    raise RingCertificationError(
                        "bidegree additivity", f"{basis[a].name}·{basis[b].name} has a term {basis[k].name}")
            s = -1 if (basis[a].degree * basis[b].degree) % 2 else 1
            mirror = self._table.get((b, a), {})
            if {k: v * s for k, v in out.items()} != mirror:
                raise RingCertificationError(
                    "graded commutativity", f"{basis[a].name}·{basis[b].name} vs {basis[b].name}·{basis[a].name}")
        for k in self._integral:
            if (basis[k].p, basis[k].q) != (self.n, self.n):
                raise RingCertificationError("integral support", f"integral is nonzero on {basis[k].name}")
        self._check_associativity()
        self._check_conjugation()
        P = self.pairing_matrix(self._basis_vectors(), self._basis_vectors())
        if not linalg.det(P):
            raise RingCertificationError("Poincaré duality", "the pairing ∫a·b is degenerate")

    def _basis_vectors(self) -> list[list]:
        return [self.basis_vector(i) for i in range(self.dim)]

    def _check_associativity(self):
        nz = {}
        for (a, b), out in self._table.items():
            if out:
                nz.setdefault(a, []).append(b)
        for a, bs in nz.items():
            for b in bs:
                ab = self._table[(a, b)]
                for c in range(self.dim):
                    left = {}
                    for k, v in ab.items():
                        for t, w in self._table.get((k, c), {}).items():
                            left[t] = left.get(t, ZERO) + v * w
                    right = {}
                    for k, v in self._table.get((b, c), {}).items():
                        for t, w in self._table.get((a, k), {}).items():
                            right[t] = right.get(t, ZERO) + v * w
                    if _sparse(left) != _sparse(right):
                        names = ", ".join(self.basis[i].name for i in (a, b, c))
                        raise RingCertificationError("associativity", f"fails on ({names})")
        # products (a·b)·c with a·b = 0 must also vanish from the right
        for b, c in iproduct(range(self.dim), repeat=2):
            bc = self._table.get((b, c))
            if not bc:
                continue
            for a in range(self.dim):
                if self._table.get((a, b)):
                    continue
                acc = {}
                for k, v in bc.items():
                    for t, w in self._table.get((a, k), {}).items():
                        acc[t] = acc.get(t, ZERO) + v * w
                if _sparse(acc):
                    names = ", ".join(self.basis[i].name for i in (a, b, c))
                    raise RingCertificationError("associativity", f"fails on ({names})")

    def _check_conjugation(self):
        for i, b in enumerate(self.basis):
            img = self._conj[i]
            for k in img:
                if (self.basis[k].p, self.basis[k].q) != (b.q, b.p):
                    raise RingCertificationError("conjugation", f"conj({b.name}) is not of type ({b.q},{b.p})")
            if self.conj(self.conj(self.basis_vector(i))) != self.basis_vector(i):
                raise RingCertificationError("conjugation", f"conjugation is not an involution on {b.name}")
        for (a, b), out in self._table.items():
            x, y = self.basis_vector(a), self.basis_vector(b)
            if self.conj(self.mul(x, y)) != self.mul(self.conj(x), self.conj(y)):
                raise RingCertificationError("conjugation", "conjugation is not multiplicative")
        for i in range(self.dim):
            x = self.basis_vector(i)
            if self.integrate(self.conj(x)) != conj(self.integrate(x)):
                raise RingCertificationError("conjugation", "the integral is not real")

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        def out_list(vec: Mapping):
            return [{"name": self.basis[k].name, **_num_json(v)} for k, v in sorted(vec.items())]

        explicit = sorted(k for k in self._table if self.unit not in k and self._table[k])
        obj = {
            "n": self.n,
            "name": self.name,
            "basis": [{"name": b.name, "p": b.p, "q": b.q} for b in self.basis],
            "mult": [{"a": self.basis[a].name, "b": self.basis[b].name, "out": out_list(self._table[(a, b)])}
                     for a, b in explicit],
            "integral": out_list(self._integral),
        }
        conj_entries = [{"name": self.basis[i].name, "out": out_list(img)}
                        for i, img in sorted(self._conj.items()) if img != {i: ONE}]
        if conj_entries:
            obj["conj"] = conj_entries
        if self.kahler is not None:
            obj["kahler"] = out_list({i: v for i, v in enumerate(self.kahler) if v})
        return obj

    @classmethod
    def from_json(cls, obj: Mapping, certify: bool = True) -> "GradedRing":
        try:
            n = int(obj["n"])
            basis = [BasisElement(str(b["name"]), int(b["p"]), int(b["q"])) for b in obj["basis"]]
            mult = {(m["a"], m["b"]): _terms(m.get("out", [])) for m in obj.get("mult", [])}
            integral = _terms(obj["integral"])
            conjugation = {c["name"]: _terms(c["out"]) for c in obj.get("conj", [])}
            kahler = _terms(obj["kahler"]) if "kahler" in obj else None
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, RingCertificationError):
                raise
            raise RingCertificationError("schema", f"malformed ring description ({exc!r})") from exc
        return cls(n, basis, mult, integral, conjugation, kahler, name=str(obj.get("name", "ring")), certify=certify)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return f"GradedRing({self.name!r}, n={self.n}, dim={self.dim})"


def _num_json(v) -> dict:
    re, im = re_im(to_gauss(v))
    def enc(x):
        return int(x.numerator) if x.denominator == 1 else f"{int(x.numerator)}/{int(x.denominator)}"
    return {"re": enc(re), "im": enc(im)}


def _terms(entries) -> dict:
    out = {}
    for t in entries:
        out[t["name"]] = QQ_I(rational_from_json(t.get("re", 0)), rational_from_json(t.get("im", 0)))
    return out


# ---------------------------------------------------------------------------
# builtin fixtures


def projective_space(n: int) -> GradedRing:
    names = ["1"] + ["h"] + [f"h^{k}" for k in range(2, n + 1)]
    basis = [BasisElement(names[k], k, k) for k in range(n + 1)]
    mult = {(names[a], names[b]): {names[a + b]: 1} for a in range(1, n + 1) for b in range(1, n + 1) if a + b <= n}
    kahler = {"h": 1} if n else None
    return GradedRing(n, basis, mult, {names[n]: 1}, kahler=kahler, name=f"projective_space({n})")


def _torus_name(K: tuple, n: int) -> str:
    if not K:
        return "1"
    parts = [f"dz{k}" if k <= n else f"dzb{k - n}" for k in K]
    return "^".join(parts)


def torus(n: int) -> GradedRing:
    """Cohomology of ``C^n/Λ``: the exterior algebra on ``dz_j, dz̄_j``.

    The integral is normalized by ``∫ Π_j dz_j∧dz̄_j = (−2i)^n``, i.e. unit real volume.
    """
    from .exterior import merge_sign, multi_indices

    m = 2 * n
    idx = multi_indices(m)
    basis = [BasisElement(_torus_name(K, n), sum(1 for k in K if k <= n), sum(1 for k in K if k > n)) for K in idx]
    mult = {}
    for A in idx:
        for B in idx:
            if not A or not B:
                continue
            s, K = merge_sign(A, B)
            if s:
                mult[(_torus_name(A, n), _torus_name(B, n))] = {_torus_name(K, n): s}
    # Π_j (dz_j ∧ dz̄_j) = (−1)^{n(n−1)/2} dz_1…dz_n dz̄_1…dz̄_n
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    top = (-2 * i_power(1)) ** n if n else ONE
    integral = {_torus_name(tuple(range(1, m + 1)), n): top * sign}
    conjugation = {}
    for K in idx:
        I = tuple(k for k in K if k <= n)
        J = tuple(k - n for k in K if k > n)
        s = -1 if (len(I) * len(J)) % 2 else 1
        conjugation[_torus_name(K, n)] = {_torus_name(J + tuple(i + n for i in I), n): s}
    # ω = (i/2) Σ dz_j ∧ dz̄_j
    kahler = {_torus_name((j, j + n), n): QQ_I(0, QQ(1, 2)) for j in range(1, n + 1)}
    return GradedRing(n, basis, mult, integral, conjugation, kahler, name=f"torus({n})")


def quadric_surface() -> GradedRing:
    basis = [BasisElement("1", 0, 0), BasisElement("a", 1, 1), BasisElement("b", 1, 1), BasisElement("pt", 2, 2)]
    mult = {("a", "a"): {}, ("b", "b"): {}, ("a", "b"): {"pt": 1}}
    return GradedRing(2, basis, mult, {"pt": 1}, kahler={"a": 1, "b": 1}, name="quadric_surface")


def product_P1_P1() -> GradedRing:
    """Hand-built product of two lines: ``h1² = h2² = 0``, ``h1·h2 = pt``."""
    basis = [BasisElement("1", 0, 0), BasisElement("h1", 1, 1), BasisElement("h2", 1, 1), BasisElement("pt", 2, 2)]
    mult = {("h1", "h1"): {}, ("h2", "h2"): {}, ("h1", "h2"): {"pt": 1}}
    return GradedRing(2, basis, mult, {"pt": 1}, kahler={"h1": 1, "h2": 1}, name="product_P1_P1")


def blowup_P2() -> GradedRing:
    basis = [BasisElement("1", 0, 0), BasisElement("h", 1, 1), BasisElement("e", 1, 1), BasisElement("pt", 2, 2)]
    mult = {("h", "h"): {"pt": 1}, ("e", "e"): {"pt": -1}, ("h", "e"): {}}
    return GradedRing(2, basis, mult, {"pt": 1}, kahler={"h": 2, "e": -1}, name="blowup_P2")


def blowup_P3_point() -> GradedRing:
    basis = [
        BasisElement("1", 0, 0),
        BasisElement("h", 1, 1),
        BasisElement("e", 1, 1),
        BasisElement("h2", 2, 2),
        BasisElement("e2", 2, 2),
        BasisElement("pt", 3, 3),
    ]
    mult = {
        ("h", "h"): {"h2": 1},
        ("e", "e"): {"e2": 1},
        ("h", "e"): {},
        ("h", "h2"): {"pt": 1},
        ("e", "e2"): {"pt": 1},
        ("h", "e2"): {},
        ("e", "h2"): {},
    }
    return GradedRing(3, basis, mult, {"pt": 1}, kahler={"h": 2, "e": -1}, name="blowup_P3_point")


BUILTIN_KINDS = ("projective_space", "torus", "quadric_surface", "blowup_P2", "blowup_P3_point", "product_P1_P1")

_ALIASES = {
    "pn": "projective_space", "p": "projective_space", "projective": "projective_space",
    "torus": "torus", "t": "torus",
    "quadric": "quadric_surface", "quadric_surface": "quadric_surface",
    "blowup_p2": "blowup_P2", "blowup_P2": "blowup_P2",
    "blowup_p3_point": "blowup_P3_point", "blowup_P3_point": "blowup_P3_point", "blowup_p3": "blowup_P3_point",
    "p1xp1": "product_P1_P1", "product_p1_p1": "product_P1_P1", "product_P1_P1": "product_P1_P1",
    "projective_space": "projective_space",
}


@lru_cache(maxsize=None)
def ring_builtin(kind: str, n: int | None = None) -> GradedRing:
    """One of the certified fixture rings; ``n`` is needed for projective spaces and tori."""
    kind = _ALIASES.get(kind, kind)
    if kind == "projective_space":
        if n is None or n < 0:
            raise ValueError("projective_space needs n >= 0")
        return projective_space(n)
    if kind == "torus":
        if n is None or n < 1:
            raise ValueError("torus needs n >= 1")
        return torus(n)
    fixed = {
        "quadric_surface": quadric_surface,
        "blowup_P2": blowup_P2,
        "blowup_P3_point": blowup_P3_point,
        "product_P1_P1": product_P1_P1,
    }
    if kind not in fixed:
        raise ValueError(f"unknown ring kind {kind!r}")
    return fixed[kind]()


def load_ring(spec: str, n: int | None = None) -> GradedRing:
    """Resolve ``"pn:4"``-style aliases, builtin names, or a JSON file path."""
    head, _, arg = spec.partition(":")
    if _ALIASES.get(head, head) in BUILTIN_KINDS and not Path(spec).exists():
        return ring_builtin(head, int(arg) if arg else n)
    path = Path(spec)
    try:
        obj = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise RingCertificationError("schema", f"{path} is not valid JSON ({exc.msg})") from exc
    return GradedRing.from_json(obj)


def save_ring(ring: GradedRing, path) -> None:
    Path(path).write_text(json.dumps(ring.to_json(), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Lefschetz operator


def _check_lefschetz_class(ring: GradedRing, omega: Sequence) -> list:
    omega = ring.element(omega)
    if ring.bidegree_of(omega) - {(1, 1)}:
        raise ValueError("the Lefschetz class must have bidegree (1,1)")
    if not ring.is_real(omega):
        raise ValueError("the Lefschetz class must be real")
    return omega


def _default_class(ring: GradedRing, omega) -> list:
    if omega is None:
        if ring.kahler is None and ring.n == 0:
            return [ZERO] * ring.dim  # a point: H^2 = 0
        if ring.kahler is None:
            raise ValueError("no Lefschetz class given and the ring has no default")
        omega = ring.kahler
    return _check_lefschetz_class(ring, omega)


def lefschetz_matrix(ring: GradedRing, omega: Sequence, r: int, src: Sequence[int], dst: Sequence[int]) -> list[list]:
    """Matrix of ``x ↦ ω^r·x`` from the span of ``src`` to the span of ``dst``."""
    wr = ring.power(omega, r)
    cols = [ring.mul(wr, ring.basis_vector(i)) for i in src]
    return [[col[j] for col in cols] for j in dst]


@dataclass
class LefschetzStep:
    r: int
    source_dim: int
    target_dim: int
    rank: int
    pairing_det: object

    @property
    def iso(self) -> bool:
        return self.rank == self.source_dim == self.target_dim

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "source_degree_dim": self.source_dim,
            "target_degree_dim": self.target_dim,
            "rank": self.rank,
            "verdict": "iso" if self.iso else "not iso",
            "pairing_det": gauss_to_json(self.pairing_det),
        }


@dataclass
class HardLefschetzReport:
    ring: str
    steps: list

    @property
    def passed(self) -> bool:
        return all(s.iso for s in self.steps)

    @property
    def first_failure(self) -> int | None:
        bad = [s.r for s in self.steps if not s.iso]
        return bad[0] if bad else None

    def to_json(self) -> dict:
        return {"relation": "chl-a", "ring": self.ring, "passed": self.passed, "first_failure": self.first_failure,
                "steps": [s.to_json() for s in self.steps]}


def hard_lefschetz_check(ring: GradedRing, omega=None) -> HardLefschetzReport:
    """Rank of ``ω^r: H^{n−r} → H^{n+r}`` and the pairing ``∫ω^r u v`` for every r."""
    omega = _default_class(ring, omega)
    steps = []
    for r in range(ring.n + 1):
        src, dst = ring.positions(ring.n - r), ring.positions(ring.n + r)
        M = lefschetz_matrix(ring, omega, r, src, dst)
        rank = linalg.rank(M) if src and dst else 0
        basis_src = [ring.basis_vector(i) for i in src]
        if src:
            pair = ring.pairing_matrix(basis_src, basis_src, weight=ring.power(omega, r))
            pdet = to_gauss(linalg.det(pair))
        else:
            pdet = ONE
        steps.append(LefschetzStep(r, len(src), len(dst), rank, pdet))
    return HardLefschetzReport(ring.name, steps)


def _embed(ring: GradedRing, coords: Sequence, positions: Sequence[int]) -> list:
    vec = [ZERO] * ring.dim
    for c, i in zip(coords, positions):
        vec[i] = to_gauss(c)
    return vec


def primitive_subspace(ring: GradedRing, omega=None, l: int = 0, bidegree: tuple | None = None) -> list[list]:
    """Exact basis of ``P^l = ker(ω^{n−l+1}: H^l → H^{2n−l+2})`` as ring vectors."""
    omega = _default_class(ring, omega)
    if not 0 <= l <= ring.n:
        raise ValueError(f"degree {l} out of range 0..{ring.n}")
    r = ring.n - l
    src = ring.positions(bidegree=bidegree) if bidegree is not None else ring.positions(l)
    if bidegree is not None and sum(bidegree) != l:
        raise ValueError("bidegree does not match the degree")
    if not src:
        return []
    dst = ring.positions(l + 2 * (r + 1))
    if not dst:
        return [ring.basis_vector(i) for i in src]
    M = lefschetz_matrix(ring, omega, r + 1, src, dst)
    return [_embed(ring, v, src) for v in linalg.kernel_basis(M, ncols=len(src))]


@dataclass
class PrimitiveDecomposition:
    degree: int
    summands: dict  # j -> list of ring vectors spanning ω^j P^{l-2j}
    betti: int
    dims_ok: bool
    spans_ok: bool
    orthogonal: bool
    bidegree_closed: bool
    dimension_identity: dict  # j -> (dim P^{l-2j}, b_{l-2j} - b_{l-2j-2})

    @property
    def passed(self) -> bool:
        return self.dims_ok and self.spans_ok and self.orthogonal and self.bidegree_closed and all(
            a == b for a, b in self.dimension_identity.values())

    def to_json(self) -> dict:
        return {
            "relation": "chl-b",
            "degree": self.degree,
            "betti": self.betti,
            "summand_dims": {str(j): len(v) for j, v in sorted(self.summands.items())},
            "dimension_identity": {str(j): {"dim_P": a, "b_difference": b}
                                   for j, (a, b) in sorted(self.dimension_identity.items())},
            "dims_ok": self.dims_ok,
            "spans_ok": self.spans_ok,
            "orthogonal": self.orthogonal,
            "bidegree_closed": self.bidegree_closed,
            "passed": self.passed,
        }


def _bidegree_closed(ring: GradedRing, vectors: list[list]) -> bool:
    if not vectors:
        return True
    base = linalg.rank(vectors)
    for v in vectors:
        for pq in ring.bidegree_of(v):
            part = [x if (ring.basis[i].p, ring.basis[i].q) == pq else ZERO for i, x in enumerate(v)]
            if linalg.rank(vectors + [part]) != base:
                return False
    return True


def primitive_decompose(ring: GradedRing, omega=None, l: int = 0) -> PrimitiveDecomposition:
    """``H^l = ⊕_j ω^j P^{l−2j}`` with exact bookkeeping."""
    omega = _default_class(ring, omega)
    if not hard_lefschetz_check(ring, omega).passed:
        raise ValueError("Hard Lefschetz fails for this class; no primitive decomposition")
    if not 0 <= l <= ring.n:
        raise ValueError(f"degree {l} out of range 0..{ring.n}")
    summands, ident = {}, {}
    for j in range(l // 2 + 1):
        P = primitive_subspace(ring, omega, l - 2 * j)
        wj = ring.power(omega, j)
        summands[j] = [ring.mul(wj, v) for v in P]
        ident[j] = (len(P), ring.betti(l - 2 * j) - (ring.betti(l - 2 * j - 2) if l - 2 * j >= 2 else 0))
    b = ring.betti(l)
    total = sum(len(v) for v in summands.values())
    all_vecs = [v for vs in summands.values() for v in vs]
    spans_ok = (linalg.rank(all_vecs) if all_vecs else 0) == b
    weight = ring.power(omega, ring.n - l)
    orthogonal = True
    keys = sorted(summands)
    for a in keys:
        for c in keys:
            if a < c and summands[a] and summands[c]:
                block = ring.pairing_matrix(summands[a], summands[c], weight=weight)
                if any(x for row in block for x in row):
                    orthogonal = False
    closed = all(_bidegree_closed(ring, vs) for vs in summands.values())
    return PrimitiveDecomposition(l, summands, b, total == b, spans_ok, orthogonal, closed, ident)


# ---------------------------------------------------------------------------
# Hodge–Riemann


def hr_sign(l: int, p: int, q: int):
    """``(−1)^{l(l−1)/2} i^{p−q}``."""
    s = -1 if (l * (l - 1) // 2) % 2 else 1
    return i_power(p - q) * s


@dataclass
class HRBlock:
    bidegree: tuple
    matrix: list
    raw_cup: list
    definiteness: linalg.Definiteness | None
    hermitian: bool

    @property
    def positive(self) -> bool:
        return self.definiteness is None or self.definiteness.positive

    def to_json(self) -> dict:
        return {
            "bidegree": list(self.bidegree),
            "dim": len(self.matrix),
            "matrix": [[gauss_to_json(x) for x in r] for r in self.matrix],
            "raw_cup": [[gauss_to_json(x) for x in r] for r in self.raw_cup],
            "hermitian": self.hermitian,
            "positive_definite": self.positive,
            "minors": [gauss_to_json(x) for x in (self.definiteness.minors if self.definiteness else [])],
            "method": self.definiteness.method if self.definiteness else "empty",
        }


@dataclass
class HodgeRiemannReport:
    ring: str
    degree: int
    blocks: list

    @property
    def passed(self) -> bool:
        return all(b.hermitian and b.positive for b in self.blocks)

    def to_json(self) -> dict:
        return {"relation": "chl-c", "ring": self.ring, "degree": self.degree, "passed": self.passed,
                "blocks": [b.to_json() for b in self.blocks]}


def hodge_riemann_check(ring: GradedRing, omega=None, l: int = 0) -> HodgeRiemannReport:
    """Hermitian forms ``(−1)^{l(l−1)/2} i^{p−q} ∫ ω^{n−l} α ᾱ`` on ``P^l ∩ H^{p,q}``."""
    omega = _default_class(ring, omega)
    if not hard_lefschetz_check(ring, omega).passed:
        raise ValueError("Hard Lefschetz fails for this class")
    weight = ring.power(omega, ring.n - l)
    blocks = []
    for p in range(l + 1):
        q = l - p
        if p > ring.n or q > ring.n:
            continue
        P = primitive_subspace(ring, omega, l, bidegree=(p, q))
        bars = [ring.conj(v) for v in P]
        raw = ring.pairing_matrix(P, bars, weight=weight)
        c = hr_sign(l, p, q)
        M = [[c * x for x in row] for row in raw]
        herm = linalg.is_hermitian(M) if M else True
        definite = linalg.sylvester(M) if (M and herm) else None
        if M and not herm:
            definite = linalg.Definiteness(False, [], "exact")
        blocks.append(HRBlock((p, q), M, raw, definite, herm))
    return HodgeRiemannReport(ring.name, l, blocks)


# ---------------------------------------------------------------------------
# Hodge structures and polarizations


@dataclass
class HodgeStructureSlice:
    """A weight-l sub-Hodge structure of a ring, given by complex spanning vectors."""

    ring: GradedRing
    weight: int
    vectors: list

    def __post_init__(self):
        self.vectors = [self.ring.element(v) for v in self.vectors]
        for v in self.vectors:
            if any(p + q != self.weight for p, q in self.ring.bidegree_of(v)):
                raise ValueError("slice vector of the wrong degree")

    @classmethod
    def full(cls, ring: GradedRing, l: int) -> "HodgeStructureSlice":
        return cls(ring, l, [ring.basis_vector(i) for i in ring.positions(l)])

    @classmethod
    def primitive(cls, ring: GradedRing, omega=None, l: int = 0) -> "HodgeStructureSlice":
        vecs = []
        for p in range(l + 1):
            if p <= ring.n and l - p <= ring.n:
                vecs += primitive_subspace(ring, omega, l, bidegree=(p, l - p))
        return cls(ring, l, vecs)

    def is_conjugation_stable(self) -> bool:
        if not self.vectors:
            return True
        base = linalg.rank(self.vectors)
        return all(linalg.rank(self.vectors + [self.ring.conj(v)]) == base for v in self.vectors)

    def is_bigraded(self) -> bool:
        return _bidegree_closed(self.ring, self.vectors)

    def pieces(self) -> dict:
        """Basis of each ``H^{p,q}`` piece (projections of the spanning set)."""
        out = {}
        for p in range(self.weight + 1):
            pq = (p, self.weight - p)
            proj = [[x if (self.ring.basis[i].p, self.ring.basis[i].q) == pq else ZERO for i, x in enumerate(v)]
                    for v in self.vectors]
            proj = [v for v in proj if any(v)]
            if proj:
                out[pq] = _independent(proj)
        return out

    def real_basis(self) -> list[list]:
        """Basis of the real points: ``x + x̄`` and ``(x − x̄)/i`` over the spanning set."""
        cands = []
        half = QQ_I(QQ(1, 2), 0)
        minus_half_i = QQ_I(0, QQ(-1, 2))
        for v in self.vectors:
            vb = self.ring.conj(v)
            cands.append([half * (a + b) for a, b in zip(v, vb)])
            cands.append([minus_half_i * (a - b) for a, b in zip(v, vb)])
        return _independent([c for c in cands if any(c)])

    def weil(self, x: Sequence) -> list:
        return [v * i_power(self.ring.basis[i].p - self.ring.basis[i].q) if v else ZERO for i, v in enumerate(x)]


def _independent(vectors: list[list]) -> list[list]:
    out = []
    r = 0
    for v in vectors:
        if linalg.rank(out + [v]) > r:
            out.append(v)
            r += 1
    return out


def cup_form(ring: GradedRing, omega=None, r: int = 0, sign: int = 1) -> Callable:
    """``Ψ(x, y) = sign · ∫ ω^r x y`` as a bilinear callable."""
    w = ring.power(_default_class(ring, omega), r) if r else ring.one()

    def psi(x, y):
        return ring.integrate(ring.mul(ring.mul(w, x), y)) * sign

    psi.description = f"{sign:+d}·∫ω^{r}∧−∧−"
    return psi


def hr_polarization(ring: GradedRing, omega=None, l: int = 0) -> Callable:
    """``(−1)^{l(l+1)/2} ∫ ω^{n−l} ∧ − ∧ −``, the form that polarizes ``P^l``."""
    sign = -1 if (l * (l + 1) // 2) % 2 else 1
    return cup_form(ring, omega, ring.n - l, sign)


@dataclass
class PolarizationReport:
    weight: int
    psi: list
    psi_tilde: list
    psi_parity: str
    parity_ok: bool
    tilde_symmetric: bool
    tilde_definiteness: linalg.Definiteness | None
    nondegenerate: bool
    bigraded_positive: dict
    weil_square_ok: bool
    restrictions: list = field(default_factory=list)

    @property
    def positive(self) -> bool:
        return self.tilde_definiteness is not None and self.tilde_definiteness.positive

    @property
    def passed(self) -> bool:
        return (self.parity_ok and self.tilde_symmetric and self.positive and self.nondegenerate
                and all(self.bigraded_positive.values()) and self.weil_square_ok
                and all(r.passed for r in self.restrictions))

    def to_json(self) -> dict:
        return {
            "relation": "defpol",
            "weight": self.weight,
            "psi": [[gauss_to_json(x) for x in r] for r in self.psi],
            "psi_tilde": [[gauss_to_json(x) for x in r] for r in self.psi_tilde],
            "psi_parity": self.psi_parity,
            "parity_ok": self.parity_ok,
            "tilde_symmetric": self.tilde_symmetric,
            "tilde_positive_definite": self.positive,
            "minors": [gauss_to_json(x) for x in (self.tilde_definiteness.minors if self.tilde_definiteness else [])],
            "nondegenerate": self.nondegenerate,
            "bigraded_positive": {f"{p},{q}": ok for (p, q), ok in sorted(self.bigraded_positive.items())},
            "weil_square_ok": self.weil_square_ok,
            "restrictions": [r.to_json() for r in self.restrictions],
            "passed": self.passed,
        }


def _psi_matrix(psi, slc: HodgeStructureSlice, basis: list[list]) -> list[list]:
    if isinstance(psi, (list, tuple)):
        M = [[to_gauss(x) for x in row] for row in psi]
        if len(M) != len(basis) or any(len(r) != len(basis) for r in M):
            raise ValueError(f"Ψ is {len(M)}×{len(M[0]) if M else 0} but the slice has real dimension {len(basis)}")
        return M
    return [[to_gauss(psi(x, y)) for y in basis] for x in basis]


def polarization_check(slc: HodgeStructureSlice, psi, substructures: Iterable[HodgeStructureSlice] = ()
                       ) -> PolarizationReport:
    """Check that ``Ψ`` polarizes the slice: ``Ψ̃(x,y) = Ψ(x, Cy)`` symmetric positive definite.

    ``psi`` is either a bilinear callable on ring vectors or a matrix on
    :meth:`HodgeStructureSlice.real_basis`.  S¹-invariance is assumed of the
    input; what is checked are its finite consequences.
    """
    l = slc.weight
    basis = slc.real_basis()
    M = _psi_matrix(psi, slc, basis)
    if callable(psi):
        Cb = [slc.weil(y) for y in basis]
        T = [[to_gauss(psi(x, cy)) for cy in Cb] for x in basis]
    else:
        # C on the real basis, in real-basis coordinates, from the ring action
        Cmat = _weil_on_real_basis(slc, basis)
        T = linalg.matmul(M, Cmat) if M else []
    N = len(M)
    sym = all(M[a][b] == M[b][a] for a in range(N) for b in range(N))
    anti = all(M[a][b] == -M[b][a] for a in range(N) for b in range(N))
    want_sym = l % 2 == 0
    parity = "symmetric" if sym and not anti else "antisymmetric" if anti and not sym else ("zero" if sym else "neither")
    parity_ok = (sym if want_sym else anti)
    tilde_sym = all(T[a][b] == T[b][a] for a in range(N) for b in range(N))
    definite = None
    if N and tilde_sym and all(x == conj(x) for row in T for x in row):
        definite = linalg.sylvester(T)
    elif N:
        definite = linalg.Definiteness(False, [], "exact")
    nondeg = bool(linalg.det(M)) if N else True

    bigraded = {}
    if callable(psi):
        sign = -1 if l % 2 else 1
        for (p, q), vecs in slc.pieces().items():
            H = [[to_gauss(psi(x, slc.ring.conj(y))) * i_power(p - q) * sign for y in vecs] for x in vecs]
            bigraded[(p, q)] = linalg.is_hermitian(H) and linalg.sylvester(H).positive
    weil_sq = all(slc.weil(slc.weil(v)) == [x * (-1) ** l for x in v] for v in slc.vectors)

    restrictions = []
    for sub in substructures:
        if sub.weight != l:
            raise ValueError("sub-structure has a different weight")
        if not (sub.is_conjugation_stable() and sub.is_bigraded()):
            raise ValueError("declared sub-structure is not a sub-Hodge structure")
        if linalg.rank(slc.vectors + sub.vectors) != linalg.rank(slc.vectors):
            raise ValueError("declared sub-structure is not contained in the slice")
        if not callable(psi):
            raise ValueError("restriction needs Ψ as a bilinear callable")
        restrictions.append(polarization_check(sub, psi))
    return PolarizationReport(l, M, T, parity, parity_ok, tilde_sym, definite, nondeg, bigraded, weil_sq, restrictions)


def _weil_on_real_basis(slc: HodgeStructureSlice, basis: list[list]) -> list[list]:
    """Matrix of C in the real basis: columns are coordinates of C(b_j)."""
    ring = slc.ring
    support = sorted({i for v in basis for i, x in enumerate(v) if x})
    A = [[v[i] for v in basis] for i in support]
    cols = []
    for b in basis:
        cb = slc.weil(b)
        rhs = [cb[i] for i in support]
        cols.append(_solve(A, rhs))
    return [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]


def _solve(A: list[list], b: list) -> list:
    aug = [row + [x] for row, x in zip(A, b)]
    ncols = len(A[0])
    ker = linalg.kernel_basis(aug, ncols=ncols + 1)
    for v in ker:
        if v[-1]:
            return [-x / v[-1] for x in v[:-1]]
    raise ValueError("C does not preserve the real span of the slice")


# ---------------------------------------------------------------------------
# Hodge diamond


@dataclass
class DiamondReport:
    ring: str
    n: int
    h: dict
    betti: list
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def violated(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]

    def to_json(self) -> dict:
        return {
            "ring": self.ring,
            "n": self.n,
            "hodge_numbers": {f"{p},{q}": v for (p, q), v in sorted(self.h.items())},
            "betti": self.betti,
            "checks": self.checks,
            "passed": self.passed,
        }

    def text(self) -> str:
        """Aligned diamond with ``h^{n,n}`` on top and ``h^{0,0}`` at the bottom."""
        n = self.n
        width = max(len(str(v)) for v in self.h.values()) if self.h else 1
        cell = width + 2 + (width % 2)  # even, so half-cell offsets line up
        lines = []
        for s in range(2 * n, -1, -1):
            row = [self.h.get((p, s - p), 0) for p in range(n, -1, -1) if 0 <= s - p <= n]
            body = "".join(str(v).center(cell) for v in row)
            pad = " " * (cell * abs(n - s) // 2)
            lines.append((pad + body).rstrip())
        return "\n".join(lines)


def hodge_diamond(ring: GradedRing) -> DiamondReport:
    n = ring.n
    h = {(p, q): len(ring.positions(bidegree=(p, q))) for p in range(n + 1) for q in range(n + 1)}
    # Betti numbers from the rank of the Poincaré pairing H^l × H^{2n-l}
    betti = []
    for l in range(2 * n + 1):
        left = [ring.basis_vector(i) for i in ring.positions(l)]
        right = [ring.basis_vector(i) for i in ring.positions(2 * n - l)]
        betti.append(linalg.rank(ring.pairing_matrix(left, right)) if left and right else 0)
    checks = {
        "pqid2": h[(0, 0)] == 1 and h[(n, n)] == 1,
        "pqid3": all(h[(p, q)] == h[(n - p, n - q)] for p, q in h),
        "pqid4": all(h[(p, q)] == h[(q, p)] for p, q in h),
        "pqid5": all(betti[l] == sum(h[(p, l - p)] for p in range(n + 1) if 0 <= l - p <= n)
                     for l in range(2 * n + 1)),
        "pqid6": all(h[(p, p)] >= 1 for p in range(n + 1)),
        "b_odd_even": all(betti[l] % 2 == 0 for l in range(1, 2 * n + 1, 2)),
        "cckmt": all(betti[2 * k] > 0 for k in range(n + 1)),
    }
    return DiamondReport(ring.name, n, h, betti, checks)
