"""Differential forms on the flat torus ``R^m / Z^m`` in Fourier modes.

A form is a finite sum ``Σ_k e^{2πi k·x} u_k`` with constant coefficients
``u_k`` in the complexified exterior algebra.  Every first-order operator is
divided by ``2π``, so ``d`` acts on mode ``k`` as ``Σ_j i k_j dx_j ∧`` and
all operators are finite exact matrices, block-diagonal over modes.

Two coordinate systems are used.  The *real* basis is ``e_I`` over
``dx_1, …, dx_m`` (for a complex torus ``dx_1, dy_1, …, dx_n, dy_n``).
The *bigraded* basis, used by the Kähler apparatus, is ``dz_J ∧ dz̄_K``
stored as a multi-index over the generators ``dz_1..dz_n, dz̄_1..dz̄_n``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .exterior import (
    ExteriorElement,
    MetricSpec,
    OrientationSpec,
    hodge_star,
    merge_sign,
    multi_indices,
)
from .hermitian import (
    BigradedElement,
    HermitianForm,
    RealForm,
    _generators_to_real,
    _real_to_generators,
    complex_star,
    to_real_basis,
)
from .exterior import pushforward
from .scalars import QQ, QQ_I, conj, gauss_from_json, gauss_to_json, re_im, to_gauss
from .sparse import ExactSparse

Mode = tuple

ZERO_I = QQ_I(0, 0)
ONE_I = QQ_I(1, 0)
I_UNIT = QQ_I(0, 1)
HALF = QQ(1, 2)


# ---------------------------------------------------------------------------
# coefficient spaces


@lru_cache(maxsize=None)
def basis_positions(m: int) -> dict:
    return {I: pos for pos, I in enumerate(multi_indices(m))}


def to_vector(u: ExteriorElement) -> list:
    pos = basis_positions(u.dim)
    vec = [ZERO_I] * len(pos)
    for I, c in u.terms.items():
        vec[pos[I]] = to_gauss(c)
    return vec


def from_vector(vec: Sequence, m: int) -> ExteriorElement:
    return ExteriorElement(m, {I: vec[p] for I, p in basis_positions(m).items() if vec[p]})


@lru_cache(maxsize=None)
def wedge_matrices(m: int) -> tuple:
    """``(e_1∧, …, e_m∧)`` as sparse matrices on ``Λ(R^m)``."""
    pos = basis_positions(m)
    mats = []
    for j in range(1, m + 1):
        entries = {}
        for I, c in pos.items():
            s, K = merge_sign((j,), I)
            if s:
                entries[(pos[K], c)] = s
        mats.append(ExactSparse.from_dict((len(pos), len(pos)), entries))
    return tuple(mats)


@lru_cache(maxsize=None)
def degree_list(m: int) -> tuple:
    return tuple(len(I) for I in multi_indices(m))


@lru_cache(maxsize=64)
def gram_blocks(g: MetricSpec) -> tuple:
    """Gram matrix of the induced inner product on ``Λ`` and its exact inverse."""
    m = g.dim
    pos = basis_positions(m)
    G, Ginv = {}, {}
    for p in range(m + 1):
        idx = multi_indices(m, p)
        block = [[g.minor(I, J) for J in idx] for I in idx]
        inv = linalg.inverse(block)
        for a, I in enumerate(idx):
            for b, J in enumerate(idx):
                if block[a][b]:
                    G[(pos[I], pos[J])] = block[a][b]
                if inv[a][b]:
                    Ginv[(pos[I], pos[J])] = inv[a][b]
    N = len(pos)
    return ExactSparse.from_dict((N, N), G), ExactSparse.from_dict((N, N), Ginv)


def adjoint(A: ExactSparse, G: ExactSparse, Ginv: ExactSparse) -> ExactSparse:
    """Adjoint for the Hermitian product ``<u, v> = v^H G u``: ``G^{-1} A^H G``."""
    return Ginv @ A.H @ G


def _mode(k, m: int) -> Mode:
    k = tuple(int(x) for x in k)
    if len(k) != m:
        raise ValueError(f"mode {k} has the wrong length for m={m}")
    return k


# ---------------------------------------------------------------------------
# real model: d, d*, Δ at a single mode


def d_block(k: Mode, m: int) -> ExactSparse:
    N = 2 ** m
    out = ExactSparse.zeros(N)
    for j, E in enumerate(wedge_matrices(m)):
        if k[j]:
            out = out.lincomb(1, E, QQ_I(0, k[j]))
    return out


def codifferential_block(k: Mode, g: MetricSpec) -> ExactSparse:
    G, Ginv = gram_blocks(g)
    return adjoint(d_block(k, g.dim), G, Ginv)


def laplacian_block(k: Mode, g: MetricSpec) -> ExactSparse:
    d = d_block(k, g.dim)
    ds = codifferential_block(k, g)
    return (d @ ds) + (ds @ d)


def laplacian_eigenvalue(k: Mode, g: MetricSpec):
    """``Σ g_ij k_i k_j``: the scalar by which Δ acts on mode ``k`` (units of 4π²)."""
    return sum((g.gram[i][j] * k[i] * k[j] for i in range(g.dim) for j in range(g.dim)), QQ(0))


@lru_cache(maxsize=64)
def star_matrix(g: MetricSpec, sign: int = 1) -> dict:
    """Real star as a dict of ExteriorElements per basis index (entries may be surds)."""
    o = OrientationSpec(sign)
    return {I: hodge_star(ExteriorElement.basis(g.dim, I), g, o) for I in multi_indices(g.dim)}


def codifferential_by_star(k: Mode, g: MetricSpec, sign: int = 1) -> ExactSparse:
    """``d* = (-1)^{m(p+1)+1} ⋆ d ⋆`` evaluated on basis forms.

    ``d = i·D`` with ``D`` real, so ``⋆D⋆`` is computed over the reals (the two
    ``1/sqrt(det g)`` factors multiply to a rational) and ``i`` restored after.
    """
    m = g.dim
    table = star_matrix(g, sign)
    pos = basis_positions(m)
    one_forms = [ExteriorElement.basis(m, (j + 1,), QQ(kj)) for j, kj in enumerate(k) if kj]
    entries = {}
    for I, col in pos.items():
        p = len(I)
        s = table[I]
        ds = ExteriorElement.zero(m)
        for w in one_forms:
            ds = ds + (w ^ s)
        out = ExteriorElement.zero(m)
        for J, c in ds.terms.items():
            out = out + c * table[J]
        sgn = -1 if (m * (p + 1) + 1) % 2 else 1
        for J, c in out.terms.items():
            entries[(pos[J], col)] = QQ_I(0, QQ(c) * sgn)
    return ExactSparse.from_dict((len(pos), len(pos)), entries)


# ---------------------------------------------------------------------------
# Fourier forms


@dataclass(frozen=True, eq=False)
class FourierForm:
    """Finite Fourier sum of constant-coefficient forms on ``R^m/Z^m``."""

    m: int
    modes: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, u in self.modes.items():
            k = _mode(k, self.m)
            if not isinstance(u, ExteriorElement) or u.dim != self.m:
                raise ValueError("mode coefficient must be an ExteriorElement of matching dimension")
            u = u.map_coeffs(to_gauss)
            if not u.is_zero():
                clean[k] = u
        object.__setattr__(self, "modes", dict(sorted(clean.items())))

    @classmethod
    def single(cls, k, u: ExteriorElement) -> "FourierForm":
        return cls(u.dim, {tuple(k): u})

    def coefficient(self, k) -> ExteriorElement:
        return self.modes.get(tuple(k), ExteriorElement.zero(self.m))

    def is_real(self) -> bool:
        for k, u in self.modes.items():
            minus = tuple(-x for x in k)
            if self.coefficient(minus) != u.map_coeffs(conj):
                return False
        return True

    def is_zero(self) -> bool:
        return not self.modes

    def map_modes(self, f) -> "FourierForm":
        return FourierForm(self.m, {k: f(k, u) for k, u in self.modes.items()})

    def __add__(self, other: "FourierForm") -> "FourierForm":
        if other.m != self.m:
            raise ValueError("dimension mismatch")
        out = dict(self.modes)
        for k, u in other.modes.items():
            out[k] = out[k] + u if k in out else u
        return FourierForm(self.m, out)

    def __neg__(self):
        return self.map_modes(lambda k, u: -u)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, FourierForm):
            return NotImplemented
        return self.m == other.m and (self - other).is_zero()

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "modes": [
                {"k": list(k), "coeff": [{"index": list(I), **gauss_to_json(c)} for I, c in u.terms.items()]}
                for k, u in self.modes.items()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "FourierForm":
        m = int(obj["m"])
        modes = {}
        for entry in obj["modes"]:
            coeff = entry["coeff"]
            if isinstance(coeff, Mapping):  # exterior element JSON
                u = ExteriorElement.from_json(coeff)
            else:
                u = ExteriorElement(m, {tuple(t["index"]): gauss_from_json(t) for t in coeff})
            modes[tuple(entry["k"])] = u
        return cls(m, modes)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _apply_block(block: ExactSparse, u: ExteriorElement) -> ExteriorElement:
    return from_vector(block.apply(to_vector(u)), u.dim)


def exterior_d(F: FourierForm) -> FourierForm:
    """``d`` mode by mode: ``u_k ↦ Σ_j i k_j dx_j ∧ u_k``."""
    out = {}
    for k, u in F.modes.items():
        acc = ExteriorElement.zero(F.m)
        for j, kj in enumerate(k):
            if kj:
                acc = acc + (ExteriorElement.basis(F.m, (j + 1,), QQ_I(0, kj)) ^ u)
        out[k] = acc
    return FourierForm(F.m, out)


def _metric(g: MetricSpec | None, m: int) -> MetricSpec:
    if g is None:
        return MetricSpec.euclidean(m)
    if not isinstance(g, MetricSpec):
        raise TypeError("the torus model needs a constant MetricSpec")
    if g.dim != m:
        raise ValueError("metric dimension mismatch")
    return g


def codifferential(F: FourierForm, g: MetricSpec | None = None) -> FourierForm:
    g = _metric(g, F.m)
    return FourierForm(F.m, {k: _apply_block(codifferential_block(k, g), u) for k, u in F.modes.items()})


def mode_inner(u: ExteriorElement, v: ExteriorElement, g: MetricSpec):
    """Pointwise Hermitian product ``<u, v̄>``; integrating over the unit torus changes nothing."""
    total = ZERO_I
    for I, a in u.terms.items():
        for J, b in v.terms.items():
            if len(I) == len(J):
                gij = g.minor(I, J)
                if gij:
                    total = total + to_gauss(a) * conj(to_gauss(b)) * QQ_I(gij, 0)
    return total


def global_inner(F: FourierForm, H: FourierForm, g: MetricSpec | None = None):
    """``<<F, H>>``: distinct modes are orthogonal on the torus."""
    g = _metric(g, F.m)
    total = ZERO_I
    for k, u in F.modes.items():
        if k in H.modes:
            total = total + mode_inner(u, H.modes[k], g)
    return total


LAPLACIAN_FLAVORS = ("Delta", "Delta'", "Delta''")
_FLAVOR_ALIASES = {"Δ": "Delta", "Δ′": "Delta'", "Δ″": "Delta''", "delta": "Delta"}


def laplacian(F: FourierForm, flavor: str = "Delta", g: MetricSpec | None = None) -> FourierForm:
    flavor = _FLAVOR_ALIASES.get(flavor, flavor)
    if flavor not in LAPLACIAN_FLAVORS:
        raise ValueError(f"unknown Laplacian flavor {flavor!r}")
    if flavor == "Delta":
        g = _metric(g, F.m)
        return FourierForm(F.m, {k: _apply_block(laplacian_block(k, g), u) for k, u in F.modes.items()})
    if F.m % 2:
        raise ValueError(f"{flavor} needs a complex structure (even real dimension)")
    if g is not None and not g.is_euclidean():
        raise ValueError(f"{flavor} is implemented for the Euclidean Kähler metric only")
    n = F.m // 2
    app = KahlerApparatus.get(n)
    out = {}
    for k, u in F.modes.items():
        blocks = app.mode_blocks(k)
        op = blocks["Delta'"] if flavor == "Delta'" else blocks["Delta''"]
        out[k] = _apply_block(app.to_real_coords(op), u)
    return FourierForm(F.m, out)


@dataclass(frozen=True)
class HodgeDecomposition:
    harmonic: FourierForm
    exact: FourierForm
    coexact: FourierForm

    def reconstruct(self) -> FourierForm:
        return self.harmonic + self.exact + self.coexact


def hodge_decompose(F: FourierForm, g: MetricSpec | None = None) -> HodgeDecomposition:
    """Split ``F = H + dA + d*B``.

    On ``k ≠ 0`` the Laplacian block is invertible; with ``Gr = Δ^{-1}`` one
    has ``u = d(d* Gr u) + d*(d Gr u)``.  The ``k = 0`` block is harmonic.
    """
    g = _metric(g, F.m)
    harm, ex, coex = {}, {}, {}
    for k, u in F.modes.items():
        if not any(k):
            harm[k] = u
            continue
        d = d_block(k, g.dim)
        ds = codifferential_block(k, g)
        lap = (d @ ds) + (ds @ d)
        lam = laplacian_eigenvalue(k, g)
        scalar = lap == ExactSparse.identity(2 ** g.dim).scale(lam)
        if scalar:
            green = ExactSparse.identity(2 ** g.dim).scale(QQ(1) / lam)
        else:  # pragma: no cover - flat metrics always give a scalar block
            green = ExactSparse.from_rows(linalg.inverse(lap.to_rows()))
        ex[k] = _apply_block(d @ ds @ green, u)
        coex[k] = _apply_block(ds @ d @ green, u)
    return HodgeDecomposition(FourierForm(F.m, harm), FourierForm(F.m, ex), FourierForm(F.m, coex))


def modes_in_box(m: int, bound: int) -> list:
    return [tuple(k) for k in itertools.product(range(-bound, bound + 1), repeat=m)]


def harmonic_dimensions(m: int, bound: int = 1, g: MetricSpec | None = None) -> list[int]:
    """Dimension of ``ker Δ`` on p-forms over all modes with ``|k|∞ ≤ bound``."""
    g = _metric(g, m)
    dims = [0] * (m + 1)
    for k in modes_in_box(m, bound):
        lap = laplacian_block(k, g)
        rows = lap.to_rows()
        for p in range(m + 1):
            idx = [basis_positions(m)[I] for I in multi_indices(m, p)]
            block = [[rows[a][b] for b in idx] for a in idx]
            dims[p] += len(idx) - linalg.rank(block)
    return dims


def betti_numbers(m: int, bound: int = 1) -> tuple:
    if m < 1:
        raise ValueError("m must be at least 1")
    return tuple(harmonic_dimensions(m, bound))


def hodge_numbers(n: int, bound: int = 1) -> dict:
    """``h^{p,q}`` of the complex torus ``C^n/Λ``: kernel of Δ'' on each bidegree."""
    app = KahlerApparatus.get(n)
    out = {(p, q): 0 for p in range(n + 1) for q in range(n + 1)}
    for k in modes_in_box(2 * n, bound):
        rows = app.mode_blocks(k)["Delta''"].to_rows()
        for (p, q), idx in app.bidegree_positions.items():
            block = [[rows[a][b] for b in idx] for a in idx]
            out[(p, q)] += len(idx) - linalg.rank(block)
    return out


def integrate(u: ExteriorElement, orientation: int = 1):
    """Integral of a constant form over the unit torus: its top coefficient."""
    return u.coeff(tuple(range(1, u.dim + 1))) * orientation


def poincare_pairing(m: int, p: int) -> list[list]:
    """Matrix of ``(u, v) ↦ ∫ u∧v`` on harmonic p- and (m−p)-forms."""
    if not 0 <= p <= m:
        raise ValueError("degree out of range")
    left = multi_indices(m, p)
    right = multi_indices(m, m - p)
    return [[integrate(ExteriorElement.basis(m, I) ^ ExteriorElement.basis(m, J)) for J in right] for I in left]


def serre_pairing(n: int, p: int, q: int) -> list[list]:
    """``∫ u∧v`` between harmonic ``(p,q)`` and ``(n−p,n−q)`` forms of a complex torus."""
    left = [BigradedElement.basis(n, I, J) for I in multi_indices(n, p) for J in multi_indices(n, q)]
    right = [BigradedElement.basis(n, I, J) for I in multi_indices(n, n - p) for J in multi_indices(n, n - q)]
    return [[to_gauss(integrate(to_real_basis(a.wedge(b)).element)) for b in right] for a in left]


# ---------------------------------------------------------------------------
# Kähler apparatus on C^n with the Euclidean metric


@dataclass(frozen=True)
class ModeBlockOperator:
    label: str
    k: Mode
    n: int
    matrix: ExactSparse

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "k": list(self.k),
            "n": self.n,
            "entries": [
                {"row": r, "col": c, **gauss_to_json(v)} for (r, c), v in sorted(self.matrix.entries().items())
            ],
        }


class KahlerApparatus:
    """k-independent operators on ``Λ(C^{2n})`` in the bigraded basis.

    Generators ``1..n`` are ``dz_j`` and ``n+1..2n`` are ``dz̄_j``; the
    Euclidean Hermitian product makes ``dz_J ∧ dz̄_K`` orthogonal with
    squared norm ``2^{|J|+|K|}``.
    """

    _cache: dict = {}

    @classmethod
    def get(cls, n: int) -> "KahlerApparatus":
        if n not in cls._cache:
            cls._cache[n] = cls(n)
        return cls._cache[n]

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        m = 2 * n
        self.m = m
        self.dim = 2 ** m
        pos = basis_positions(m)
        self.positions = pos
        E = wedge_matrices(m)
        weights = [QQ(2) ** len(K) for K in multi_indices(m)]
        self.Id = ExactSparse.identity(self.dim)
        self._scalar_adj = {}
        self.G = ExactSparse.diag(weights)
        self.Ginv = ExactSparse.diag([QQ(1) / w for w in weights])
        self._weights = np.array([int(w) for w in weights], dtype=np.int64)
        self.wedge = E[:n]
        self.wedgebar = E[n:]
        self.wedge_adj = tuple(self.adjoint(A) for A in self.wedge)
        self.wedgebar_adj = tuple(self.adjoint(A) for A in self.wedgebar)

        bideg = [(sum(1 for i in K if i <= n), sum(1 for i in K if i > n)) for K in multi_indices(m)]
        self.bidegrees = bideg
        self.bidegree_positions = {}
        for r, pq in enumerate(bideg):
            self.bidegree_positions.setdefault(pq, []).append(r)
        self.projectors = {
            pq: ExactSparse.diag([1 if b == pq else 0 for b in bideg])
            for pq in sorted(self.bidegree_positions)
        }
        # distinct integer weight per bidegree: D commutes with A iff every π^{p,q} does
        self.bidegree_grading = ExactSparse.diag([p * (n + 1) + q for p, q in bideg])
        self.weil = ExactSparse.diag([QQ_I(*re_im(_ipow(p - q))) for p, q in bideg])

        h = HermitianForm.identity(n)
        star_entries = {}
        for K, c in pos.items():
            I, J = tuple(i for i in K if i <= n), tuple(i - n for i in K if i > n)
            img = complex_star(BigradedElement.basis(n, I, J), h)
            for (I2, J2), v in img.terms.items():
                star_entries[(pos[I2 + tuple(j + n for j in J2)], c)] = v
        self.star = ExactSparse.from_dict((self.dim, self.dim), star_entries)
        parity = ExactSparse.diag([(-1) ** len(K) for K in multi_indices(m)])
        # ⋆⋆ = (-1)^p on p-forms when m is even
        self.star_inv = self.star @ parity

        L = ExactSparse.zeros(self.dim)
        for a, b in zip(self.wedge, self.wedgebar):
            L = L.lincomb(1, a @ b, QQ_I(0, HALF))
        self.L = L
        self.L_adj = self.adjoint(L)

        # change of coordinates to and from the real basis dx_1, dy_1, ...
        self._P = self._pushforward_matrix(_real_to_generators(n))
        self._Pinv = self._pushforward_matrix(_generators_to_real(n))

    def adjoint(self, A: ExactSparse) -> ExactSparse:
        """``G^{-1} A^H G``; G is diagonal here, so this is an entrywise rescaling."""
        return A.H.diagonal_similarity(self._weights)

    def scalar_adjoint(self, c) -> ExactSparse:
        """Adjoint of multiplication by the scalar symbol ``c``, memoized per value."""
        key = (c.x, c.y)
        if key not in self._scalar_adj:
            self._scalar_adj[key] = self.adjoint(self.Id.scale(c))
        return self._scalar_adj[key]

    def _pushforward_matrix(self, images) -> ExactSparse:
        entries = {}
        for I, c in self.positions.items():
            img = pushforward(ExteriorElement.basis(self.m, I, ONE_I), list(images), self.m)
            for J, v in img.terms.items():
                entries[(self.positions[J], c)] = v
        return ExactSparse.from_dict((self.dim, self.dim), entries)

    def to_real_coords(self, A: ExactSparse) -> ExactSparse:
        """Conjugate a bigraded-basis operator into real coordinates."""
        return self._Pinv @ A @ self._P

    def to_bigraded_coords(self, A: ExactSparse) -> ExactSparse:
        return self._P @ A @ self._Pinv

    # per-mode scalars ---------------------------------------------------
    def derivative_scalars(self, k: Mode) -> tuple[list, list]:
        """Symbols of ``∂/∂z_j`` and ``∂/∂z̄_j`` on mode ``k`` = (kx_1, ky_1, …)."""
        k = _mode(k, self.m)
        dz, dzb = [], []
        for j in range(self.n):
            kx, ky = k[2 * j], k[2 * j + 1]
            dz.append(QQ_I(HALF * ky, HALF * kx))
            dzb.append(QQ_I(-HALF * ky, HALF * kx))
        return dz, dzb

    def mode_blocks(self, k: Mode) -> dict:
        """d′, d″, their adjoints and the three Laplacians at mode ``k``."""
        dz, dzb = self.derivative_scalars(k)
        N = self.dim
        dp = dpp = dp_adj = dpp_adj = ExactSparse.zeros(N)
        # the adjoint is conjugate-linear, so (Σ c_j A_j)* = Σ conj(c_j) A_j*
        for j in range(self.n):
            if dz[j]:
                dp = dp.lincomb(1, self.wedge[j], dz[j])
                dp_adj = dp_adj.lincomb(1, self.wedge_adj[j], conj(dz[j]))
            if dzb[j]:
                dpp = dpp.lincomb(1, self.wedgebar[j], dzb[j])
                dpp_adj = dpp_adj.lincomb(1, self.wedgebar_adj[j], conj(dzb[j]))
        d = dp + dpp
        d_adj = dp_adj + dpp_adj
        return {
            "d'": dp,
            "d''": dpp,
            "d'*": dp_adj,
            "d''*": dpp_adj,
            "d": d,
            "d*": d_adj,
            "Delta": (d @ d_adj) + (d_adj @ d),
            "Delta'": (dp @ dp_adj) + (dp_adj @ dp),
            "Delta''": (dpp @ dpp_adj) + (dpp_adj @ dpp),
        }


def _ipow(e: int):
    return (ONE_I, I_UNIT, -ONE_I, -I_UNIT)[e % 4]


SUPPORTED_LABELS = (
    "d", "d*", "d'", "d''", "d'*", "d''*", "Delta", "Delta'", "Delta''", "L", "L*", "star", "star^-1", "C",
    "wedge:j", "wedge*:j", "wedgebar:j", "wedgebar*:j", "del:j", "del*:j", "delbar:j", "delbar*:j", "pi:p,q",
)

_LABEL_ALIASES = {
    "d′": "d'", "d″": "d''", "d′*": "d'*", "d″*": "d''*", "Δ": "Delta", "Δ′": "Delta'", "Δ″": "Delta''",
    "⋆": "star", "*": "star",
}


def operator_block(label: str, k, n: int) -> ModeBlockOperator:
    """Exact matrix of a named operator at mode ``k`` on ``Λ(C^n)`` (bigraded basis)."""
    app = KahlerApparatus.get(n)
    k = _mode(k, 2 * n)
    name = _LABEL_ALIASES.get(label, label)
    base, _, arg = name.partition(":")
    N = app.dim
    mat = None
    if not arg:
        if name in ("d", "d*", "d'", "d''", "d'*", "d''*", "Delta", "Delta'", "Delta''"):
            mat = app.mode_blocks(k)[name]
        elif name == "L":
            mat = app.L
        elif name == "L*":
            mat = app.L_adj
        elif name == "star":
            mat = app.star
        elif name == "star^-1":
            mat = app.star_inv
        elif name == "C":
            mat = app.weil
    elif base == "pi":
        p, q = (int(x) for x in arg.split(","))
        mat = app.projectors.get((p, q), ExactSparse.zeros(N))
    else:
        j = int(arg)
        if not 1 <= j <= n:
            raise ValueError(f"index {j} out of range 1..{n}")
        adj = base.endswith("*")
        stem = base.rstrip("*")
        dz, dzb = app.derivative_scalars(k)
        if stem == "wedge":
            mat = app.wedge[j - 1]
        elif stem == "wedgebar":
            mat = app.wedgebar[j - 1]
        elif stem == "del":
            mat = ExactSparse.identity(N).scale(dz[j - 1])
        elif stem == "delbar":
            mat = ExactSparse.identity(N).scale(dzb[j - 1])
        if mat is not None and adj:
            mat = app.adjoint(mat)
    if mat is None:
        raise ValueError(f"unsupported operator label {label!r}")
    return ModeBlockOperator(label, k, n, mat)


# ---------------------------------------------------------------------------
# the identity suite


@dataclass
class RelationResult:
    relation: str
    modes_checked: int = 0
    failures: list = field(default_factory=list)
    max_residual: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, mode, residual: ExactSparse):
        self.modes_checked += 1
        if not residual.is_zero():
            norm = residual.frobenius()
            self.max_residual = max(self.max_residual, norm)
            self.failures.append({"k": list(mode) if mode is not None else None, "residual": norm})

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "modes_checked": self.modes_checked,
            "residual": "0 exact" if self.passed else self.max_residual,
            "failures": self.failures[:20],
        }


@dataclass
class KahlerReport:
    n: int
    modes: int
    relations: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations.values())

    def failed_relations(self) -> list[str]:
        return [name for name, r in self.relations.items() if not r.passed]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "modes": self.modes,
            "passed": self.passed,
            "relations": [r.to_json() for r in self.relations.values()],
        }


def _graded(A: ExactSparse, B: ExactSparse, sign: int = 1) -> ExactSparse:
    return A.commutator(B, sign)


def _static_checks(app: KahlerApparatus, report: dict):
    """Relations among the ∧ operators; these do not depend on the mode."""
    n = app.n
    N = app.dim
    I2 = ExactSparse.identity(N).scale(2)
    pos = app.positions
    for j in range(n):
        for k in range(n):
            # anticommutators: both factors are odd
            r = _graded(app.wedge_adj[j], app.wedge[k], -1)
            target = I2 if j == k else ExactSparse.zeros(N)
            report["333"].record(None, r - target)
            report["ez3"].record(None, _graded(app.wedge[j], app.wedgebar_adj[k], -1))
            report["ez33"].record(None, _graded(app.wedgebar[j], app.wedge_adj[k], -1))
    # ∧_j^* kills dz_J ∧ dz̄_K when j ∉ J, and peels dz_j off with a factor 2 otherwise
    for j in range(1, n + 1):
        kill, peel = {}, {}
        for K, c in pos.items():
            hol = tuple(i for i in K if i <= n)
            if j not in hol:
                kill[(c, c)] = 1
                s, K2 = merge_sign((j,), K)
                peel[(pos[K2], c)] = s
        Pk = ExactSparse.from_dict((N, N), kill)
        report["3A"].record(None, app.wedge_adj[j - 1] @ Pk)
        W = ExactSparse.from_dict((N, N), peel)
        report["3B"].record(None, app.wedge_adj[j - 1] @ W - Pk.scale(2))
    report["L-adjoint-sign"].record(None, app.L_adj - app.star_inv @ app.L @ app.star)


RELATION_ORDER = (
    "fikg3:[d''*,L]=i d'",
    "fikg3:[d'*,L]=-i d''",
    "fikg3:[L*,d'']=-i d'*",
    "fikg3:[L*,d']=i d''*",
    "fikg1:[d',d''*]=0",
    "fikg1:[d'',d'*]=0",
    "fikg2:Delta=2Delta'",
    "fikg2:Delta=2Delta''",
    "itslap:Delta=|k|^2",
    "lsc:[Delta,star]=0",
    "[Delta,d]=0",
    "[Delta,d*]=0",
    "[Delta,d']=0",
    "[Delta,d'']=0",
    "[Delta,d'*]=0",
    "[Delta,d''*]=0",
    "[Delta,L]=0",
    "[Delta,L*]=0",
    "[Delta,pi]=0",
    "fohg:d'*=-star d'' star",
    "fohg:d''*=-star d' star",
    "dddsq:d'^2=0",
    "dddsq:d''^2=0",
    "dddsq:d'd''+d''d'=0",
    "111",
    "3A",
    "3B",
    "ez3",
    "ez33",
    "333",
    "L-adjoint-sign",
)


def _check_mode(app: KahlerApparatus, k: Mode, report: dict):
    b = app.mode_blocks(k)
    dp, dpp, dpa, dppa = b["d'"], b["d''"], b["d'*"], b["d''*"]
    lap = b["Delta"]
    L, La = app.L, app.L_adj
    i = I_UNIT
    rec = lambda name, res: report[name].record(k, res)  # noqa: E731

    rec("fikg3:[d''*,L]=i d'", _graded(dppa, L).lincomb(1, dp, -i))
    rec("fikg3:[d'*,L]=-i d''", _graded(dpa, L).lincomb(1, dpp, i))
    rec("fikg3:[L*,d'']=-i d'*", _graded(La, dpp).lincomb(1, dpa, i))
    rec("fikg3:[L*,d']=i d''*", _graded(La, dp).lincomb(1, dppa, -i))
    rec("fikg1:[d',d''*]=0", _graded(dp, dppa, -1))
    rec("fikg1:[d'',d'*]=0", _graded(dpp, dpa, -1))
    rec("fikg2:Delta=2Delta'", lap.lincomb(1, b["Delta'"], -2))
    rec("fikg2:Delta=2Delta''", lap.lincomb(1, b["Delta''"], -2))
    rec("itslap:Delta=|k|^2", lap.lincomb(1, app.Id, -sum(x * x for x in k)))
    rec("lsc:[Delta,star]=0", _graded(lap, app.star))
    for name, op in (("d", b["d"]), ("d*", b["d*"]), ("d'", dp), ("d''", dpp), ("d'*", dpa), ("d''*", dppa),
                     ("L", L), ("L*", La)):
        rec(f"[Delta,{name}]=0", _graded(lap, op))
    rec("[Delta,pi]=0", _graded(lap, app.bidegree_grading))
    rec("fohg:d'*=-star d'' star", dpa + app.star @ dpp @ app.star)
    rec("fohg:d''*=-star d' star", dppa + app.star @ dp @ app.star)
    rec("dddsq:d'^2=0", dp @ dp)
    rec("dddsq:d''^2=0", dpp @ dpp)
    rec("dddsq:d'd''+d''d'=0", _graded(dp, dpp, -1))
    dz, dzb = app.derivative_scalars(k)
    Id = app.Id
    worst = ExactSparse.zeros(app.dim)
    for j in range(app.n):
        r1 = app.scalar_adjoint(dz[j]) + Id.scale(dzb[j])
        r2 = app.scalar_adjoint(dzb[j]) + Id.scale(dz[j])
        for r in (r1, r2):
            if not r.is_zero():
                worst = r
    rec("111", worst)


def kahler_identity_suite(n: int, mode_set: Iterable | None = None, max_mode: int = 2) -> KahlerReport:
    """Evaluate the Kähler identities as exact block residuals over a finite mode set.

    The default mode set is every ``k ∈ Z^{2n}`` with ``|k|∞ ≤ max_mode``.
    Relations among the wedge operators and their adjoints involve no
    derivative and are the same matrix at every mode, so they are checked
    once.
    """
    app = KahlerApparatus.get(n)
    modes = modes_in_box(2 * n, max_mode) if mode_set is None else [_mode(k, 2 * n) for k in mode_set]
    report = {name: RelationResult(name) for name in RELATION_ORDER}
    _static_checks(app, report)
    for k in modes:
        _check_mode(app, k, report)
    return KahlerReport(n, len(modes), report)
