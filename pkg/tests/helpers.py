"""Shared strategies and independent oracles for the test suite."""
from __future__ import annotations

import random

import sympy
from hypothesis import strategies as st

from hodgekit import exterior
from hodgekit.exterior import ExteriorElement, MetricSpec, multi_indices
from hodgekit.scalars import QQ, QQ_I

small_rationals = st.builds(
    lambda n, d: QQ(n, d),
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=1, max_value=4),
)
gauss = st.builds(QQ_I, small_rationals, small_rationals)


@st.composite
def metrics(draw, m: int | None = None, max_dim: int = 4):
    """Positive definite rational Gram matrices ``AᵀA + I``."""
    if m is None:
        m = draw(st.integers(min_value=1, max_value=max_dim))
    A = [[draw(small_rationals) for _ in range(m)] for _ in range(m)]
    return MetricSpec(tuple(
        tuple(sum((A[k][i] * A[k][j] for k in range(m)), QQ(0)) + QQ(int(i == j)) for j in range(m))
        for i in range(m)))


@st.composite
def homogeneous(draw, m: int, p: int, coeffs=small_rationals):
    idx = multi_indices(m, p)
    chosen = draw(st.lists(st.sampled_from(idx), min_size=1, max_size=min(4, len(idx)), unique=True))
    return ExteriorElement(m, {I: draw(coeffs) for I in chosen})


@st.composite
def elements(draw, m: int, coeffs=small_rationals):
    idx = multi_indices(m)
    chosen = draw(st.lists(st.sampled_from(idx), max_size=5, unique=True))
    return ExteriorElement(m, {I: draw(coeffs) for I in chosen})


def random_metric(m: int, rng: random.Random) -> MetricSpec:
    A = [[QQ(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(m)] for _ in range(m)]
    return MetricSpec(tuple(
        tuple(sum((A[k][i] * A[k][j] for k in range(m)), QQ(0)) + QQ(int(i == j)) for j in range(m))
        for i in range(m)))


def random_homogeneous(m: int, p: int, rng: random.Random) -> ExteriorElement:
    return ExteriorElement(m, {I: QQ(rng.randint(-5, 5), rng.randint(1, 4)) for I in multi_indices(m, p)})


def inner_product_ldl(u: ExteriorElement, v: ExteriorElement, g: MetricSpec):
    """Inner product by an exact change to an orthogonal basis.

    Factor ``g = L D Lᵀ`` (sympy, unit lower triangular ``L``).  With
    ``f = L⁻¹e`` the basis ``f`` is orthogonal with ``<f_i, f_i> = D_i``,
    and ``e_i = Σ_j L_ij f_j``.  Pushing ``u`` and ``v`` into the ``f``
    basis leaves a diagonal sum with no Gram determinants involved.
    """
    m = g.dim
    G = sympy.Matrix(m, m, lambda i, j: sympy.Rational(int(g.gram[i][j].numerator), int(g.gram[i][j].denominator)))
    L, D = G.LDLdecomposition(hermitian=False)
    images = [
        ExteriorElement(m, {(j + 1,): QQ(int(L[i, j].p), int(L[i, j].q)) for j in range(m) if L[i, j] != 0})
        for i in range(m)
    ]
    d = [QQ(int(D[i, i].p), int(D[i, i].q)) for i in range(m)]
    uf = exterior.pushforward(u, images, m)
    vf = exterior.pushforward(v, images, m)
    total = QQ(0)
    for I, a in uf.terms.items():
        b = vf.terms.get(I)
        if b:
            w = QQ(1)
            for i in I:
                w *= d[i - 1]
            total += a * b * w
    return total


def sympy_det(rows):
    return sympy.Matrix([[sympy.nsimplify(str(x)) for x in r] for r in rows]).det()
