"""Acceptance gate: twelve criteria, each reported as one PASS/FAIL line."""
import random
import time
from math import comb

import pytest

from helpers import inner_product_ldl, random_homogeneous, random_metric
from hodgekit import exterior, torus
from hodgekit.degeneration import IntersectionMatrix, contractibility_check, geometric_eps, primitive_limit
from hodgekit.exterior import ExteriorElement, MetricSpec, hodge_star, inner_product, multi_indices, volume_element
from hodgekit.lefschetz import (
    HodgeStructureSlice,
    cup_form,
    hard_lefschetz_check,
    hodge_diamond,
    hodge_riemann_check,
    hr_polarization,
    polarization_check,
    primitive_decompose,
    ring_builtin,
)
from hodgekit.scalars import QQ, QQ_I
from hodgekit.sparse import ExactSparse


def criterion(number, title):
    return pytest.mark.criterion(number, title)


PASSING_RINGS = ([("pn", n) for n in range(7)] + [("torus", n) for n in (1, 2, 3)]
                 + [("quadric", None), ("product_P1_P1", None), ("blowup_P2", None)])
ALL_RINGS = PASSING_RINGS + [("blowup_P3_point", None)]


# 1 ---------------------------------------------------------------------------


@criterion(1, "star involution on 50 random metrics, m <= 6, under 10 s")
def test_star_involution():
    rng = random.Random(1)
    start = time.perf_counter()
    for m in range(1, 7):
        basis = [ExteriorElement.basis(m, I) for I in multi_indices(m)]
        for _ in range(50):
            g = random_metric(m, rng)
            for e in basis:
                p = len(next(iter(e.terms)))
                assert hodge_star(hodge_star(e, g), g) == e * (-1) ** (p * (m - p))
    elapsed = time.perf_counter() - start
    print(f"criterion 1 runtime {elapsed:.2f} s")
    assert elapsed < 10


# 2 ---------------------------------------------------------------------------


@criterion(2, "u ^ *v = <u,v> dV on random pairs; *1 = dV, *dV = 1")
@pytest.mark.parametrize("m", range(1, 6))
def test_star_defining_identity(m):
    rng = random.Random(20 + m)
    for _ in range(6):
        g = random_metric(m, rng)
        dV = volume_element(g)
        for p in range(m + 1):
            u, v = random_homogeneous(m, p, rng), random_homogeneous(m, p, rng)
            assert (u ^ hodge_star(v, g)) == dV * inner_product(u, v, g)


@criterion(2, "u ^ *v = <u,v> dV on random pairs; *1 = dV, *dV = 1")
@pytest.mark.parametrize("m", range(1, 7))
def test_star_of_unit_and_volume(m):
    rng = random.Random(40 + m)
    for g in (MetricSpec.euclidean(m), random_metric(m, rng)):
        one, dV = ExteriorElement.scalar(m), volume_element(g)
        assert hodge_star(one, g) == dV
        assert hodge_star(dV, g) == one


# 3 ---------------------------------------------------------------------------


@criterion(3, "Gram-determinant inner product equals the LDL change-of-basis oracle, 100 pairs")
def test_inner_product_oracle():
    rng = random.Random(3)
    for trial in range(100):
        m = 1 + trial % 5
        p = rng.randint(0, m)
        g = random_metric(m, rng)
        u, v = random_homogeneous(m, p, rng), random_homogeneous(m, p, rng)
        assert inner_product(u, v, g) == inner_product_ldl(u, v, g)


# 4 ---------------------------------------------------------------------------


@criterion(4, "torus: dim H^p = C(m,p), exact Hodge decomposition, Poincare pairing, Delta = |k|^2")
@pytest.mark.parametrize("m", range(1, 6))
def test_torus_harmonic_dimensions(m):
    assert list(torus.betti_numbers(m, 1)) == [comb(m, p) for p in range(m + 1)]


@criterion(4, "torus: dim H^p = C(m,p), exact Hodge decomposition, Poincare pairing, Delta = |k|^2")
@pytest.mark.parametrize("m", range(1, 5))
def test_torus_decomposition_random(m):
    rng = random.Random(400 + m)
    g = MetricSpec.euclidean(m)
    for _ in range(4):
        modes = {tuple(rng.randint(-3, 3) for _ in range(m)) for _ in range(3)} | {(0,) * m}
        F = torus.FourierForm(m, {
            k: ExteriorElement(m, {I: QQ_I(QQ(rng.randint(-4, 4), rng.randint(1, 3)), QQ(rng.randint(-4, 4), 2))
                                   for I in multi_indices(m)})
            for k in modes})
        dec = torus.hodge_decompose(F, g)
        assert dec.reconstruct() == F
        parts = (dec.harmonic, dec.exact, dec.coexact)
        for k in modes:
            coeffs = [P.coefficient(k) for P in parts]
            for i in range(3):
                for j in range(i + 1, 3):
                    assert not torus.mode_inner(coeffs[i], coeffs[j], g)
        assert torus.codifferential(dec.exact, g) == torus.codifferential(F, g)
        assert torus.exterior_d(dec.coexact) == torus.exterior_d(F)


@criterion(4, "torus: dim H^p = C(m,p), exact Hodge decomposition, Poincare pairing, Delta = |k|^2")
@pytest.mark.parametrize("m", range(1, 7))
def test_torus_poincare_pairing(m):
    for p in range(m + 1):
        assert torus.linalg.det(torus.poincare_pairing(m, p))


@criterion(4, "torus: dim H^p = C(m,p), exact Hodge decomposition, Poincare pairing, Delta = |k|^2")
@pytest.mark.parametrize("m", range(1, 5))
def test_torus_laplacian_eigenvalues(m):
    g = MetricSpec.euclidean(m)
    for k in torus.modes_in_box(m, 2):
        assert torus.laplacian_eigenvalue(k, g) == sum(x * x for x in k)
        assert torus.laplacian_block(k, g) == ExactSparse.identity(2 ** m).scale(sum(x * x for x in k))


# 5 ---------------------------------------------------------------------------

REQUIRED = ["fikg3:[d''*,L]=i d'", "fikg3:[d'*,L]=-i d''", "fikg3:[L*,d'']=-i d'*", "fikg3:[L*,d']=i d''*",
            "fikg1:[d',d''*]=0", "fikg1:[d'',d'*]=0", "fikg2:Delta=2Delta'", "fikg2:Delta=2Delta''",
            "lsc:[Delta,star]=0", "[Delta,pi]=0", "111", "ez3", "ez33", "333", "3A", "3B"]


@criterion(5, "Kahler identity suite, n = 1..3, |k| <= 2, zero residual, under 60 s")
def test_kahler_suite():
    start = time.perf_counter()
    for n in (1, 2, 3):
        report = torus.kahler_identity_suite(n, max_mode=2)
        assert set(REQUIRED) <= set(report.relations)
        assert report.modes == 5 ** (2 * n)
        assert report.passed, report.failed_relations()
    elapsed = time.perf_counter() - start
    print(f"criterion 5 runtime {elapsed:.2f} s")
    assert elapsed < 60


# 6 ---------------------------------------------------------------------------


@criterion(6, "hard Lefschetz on the fixtures; blowup_P3_point with M = h fails at r = 1")
@pytest.mark.parametrize("kind, n", [("pn", n) for n in range(7)] + [("torus", n) for n in (1, 2, 3)]
                         + [("quadric", None), ("product_P1_P1", None)])
def test_hard_lefschetz(kind, n):
    assert hard_lefschetz_check(ring_builtin(kind, n)).passed


@criterion(6, "hard Lefschetz on the fixtures; blowup_P3_point with M = h fails at r = 1")
def test_hard_lefschetz_failure():
    rep = hard_lefschetz_check(ring_builtin("blowup_P3_point"), {"h": 1})
    assert not rep.passed and rep.first_failure == 1
    assert [s.r for s in rep.steps if s.rank < s.source_dim] == [1]


# 7 ---------------------------------------------------------------------------


@criterion(7, "primitive decomposition: dimension count and orthogonal direct sum")
@pytest.mark.parametrize("kind, n", PASSING_RINGS)
def test_primitive_decomposition(kind, n):
    R = ring_builtin(kind, n)
    for l in range(R.n + 1):
        dec = primitive_decompose(R, None, l)
        assert dec.passed
        for j, (have, want) in dec.dimension_identity.items():
            assert have == want
            deg = l - 2 * j
            assert want == R.betti(deg) - (R.betti(deg - 2) if deg >= 2 else 0)


# 8 ---------------------------------------------------------------------------


@criterion(8, "Hodge-Riemann: torus(1) gives 2 and 2; quadric primitive [2] against raw cup [-2]")
def test_hodge_riemann_values():
    t = hodge_riemann_check(ring_builtin("torus", 1), None, 1)
    values = {b.bidegree: b.matrix for b in t.blocks}
    assert values[(1, 0)] == [[QQ_I(2, 0)]] and values[(0, 1)] == [[QQ_I(2, 0)]]
    assert t.passed
    q = hodge_riemann_check(ring_builtin("quadric"), None, 2)
    (block,) = [b for b in q.blocks if b.matrix]
    (v,) = HodgeStructureSlice.primitive(ring_builtin("quadric"), None, 2).vectors
    assert [x for x in v if x] in ([QQ_I(1, 0), QQ_I(-1, 0)], [QQ_I(-1, 0), QQ_I(1, 0)])  # ±(a − b)
    assert block.matrix == [[QQ_I(2, 0)]]
    assert block.raw_cup == [[QQ_I(-2, 0)]]
    assert block.positive and q.passed


# 9 ---------------------------------------------------------------------------


def _polarized(kind, n):
    R = ring_builtin(kind, n)
    for l in range(R.n + 1):
        slc = HodgeStructureSlice.primitive(R, None, l)
        if slc.vectors:
            yield l, polarization_check(slc, hr_polarization(R, None, l))


@criterion(9, "polarizations: parity of Psi, Psi~ positive definite, restriction to a sub-structure")
@pytest.mark.parametrize("kind, n", [("torus", 1), ("quadric", None)] + [("pn", n) for n in range(1, 7)])
def test_polarization(kind, n):
    seen = 0
    for l, rep in _polarized(kind, n):
        seen += 1
        assert rep.psi_parity == ("symmetric" if l % 2 == 0 else "antisymmetric")
        assert rep.parity_ok and rep.tilde_symmetric and rep.positive and rep.weil_square_ok
        assert rep.passed
    assert seen


@criterion(9, "polarizations: parity of Psi, Psi~ positive definite, restriction to a sub-structure")
def test_polarization_quadric_minus_integral():
    Q = ring_builtin("quadric")
    rep = polarization_check(HodgeStructureSlice.primitive(Q, None, 2), cup_form(Q, None, 0, sign=-1))
    assert rep.passed and rep.psi_parity == "symmetric"


@criterion(9, "polarizations: parity of Psi, Psi~ positive definite, restriction to a sub-structure")
def test_polarization_restriction():
    R = ring_builtin("torus", 2)
    full = HodgeStructureSlice.primitive(R, None, 1)
    sub = HodgeStructureSlice(R, 1, [R.basis_vector("dz2"), R.basis_vector("dzb2")])
    rep = polarization_check(full, hr_polarization(R, None, 1), substructures=[sub])
    assert rep.passed
    assert [r.passed for r in rep.restrictions] == [True]


# 10 --------------------------------------------------------------------------


@criterion(10, "Hodge diamond identities, even odd Betti numbers, b_2k > 0 on every builtin")
@pytest.mark.parametrize("kind, n", ALL_RINGS)
def test_hodge_diamond(kind, n):
    rep = hodge_diamond(ring_builtin(kind, n))
    for name in ("pqid2", "pqid3", "pqid4", "pqid5", "pqid6", "b_odd_even", "cckmt"):
        assert rep.checks[name], name
    N = len(rep.betti) - 1
    assert all(rep.betti[k] % 2 == 0 for k in range(1, N + 1, 2))
    assert all(rep.betti[k] > 0 for k in range(0, N + 1, 2))


# 11 --------------------------------------------------------------------------


def _a_chain(n):
    return [[-2 if i == j else int(abs(i - j) == 1) for j in range(n)] for i in range(n)]


@criterion(11, "contractibility verdicts on the reference intersection matrices")
@pytest.mark.parametrize("m, rows, ok", [(1, [[-1]], True), (2, [[1]], True)]
                         + [(1, _a_chain(n), True) for n in range(1, 6)]
                         + [(1, [[0]], False), (2, [[0]], False), (1, [[1, 2], [2, 1]], False),
                            (1, [[-1, 0], [0, 1]], False), (2, [[1, 3], [3, 1]], False)])
def test_contractibility(m, rows, ok):
    assert contractibility_check(IntersectionMatrix(m, rows)).consistent is ok


# 12 --------------------------------------------------------------------------


@criterion(12, "primitive limit on blowup_P2: dim 1, monotone gap below 1e-2, polarization value 1")
def test_primitive_limit():
    R = ring_builtin("blowup_P2")
    tr = primitive_limit(R, {"h": 1}, {"h": 2, "e": -1}, geometric_eps(10))
    assert [s.eps for s in tr.steps] == [QQ(1, 2 ** j) for j in range(1, 11)]
    assert [s.dim for s in tr.steps] == [1] * 10
    gaps = [s.gap for s in tr.steps]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-2
    (v,) = tr.limit_basis
    assert [i for i, x in enumerate(v) if x] == [i for i, x in enumerate(R.basis_vector("e")) if x]
    assert tr.polarization_matrix == [[QQ_I(1, 0)]]
    assert tr.polarization_ok and tr.passed
