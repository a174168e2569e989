import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgekit import hermitian as H
from hodgekit.exterior import multi_indices
from hodgekit.hermitian import (
    BigradedElement,
    HermitianForm,
    RealForm,
    associated_form,
    complex_star,
    complex_volume,
    conjugate,
    hermitian_inner,
    project_bidegree,
    to_complex_basis,
    to_real_basis,
    weil_apply,
    wirtinger_volume_check,
)
from hodgekit.scalars import QQ, QQ_I

from helpers import gauss

I_ = QQ_I(0, 1)
HALF = QQ_I(QQ(1, 2), 0)


@st.composite
def bigraded(draw, n: int, p: int | None = None, q: int | None = None):
    keys = [(I, J) for I in multi_indices(n, p) for J in multi_indices(n, q)] if p is not None else [
        (I, J) for I in multi_indices(n) for J in multi_indices(n)]
    chosen = draw(st.lists(st.sampled_from(keys), min_size=1, max_size=4, unique=True))
    return BigradedElement(n, {k: draw(gauss.filter(bool)) for k in chosen})


@st.composite
def hermitian_pd(draw, n: int):
    """``AᴴA + I`` with Gaussian-rational ``A``."""
    A = [[draw(gauss) for _ in range(n)] for _ in range(n)]
    return HermitianForm(tuple(
        tuple(sum((H.conj(A[k][i]) * A[k][j] for k in range(n)), QQ_I(0, 0)) + QQ_I(int(i == j), 0)
              for j in range(n))
        for i in range(n)))


def test_basis_change_examples():
    assert to_complex_basis(RealForm.dx(1, 1)) == BigradedElement(1, {((1,), ()): HALF, ((), (1,)): HALF})
    dz = BigradedElement.dz(2, 2)
    assert to_complex_basis(to_real_basis(dz)) == dz
    area = RealForm.basis(1, (1, 2))
    assert to_complex_basis(area) == BigradedElement(1, {((1,), (1,)): QQ_I(0, QQ(1, 2))})


@given(st.integers(1, 3).flatmap(lambda n: bigraded(n)))
def test_basis_changes_are_inverse(u):
    assert to_complex_basis(to_real_basis(u)) == u


def test_real_forms_map_to_conjugation_fixed():
    u = RealForm(2, RealForm.dx(2, 1).element + RealForm.basis(2, (2, 3), QQ(3)).element)
    v = to_complex_basis(u)
    assert conjugate(v) == v


def test_projection_examples():
    assert project_bidegree(to_complex_basis(RealForm.dx(1, 1)), 1, 0) == BigradedElement(1, {((1,), ()): HALF})
    dzdzb = BigradedElement.basis(1, (1,), (1,))
    assert project_bidegree(dzdzb, 1, 1) == dzdzb
    assert project_bidegree(dzdzb, 2, 0).is_zero()


@given(st.integers(1, 3).flatmap(lambda n: bigraded(n)))
def test_projections_sum_to_identity(u):
    total = BigradedElement.zero(u.n)
    for p in range(u.n + 1):
        for q in range(u.n + 1):
            total = total + project_bidegree(u, p, q)
    assert total == u


def test_conjugation_examples():
    assert conjugate(BigradedElement.dz(1, 1) * I_) == BigradedElement.dzbar(1, 1) * QQ_I(0, -1)
    assert conjugate(BigradedElement.basis(2, (1,), (2,))) == BigradedElement.basis(2, (2,), (1,)) * QQ_I(-1, 0)


@given(st.integers(1, 3).flatmap(lambda n: bigraded(n)))
def test_conjugation_involution_swaps_types(u):
    assert conjugate(conjugate(u)) == u
    assert conjugate(u).bidegrees() == {(q, p) for p, q in u.bidegrees()}


def test_associated_form_examples():
    omega = associated_form(HermitianForm.identity(3))
    xy = sum((RealForm.basis(3, (2 * j - 1, 2 * j)).element for j in (2, 3)), RealForm.basis(3, (1, 2)).element)
    assert to_real_basis(omega) == RealForm(3, xy)
    assert associated_form(HermitianForm(((1,),))) == BigradedElement.basis(1, (1,), (1,)) * QQ_I(0, QQ(1, 2))
    h = HermitianForm(((1, I_), (-I_, 1)))
    w = associated_form(h)
    assert w.coeff((1,), (2,)) == QQ_I(0, QQ(1, 2)) * I_
    assert conjugate(w) == w


def test_hermitian_form_rejects_nonhermitian():
    with pytest.raises(ValueError):
        HermitianForm(((1, I_), (I_, 1)))


@given(st.integers(1, 3).flatmap(hermitian_pd))
def test_associated_form_is_real_type_11(h):
    w = associated_form(h)
    assert conjugate(w) == w
    assert w.bidegrees() <= {(1, 1)}


def test_inner_product_normalization():
    h = HermitianForm.identity(2)
    dz1 = BigradedElement.dz(2, 1)
    assert hermitian_inner(dz1, dz1, h) == QQ_I(2, 0)
    assert hermitian_inner(dz1, BigradedElement.dzbar(2, 1), h) == QQ_I(0, 0)
    for I in multi_indices(2):
        for J in multi_indices(2):
            u = BigradedElement.basis(2, I, J)
            assert hermitian_inner(u, u, h) == QQ_I(2 ** (len(I) + len(J)), 0)


@given(st.integers(1, 2).flatmap(lambda n: st.tuples(hermitian_pd(n), bigraded(n), bigraded(n))))
def test_inner_product_hermitian_and_positive(args):
    h, u, v = args
    assert hermitian_inner(u, v, h) == H.conj(hermitian_inner(v, u, h))
    assert H.re_im(hermitian_inner(u, u, h))[0] > 0


def test_bidegrees_orthogonal():
    h = HermitianForm(((2, I_), (-I_, 3)))
    u = BigradedElement.basis(2, (1,), ())
    v = BigradedElement.basis(2, (), (2,))
    assert hermitian_inner(u, v, h) == QQ_I(0, 0)


def test_complex_star_examples():
    h = HermitianForm.identity(1)
    one = BigradedElement.basis(1)
    assert complex_star(one, h) == BigradedElement.basis(1, (1,), (1,)) * QQ_I(0, QQ(1, 2))
    assert complex_star(one, h) == complex_volume(h)
    n = 3
    s = complex_star(BigradedElement.dz(n, 2), HermitianForm.identity(n))
    assert s.bidegree == (n, n - 1)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.integers(0, n), st.integers(0, n), st.data(), st.just(n))))
def test_complex_star_bidegree_and_square(args):
    p, q, data, n = args
    u = data.draw(bigraded(n, p, q))
    h = HermitianForm.identity(n)
    s = complex_star(u, h)
    assert s.bidegrees() <= {(n - q, n - p)}
    assert complex_star(s, h) == u * QQ_I((-1) ** (p + q), 0)


@given(st.integers(1, 2).flatmap(lambda n: st.tuples(hermitian_pd(n), st.integers(0, n), st.integers(0, n),
                                                      st.data(), st.just(n))))
def test_complex_star_defining_identity(args):
    h, p, q, data, n = args
    u = data.draw(bigraded(n, p, q))
    v = data.draw(bigraded(n, p, q))
    lhs = u.wedge(conjugate(complex_star(v, h)))
    assert lhs == complex_volume(h) * hermitian_inner(u, v, h)


def test_weil_examples():
    dz = BigradedElement.dz(1, 1)
    assert weil_apply(dz) == dz * I_
    dzdzb = BigradedElement.basis(1, (1,), (1,))
    assert weil_apply(dzdzb) == dzdzb
    assert weil_apply(weil_apply(dz)) == -dz


@given(st.integers(1, 3).flatmap(lambda n: bigraded(n)))
def test_weil_square_and_commutes_with_star(u):
    h = HermitianForm.identity(u.n)
    sq = weil_apply(weil_apply(u))
    expected = BigradedElement.zero(u.n)
    for (I, J), c in u.terms.items():
        expected = expected + BigradedElement.basis(u.n, I, J, c * QQ_I((-1) ** (len(I) + len(J)), 0))
    assert sq == expected
    assert weil_apply(complex_star(u, h)) == complex_star(weil_apply(u), h)
    real = u + conjugate(u)
    assert conjugate(weil_apply(real)) == weil_apply(real)


@pytest.mark.parametrize("h", [
    HermitianForm.identity(1),
    HermitianForm.identity(2),
    HermitianForm(((2, 0), (0, 3))),
    HermitianForm(((2, I_), (-I_, 2))),
    HermitianForm(((3, 1, 0), (1, 2, I_), (0, -I_, 2))),
])
def test_wirtinger(h):
    assert wirtinger_volume_check(h)


def test_wirtinger_requires_metric():
    with pytest.raises(ValueError):
        wirtinger_volume_check(HermitianForm(((1, 2), (2, 1))))


def test_json_roundtrip():
    u = BigradedElement(2, {((1,), (2,)): QQ_I(1, -2), ((), ()): QQ_I(QQ(1, 3), 0)})
    assert BigradedElement.from_json(json.loads(json.dumps(u.to_json()))) == u
    h = HermitianForm(((2, I_), (-I_, 2)))
    assert HermitianForm.from_json(json.loads(json.dumps(h.to_json()))) == h
