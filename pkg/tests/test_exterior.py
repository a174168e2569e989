import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgekit import exterior
from hodgekit.exterior import (
    ExteriorElement,
    MetricSpec,
    OrientationSpec,
    complement_sign,
    dual_metric,
    hodge_star,
    inner_product,
    star_star_sign,
    volume_element,
    wedge,
)
from hodgekit.scalars import QQ, Surd

from helpers import elements, homogeneous, inner_product_ldl, metrics, small_rationals, sympy_det


def e(m, *I):
    return ExteriorElement.basis(m, I)


@pytest.mark.parametrize("I, m, sign, CI", [
    ((), 3, 1, (1, 2, 3)),
    ((2,), 3, -1, (1, 3)),
    ((1, 2), 4, 1, (3, 4)),
])
def test_complement_sign(I, m, sign, CI):
    assert complement_sign(I, m) == (sign, CI)


@pytest.mark.parametrize("bad", [(2, 1), (0,), (4,), (1, 1)])
def test_invalid_multi_index(bad):
    with pytest.raises(ValueError):
        complement_sign(bad, 3)


def test_wedge_examples():
    assert e(2, 1) ^ e(2, 2) == e(2, 1, 2)
    assert e(2, 2) ^ e(2, 1) == -e(2, 1, 2)
    assert (e(2, 1) + e(2, 2)) ^ e(2, 2) == e(2, 1, 2)


def test_wedge_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(e(2, 1), e(3, 1))


def test_zero_coefficients_pruned():
    u = ExteriorElement(3, {(1,): QQ(0), (2,): QQ(1)})
    assert list(u.terms) == [(2,)]
    assert (u - u).is_zero()


@given(st.integers(1, 6).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, m), st.integers(0, m), st.data())))
def test_wedge_graded_commutative(args):
    m, p, q, data = args
    u = data.draw(homogeneous(m, p))
    v = data.draw(homogeneous(m, q))
    assert u ^ v == (v ^ u) * (-1 if (p * q) % 2 else 1)


@given(st.integers(1, 6).flatmap(lambda m: st.tuples(elements(m), elements(m), elements(m))))
def test_wedge_associative(triple):
    a, b, c = triple
    assert (a ^ b) ^ c == a ^ (b ^ c)


def test_inner_product_examples():
    I2 = MetricSpec.euclidean(2)
    assert inner_product(e(2, 1, 2), e(2, 1, 2), I2) == 1
    g = MetricSpec(((2, 1), (1, 1)))
    assert inner_product(e(2, 1, 2), e(2, 1, 2), g) == 1
    assert inner_product(e(2, 1), e(2, 1, 2), g) == 0


@given(st.integers(1, 5).flatmap(lambda m: st.tuples(metrics(m), st.integers(0, m), st.data())))
def test_inner_product_matches_change_of_basis_oracle(args):
    g, p, data = args
    u = data.draw(homogeneous(g.dim, p))
    v = data.draw(homogeneous(g.dim, p))
    assert inner_product(u, v, g) == inner_product_ldl(u, v, g)
    assert inner_product(u, v, g) == inner_product(v, u, g)
    if not u.is_zero():
        assert inner_product(u, u, g) > 0


def test_minors_match_independent_determinant():
    g = MetricSpec(((3, 1, 0, 1), (1, 2, 1, 0), (0, 1, 4, 1), (1, 0, 1, 5)))
    for I in exterior.multi_indices(4, 2):
        for J in exterior.multi_indices(4, 2):
            rows = [[g.gram[i - 1][j - 1] for j in J] for i in I]
            assert g.minor(I, J) == QQ(str(sympy_det(rows)))


@pytest.mark.parametrize("gram, inverse", [
    (((1, 0), (0, 1)), ((1, 0), (0, 1))),
    (((4,),), ((QQ(1, 4),),)),
    (((2, 1), (1, 1)), ((1, -1), (-1, 2))),
])
def test_dual_metric(gram, inverse):
    d = dual_metric(gram)
    assert d == MetricSpec(inverse)
    assert dual_metric(d) == MetricSpec(gram)


def test_dual_metric_rejects_singular():
    with pytest.raises(ValueError):
        dual_metric(((1, 1), (1, 1)))


def test_metric_rejects_indefinite_and_asymmetric():
    with pytest.raises(ValueError):
        MetricSpec(((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        MetricSpec(((1, 0), (1, 1)))


def test_volume_element_examples():
    assert volume_element(MetricSpec.euclidean(3)) == e(3, 1, 2, 3)
    assert volume_element(MetricSpec.euclidean(3), OrientationSpec(-1)) == -e(3, 1, 2, 3)
    assert volume_element(MetricSpec(((4,),))) == e(1, 1) * QQ(1, 2)


def test_volume_element_has_unit_norm_with_irrational_det():
    g = MetricSpec(((2, 0), (0, 1)))
    dV = volume_element(g)
    assert isinstance(dV.coeff((1, 2)), Surd)
    assert inner_product(dV, dV, g) == 1


def test_star_examples():
    g = MetricSpec.euclidean(2)
    assert hodge_star(e(2, 1), g) == e(2, 2)
    assert hodge_star(e(2, 2), g) == -e(2, 1)
    for m in range(1, 5):
        gm = MetricSpec.euclidean(m)
        one = ExteriorElement.scalar(m)
        assert hodge_star(one, gm) == volume_element(gm)
        assert hodge_star(volume_element(gm), gm) == one


def test_star_non_homogeneous_extends_linearly():
    g = MetricSpec(((2, 1), (1, 3)))
    u = ExteriorElement(2, {(): QQ(3), (1,): QQ(1, 2), (1, 2): QQ(-1)})
    assert hodge_star(u, g) == sum((hodge_star(u.part(p), g) for p in range(3)), ExteriorElement.zero(2))


@given(st.integers(1, 5).flatmap(lambda m: st.tuples(metrics(m), st.integers(0, m), st.sampled_from([1, -1]),
                                                      st.data())))
def test_star_defining_identity(args):
    g, p, sign, data = args
    o = OrientationSpec(sign)
    u = data.draw(homogeneous(g.dim, p))
    v = data.draw(homogeneous(g.dim, p))
    assert u ^ hodge_star(v, g, o) == volume_element(g, o) * inner_product(u, v, g)


@given(st.integers(1, 5).flatmap(lambda m: st.tuples(metrics(m), st.integers(0, m), st.data())))
def test_star_star_and_isometry(args):
    g, p, data = args
    u = data.draw(homogeneous(g.dim, p))
    v = data.draw(homogeneous(g.dim, p))
    su, sv = hodge_star(u, g), hodge_star(v, g)
    assert hodge_star(su, g) == u * star_star_sign(p, g.dim)
    assert inner_product(su, sv, g) == inner_product(u, v, g)


def test_element_json_roundtrip():
    g = MetricSpec(((2, 1, 0), (1, 2, 0), (0, 0, 5)))
    u = hodge_star(e(3, 1) + e(3, 2, 3) * QQ(-3, 7), g)
    data = json.loads(json.dumps(u.to_json()))
    assert ExteriorElement.from_json(data) == u
    assert json.loads(json.dumps(e(3, 1, 2).to_json())) == {"dim": 3, "terms": [{"index": [1, 2], "num": 1, "den": 1}]}


def test_metric_json_roundtrip():
    g = MetricSpec(((2, QQ(1, 3)), (QQ(1, 3), 1)))
    assert MetricSpec.from_json(json.loads(json.dumps(g.to_json()))) == g
