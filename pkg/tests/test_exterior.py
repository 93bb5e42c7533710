import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aloff_wallach.exterior import (DiagMetric, Form, InputHasVerticalLeg, So3Form, basis_masks, bracket_wedge,
                                    contract, d, from_dense, hodge, inner, norm_sq, permutation_sign,
                                    so3_curvature, to_dense, wedge, wedge_matrix)
from aloff_wallach.su3_frame import structure_constants

HORIZONTAL = range(1, 8)
coef = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def forms(draw, degree, horizontal=True):
    top = 7 if horizontal else 8
    combos = list(itertools.combinations(range(1, top + 1), degree))
    picks = draw(st.lists(st.sampled_from(combos), min_size=1, max_size=4, unique=True))
    out = Form.zero(degree)
    for idx in picks:
        out = out + Form.mono(*idx, coef=draw(coef))
    return out


def test_mono_reorders_with_sign():
    assert Form.mono(2, 1) == -Form.mono(1, 2)
    assert Form.mono(3, 3).is_zero()


def test_permutation_sign():
    assert permutation_sign([1, 2, 3]) == 1
    assert permutation_sign([2, 1, 3]) == -1
    assert permutation_sign([3, 1, 2]) == 1


@given(forms(2), forms(3))
@settings(max_examples=50, deadline=None)
def test_wedge_graded_commutative(x, y):
    assert wedge(x, y).allclose(wedge(y, x) * ((-1) ** (x.degree * y.degree)))


@given(forms(1), forms(1), forms(2))
@settings(max_examples=50, deadline=None)
def test_wedge_associative(x, y, z):
    assert wedge(wedge(x, y), z).allclose(wedge(x, wedge(y, z)))


@pytest.mark.parametrize("kl", [(1, 2), (1, -1), (1, 1)])
def test_d_squared_vanishes_on_coframe(kl):
    sc = structure_constants(*kl)
    for a in range(1, 9):
        assert d(d(Form.mono(a), sc), sc).is_zero(1e-12)


@given(forms(1, horizontal=False), forms(2, horizontal=False))
@settings(max_examples=30, deadline=None)
def test_d_is_an_antiderivation(x, y):
    sc = structure_constants(1, 2)
    lhs = d(wedge(x, y), sc)
    rhs = wedge(d(x, sc), y) - wedge(x, d(y, sc))
    assert lhs.allclose(rhs, atol=1e-10)


@given(forms(3))
@settings(max_examples=50, deadline=None)
def test_hodge_is_an_involution(x):
    g = DiagMetric((0.5, 2.0, 1.5, 0.7, 0.5, 2.0, 1.5, 1.0))
    assert hodge(hodge(x, g), g).allclose(x, atol=1e-10)


@given(forms(2), forms(2))
@settings(max_examples=50, deadline=None)
def test_hodge_pairing_matches_inner(x, y):
    g = DiagMetric((1.3, 0.4, 2.0, 0.9, 1.3, 0.4, 2.0, 1.0))
    lhs = wedge(x, hodge(y, g))
    assert lhs.coeff(*HORIZONTAL) == pytest.approx(inner(x, y, g) * np.sqrt(np.prod(g.scales[:7])), abs=1e-9)


def test_norm_rejects_vertical_leg():
    g = DiagMetric((1.0,) * 8)
    with pytest.raises(InputHasVerticalLeg):
        norm_sq(Form.mono(1, 8), g)


def test_contract_is_dual_to_coframe():
    x = Form.mono(1, 2, 3, coef=2.0)
    assert contract(1, x) == Form.mono(2, 3, coef=2.0)
    assert contract(2, x) == Form.mono(1, 3, coef=-2.0)
    assert contract(5, x).is_zero()


@given(forms(2))
@settings(max_examples=30, deadline=None)
def test_dense_roundtrip(x):
    assert from_dense(to_dense(x), 2).allclose(x, atol=0)
    assert len(to_dense(x)) == len(basis_masks(2))


def test_wedge_matrix_matches_wedge():
    rng = np.random.default_rng(0)
    y = Form.mono(1, 2, 3, 4) + Form.mono(2, 5, 6, 7, coef=-0.5)
    vec = rng.normal(size=len(basis_masks(2)))
    x = from_dense(vec, 2)
    assert np.allclose(wedge_matrix(y, 2) @ vec, to_dense(wedge(x, y)))


def test_bracket_of_parallel_forms_vanishes():
    a = So3Form.along(Form.mono(1), (1, 0, 0))
    assert all(f.is_zero() for f in bracket_wedge(a, a).components)


def test_bracket_uses_structure_2_epsilon():
    a = So3Form.along(Form.mono(1), (1, 0, 0))
    b = So3Form.along(Form.mono(2), (0, 1, 0))
    out = bracket_wedge(a, b)
    # [T1, T2] = 2 T3
    assert out.f3 == Form.mono(1, 2, coef=2.0)


def test_curvature_of_flat_abelian_connection():
    sc = structure_constants(1, 2)
    conn = So3Form.zero(1)
    F = so3_curvature(conn, sc)
    assert F.max_abs() == 0.0


def test_form_degree_mismatch():
    with pytest.raises(ValueError):
        Form.mono(1) + Form.mono(1, 2)
