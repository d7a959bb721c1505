from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flfusion.errors import DomainError
from flfusion.rootdata import (AffineWeight, act, affine_length, build_root_system, compose,
                               demazure_params, dominance_leq, element, from_word, identity,
                               inverse, omega_elements, reduced_word, simple_reflection,
                               translation)

@pytest.mark.parametrize("label, n_pos, dim_adj", [("A1", 1, 3), ("A2", 3, 8), ("A3", 6, 15),
                                                   ("B2", 4, 10), ("C3", 9, 21), ("D4", 12, 28),
                                                   ("G2", 6, 14), ("E6", 36, 78)])
def test_positive_roots_and_adjoint(label, n_pos, dim_adj):
    rs = build_root_system(label)
    assert len(rs.positive_roots) == n_pos
    assert rs.weyl_dimension(rs.theta) == dim_adj


def test_cartan_convention():
    # entry (i, j) pairs the coroot of i with the root j; Bourbaki labels (B2: node 1 long)
    assert build_root_system("B2").cartan_matrix == ((2, -1), (-2, 2))
    assert build_root_system("G2").cartan_matrix == ((2, -3), (-1, 2))
    assert build_root_system("A2").cartan_matrix == ((2, -1), (-1, 2))


def test_dominance():
    rs = build_root_system("A2")
    assert dominance_leq((0, 0), (1, 1), rs)
    assert dominance_leq((1, 1), (3, 0), rs)
    assert not dominance_leq((0, 3), (3, 0), rs)
    assert not dominance_leq((3, 0), (0, 3), rs)
    assert rs.dominance_leq((0, 0), (3, 0))


def test_weyl_dimension_values():
    rs = build_root_system("A2")
    assert rs.weyl_dimension((2, 0)) == 6
    assert rs.weyl_dimension((1, 1)) == 8
    assert build_root_system("G2").weyl_dimension((1, 0)) == 7


def _words(rank):
    return st.lists(st.integers(0, rank), max_size=8)


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2"])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_inverse_and_length(label, data):
    rs = build_root_system(label)
    w = from_word(data.draw(_words(rs.rank)), rs)
    assert compose(w, inverse(w, rs), rs) == identity(rs)
    assert affine_length(w, rs) == affine_length(inverse(w, rs), rs)
    i = data.draw(st.integers(0, rs.rank))
    assert abs(affine_length(compose(w, simple_reflection(i, rs), rs), rs) - affine_length(w, rs)) == 1


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "C2"])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_reduced_word_round_trip(label, data):
    rs = build_root_system(label)
    mu = tuple(data.draw(st.lists(st.integers(-2, 2), min_size=rs.rank, max_size=rs.rank)))
    w = compose(translation(mu, rs), from_word(data.draw(_words(rs.rank)), rs), rs)
    word, pi = reduced_word(w, rs)
    assert len(word) == affine_length(w, rs)
    assert affine_length(pi, rs) == 0
    assert from_word(word, rs, pi) == w


def test_simple_reflections_are_involutions():
    rs = build_root_system("A2")
    for i in range(3):
        s = simple_reflection(i, rs)
        assert compose(s, s, rs) == identity(rs)
        assert affine_length(s, rs) == 1


def test_translation_lengths():
    rs = build_root_system("A1")
    # l(t_mu) = sum over positive roots of |<mu, alpha>|
    assert affine_length(translation((2,), rs), rs) == 2
    assert affine_length(translation((1,), rs), rs) == 1
    rs2 = build_root_system("A2")
    assert affine_length(translation((1, 1), rs2), rs2) == 4


def test_length_zero_elements():
    assert len(omega_elements(build_root_system("A2"))) == 3
    assert len(omega_elements(build_root_system("D4"))) == 4
    assert len(omega_elements(build_root_system("E8"))) == 1


@pytest.mark.parametrize("label", ["A1", "A2", "C2"])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_action_is_a_group_action(label, data):
    rs = build_root_system(label)
    u = from_word(data.draw(_words(rs.rank)), rs)
    v = from_word(data.draw(_words(rs.rank)), rs)
    lam = AffineWeight(2, tuple(data.draw(st.lists(st.integers(-3, 3), min_size=rs.rank,
                                                   max_size=rs.rank))), Fraction(0))
    assert act(compose(u, v, rs), lam, rs) == act(u, act(v, lam, rs), rs)


@pytest.mark.parametrize("level, mu", [(1, (2,)), (2, (2,)), (3, (6,)), (1, (0,)), (2, (5,))])
def test_demazure_params_sl2(level, mu):
    rs = build_root_system("A1")
    w, lam = demazure_params(level, mu, rs)
    assert lam.level == level
    assert rs.affine_dominant(lam)
    img = act(w, lam, rs)
    assert img.finite == rs.w0(mu)


def test_demazure_params_rejects_bad_input():
    rs = build_root_system("A2")
    with pytest.raises(DomainError):
        demazure_params(1, (-1, 0), rs)
    with pytest.raises(DomainError):
        demazure_params(0, (1, 0), rs)


def test_element_canonicalizes_words():
    rs = build_root_system("A2")
    assert element(rs, word=(1, 2, 1)) == element(rs, word=(2, 1, 2))
