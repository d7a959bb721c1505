from __future__ import annotations

import pytest

from flfusion.charring import affine_demazure_character, weyl_character
from flfusion.currentmod import bracket_audit, is_highest_weight_vector
from flfusion.errors import DomainError
from flfusion.rootdata import build_root_system
from flfusion.wedge import WedgeModule, level_one_demazure_module

A1 = build_root_system("A1")
A2 = build_root_system("A2")


@pytest.mark.parametrize("label, lam", [("A1", (1,)), ("A1", (3,)), ("A1", (5,)), ("A2", (1, 0)),
                                        ("A2", (1, 1)), ("A2", (2, 1)), ("A2", (0, 3)),
                                        ("A3", (1, 0, 1)), ("A3", (0, 2, 0))])
def test_cyclic_submodule_matches_operator_engine(label, lam):
    rs = build_root_system(label)
    M = level_one_demazure_module(lam, rs)
    assert M.graded_character() == affine_demazure_character(1, lam, rs)
    assert bracket_audit(M, checks=200, seed=13)[1] == []


def test_sl2_dimensions_are_powers_of_two():
    # D(1, k w) for sl2 is the k-fold fusion of the natural module
    for k in range(1, 7):
        assert level_one_demazure_module((k,), A1).dimension == 2 ** k


def test_fundamental_weights_give_evaluation_modules():
    for lam in ((1, 0), (0, 1)):
        ch = level_one_demazure_module(lam, A2).graded_character()
        assert ch == weyl_character(lam, A2)


def test_generating_state_is_highest_weight():
    W = WedgeModule(A2)
    v = W.state([0, -2, -3])
    W.base_mode = W.mode(v)
    assert W.weight(v) == (2, 1)
    assert is_highest_weight_vector(W, {v: 1}, 4)
    assert W.act(("f", 1, 0), {v: 1})


def test_states_reached_by_positive_modes_only_raise_the_mode():
    W = WedgeModule(A1)
    v = W.state([0, -3])
    before = W.mode(v)
    for s in range(3):
        img = W.act(("f", 1, s), {v: 1})
        assert all(W.mode(st) == before + s for st in img)


def test_rejects_other_types_and_non_dominant_weights():
    with pytest.raises(DomainError):
        WedgeModule(build_root_system("B2"))
    with pytest.raises(DomainError):
        level_one_demazure_module((-1, 1), A2)
