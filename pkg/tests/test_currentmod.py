from __future__ import annotations

from fractions import Fraction

import pytest

from flfusion.currentmod import (ExplicitModule, PBWSpan, TensorModule, bracket_audit,
                                 cyclic_closure, evaluation_shift, irreducible_evaluation_module,
                                 natural_module, tensor)
from flfusion.charring import weyl_character
from flfusion.errors import DomainError
from flfusion.fusion import demazure_module_explicit, fusion_module
from flfusion.rootdata import build_root_system

A1 = build_root_system("A1")
A2 = build_root_system("A2")


@pytest.mark.parametrize("label, lam", [("A1", (1,)), ("A1", (4,)), ("A2", (1, 0)),
                                        ("A2", (1, 1)), ("A2", (2, 1)), ("A3", (0, 1, 0))])
def test_irreducible_modules(label, lam):
    rs = build_root_system(label)
    V = irreducible_evaluation_module(lam, rs)
    assert V.graded_character() == weyl_character(lam, rs)
    count, failures = bracket_audit(V, checks=200, seed=1)
    assert count == 200 and failures == []


def test_natural_module_matches_first_fundamental():
    V = natural_module(A2)
    assert V.graded_character() == weyl_character((1, 0), A2)
    assert bracket_audit(V, checks=100)[1] == []


@pytest.mark.parametrize("points", [(0, 1), (Fraction(-1, 2), 3), (2, Fraction(7, 3))])
def test_twisted_tensor_is_a_module(points):
    V = irreducible_evaluation_module((1, 1), A2)
    W = irreducible_evaluation_module((1, 0), A2)
    T = TensorModule([evaluation_shift(V, points[0]), evaluation_shift(W, points[1])])
    assert T.dimension == 24
    assert bracket_audit(T, checks=200, seed=3)[1] == []


def test_cyclic_closure_depends_on_points():
    V = irreducible_evaluation_module((1,), A1)
    same = tensor(V, V)
    sub, is_all = cyclic_closure(same, same.cyclic())
    assert sub.dimension == 3 and not is_all
    apart = tensor(V, evaluation_shift(V, 1))
    sub, is_all = cyclic_closure(apart, apart.cyclic(), degree_schedule=4)
    assert sub.dimension == 4 and is_all


def test_pbw_span_stages_for_two_points():
    V = irreducible_evaluation_module((1,), A1)
    T = TensorModule([V, evaluation_shift(V, 1)])
    for dense in (False, True):
        for cone in (False, True):
            span = PBWSpan(T, T.cyclic(), T.t_bound, target=4, dominant_cone=cone, dense=dense)
            assert span.stage_dimensions() == [3, 4]


@pytest.mark.parametrize("level, coweight", [(1, (2,)), (1, (3,)), (2, (2,)), (3, (1,))])
def test_explicit_demazure_modules_sl2(level, coweight):
    D = demazure_module_explicit(level, coweight, A1)
    assert bracket_audit(D, checks=200, seed=5)[1] == []
    assert D.graded_character().qdegs[0] == 0


@pytest.mark.parametrize("level, coweight", [(1, (1, 1)), (2, (1, 0)), (1, (2, 0))])
def test_explicit_demazure_modules_sl3(level, coweight):
    D = demazure_module_explicit(level, coweight, A2)
    assert bracket_audit(D, checks=200, seed=7)[1] == []


def test_associated_graded_of_three_points_is_a_module():
    V = irreducible_evaluation_module((1,), A1)
    F = fusion_module([V, V, V])
    assert F.dimension == 8
    assert F.graded_character().layer_dims() == [4, 2, 2]
    assert bracket_audit(F, checks=200, seed=11)[1] == []


def test_json_round_trip():
    D = demazure_module_explicit(1, (2,), A1)
    back = ExplicitModule.from_dict(D.to_dict(), A1)
    assert back.graded_character() == D.graded_character()
    assert back.dimension == D.dimension


def test_tensor_rejects_mixed_root_systems():
    with pytest.raises(DomainError):
        tensor(natural_module(A1), natural_module(A2))
