from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

import pytest

from flfusion.charring import GradedCharacter, affine_demazure_character, weyl_character
from flfusion.currentmod import KINDS, TensorModule, evaluation_shift, irreducible_evaluation_module
from flfusion.errors import DomainError
from flfusion.fusion import (chain_character, check_associativity, check_parameter_independence,
                             demazure_module_explicit, fusion_module, fusion_product,
                             generalized_demazure_oracle)
from flfusion.linalg import Echelon
from flfusion.rootdata import build_root_system

A1 = build_root_system("A1")
A2 = build_root_system("A2")


def brute_force_filtration(Ms, points) -> GradedCharacter:
    """F_n = F_{n-1} + sum_{s=1..n} x t^s F_{n-s}, closed under g, from plain t-powers.

    Works on the whole twisted tensor product with no weight or cone shortcuts.
    """
    T = TensorModule([evaluation_shift(M, c) for M, c in zip(Ms, points)])
    rs = T.rs
    spaces: dict = defaultdict(Echelon)
    added: list[list] = []
    total = 0
    n = 0
    while total < T.dimension:
        new = []

        def push(vec):
            for wt, part in T.weight_components(vec).items():
                row = spaces[wt].add(part, tag=n)
                if row is not None:
                    new.append((wt, row))

        if n == 0:
            push(T.cyclic())
        else:
            for s in range(1, n + 1):
                for _, row in added[n - s]:
                    for kind in KINDS:
                        for i in rs.nodes:
                            img = T.act((kind, i, s), row)
                            if img:
                                push(img)
        k = 0
        while k < len(new):
            _, row = new[k]
            for kind in KINDS:
                for i in rs.nodes:
                    img = T.act((kind, i, 0), row)
                    if img:
                        push(img)
            k += 1
        added.append(new)
        total += len(new)
        n += 1
        if n > 4 * T.dimension:
            raise AssertionError("brute force did not reach the whole space")
    out: dict = defaultdict(int)
    for q, layer in enumerate(added):
        for wt, _ in layer:
            out[(wt, q)] += 1
    return GradedCharacter(out)


def V(lam, rs):
    return irreducible_evaluation_module(lam, rs)


def test_two_copies_of_the_natural_sl2_module():
    ch, filt = fusion_product([V((1,), A1), V((1,), A1)])
    assert filt.stages == [3, 4]
    assert ch == weyl_character((2,), A1) + weyl_character((0,), A1).shift(1)


@pytest.mark.parametrize("factors, points", [
    ([((1,), "A1")] * 3, (0, 1, 2)),
    ([((2,), "A1"), ((1,), "A1")], (0, Fraction(1, 3))),
    ([((1, 0), "A2"), ((0, 1), "A2")], (0, 1)),
    ([((1, 0), "A2"), ((1, 0), "A2"), ((1, 0), "A2")], (Fraction(-2), 0, 5)),
    ([((1, 1), "A2"), ((1, 0), "A2")], (0, 1)),
])
def test_against_brute_force(factors, points):
    mods = [V(lam, build_root_system(label)) for lam, label in factors]
    want = brute_force_filtration(mods, points)
    for full in (False, True):
        got, _ = fusion_product(mods, points, full=full)
        assert got == want


def test_demazure_factors_against_brute_force():
    mods = [demazure_module_explicit(2, (1,), A1), demazure_module_explicit(1, (2,), A1)]
    want = brute_force_filtration(mods, (0, 1))
    got, _ = fusion_product(mods)
    assert got == want
    assert got.layer_dims() == brute_force_filtration(mods, (3, -1)).layer_dims()


def test_single_factor_passes_through():
    W = V((1, 1), A2)
    ch, filt = fusion_product([W])
    assert ch == W.graded_character()
    assert filt.stages == [8]


def test_demazure_factor_fusion_dimension():
    ch, _ = fusion_product([demazure_module_explicit(2, (1,), A1), V((1,), A1)])
    assert ch.dim == 6


def test_points_must_be_distinct():
    with pytest.raises(DomainError):
        fusion_product([V((1,), A1), V((1,), A1)], (1, 1))
    with pytest.raises(DomainError):
        fusion_product([V((1,), A1)], (0, 1))


@pytest.mark.parametrize("level, coweight, label", [(1, (3,), "A1"), (2, (2,), "A1"),
                                                    (3, (2,), "A1"), (1, (1, 1), "A2"),
                                                    (2, (1, 1), "A2")])
def test_explicit_demazure_matches_operator_engine(level, coweight, label):
    rs = build_root_system(label)
    D = demazure_module_explicit(level, coweight, rs)
    mu = tuple(level * x for x in rs.embed(coweight))
    assert D.graded_character() == affine_demazure_character(level, mu, rs)


def test_parameter_independence_small():
    res = check_parameter_independence([V((1,), A1), V((2,), A1), V((1,), A1)], trials=4, seed=2)
    assert res["singleton"]
    assert len(res["points"]) == 4


def test_associativity_small():
    mods = [V((1,), A1)] * 3
    for grouping in ((0, 2), (1, 3)):
        assert check_associativity(mods, grouping)["equal"]


def test_fusion_module_character():
    F = fusion_module([V((1, 0), A2), V((0, 1), A2)])
    assert F.graded_character() == affine_demazure_character(1, (1, 1), A2)


@pytest.mark.parametrize("levels, coweights, mu", [
    ((2, 1), ((1,),), (1,)), ((2, 1), ((2,),), (0,)), ((3, 2, 1), ((1,), (1,)), (1,)),
    ((1, 0), ((1, 1),), (0, 0)), ((2, 1), ((1, 0),), (1, 0)),
])
def test_chain_character_against_cyclic_oracle(levels, coweights, mu):
    rs = A1 if len(mu) == 1 else A2
    mu_w = tuple(levels[-1] * x for x in rs.embed(mu))
    a = chain_character(levels, coweights, mu_w, rs).normalized()[0]
    b = generalized_demazure_oracle(levels, coweights, mu_w, rs).normalized()[0]
    assert a == b
