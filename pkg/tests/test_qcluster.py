from __future__ import annotations

import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from flfusion.charring import specialize_q
from flfusion.errors import DomainError
from flfusion.qcluster import (ClusterSeed, kclass, mutate, neighbor_support_identity,
                               qsystem_check, qsystem_exchange_match, qsystem_seed)
from flfusion.rootdata import build_root_system

A1 = build_root_system("A1")
A2 = build_root_system("A2")


def random_seed(rng: random.Random, n: int) -> ClusterSeed:
    B = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            x = rng.randint(-2, 2)
            B[a][b], B[b][a] = x, -x
    xs = tuple(sympy.Symbol(f"x{j}") for j in range(n))
    return ClusterSeed(tuple(range(n)), tuple(map(tuple, B)), xs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.data())
def test_mutation_is_involutive(seed, n, data):
    s = random_seed(random.Random(seed), n)
    k = data.draw(st.integers(0, n - 1))
    once = mutate(s, k)
    assert all(once.B[a][b] == -once.B[b][a] for a in range(n) for b in range(n))
    assert mutate(once, k).equivalent(s)


def test_seed_rejects_non_skew_matrix():
    x = sympy.Symbol("x")
    with pytest.raises(DomainError):
        ClusterSeed((0, 1), ((0, 1), (1, 0)), (x, x))


def test_seed_json_shape():
    data = qsystem_seed(A2).to_dict()
    assert set(data) == {"nodes", "B", "vars"}
    assert len(data["B"]) == 4


@pytest.mark.parametrize("label, dims", [("A1", (3, 4, 1)), ("A2", (6, 9, 3))])
def test_level_one_dimension_identities(label, dims):
    # B = A + q^s C at q = 1: 4 = 3 + 1 for sl2 and 9 = 6 + 3 for sl3
    res = qsystem_check(build_root_system(label), 1, 1)
    assert res["pass"]
    assert res["shift"] is not None
    assert (res["dims"]["A"], res["dims"]["B"], res["dims"]["C"]) == dims


def test_classical_dimension_identity_sl2():
    # dim Q_l^2 = dim Q_{l+1} dim Q_{l-1} + 1 with dim Q_l = l + 1
    for level in (1, 2, 3):
        res = qsystem_check(A1, 1, level, engine="character")
        assert res["pass"]
        assert res["dims"]["B"] == (level + 1) ** 2
        assert res["dims"]["A"] == (level + 2) * level


def test_kclass_negative_level_is_formal():
    cls = kclass(A1, 1, -1)
    assert cls.formal
    with pytest.raises(DomainError):
        cls.require_character()
    assert specialize_q(kclass(A1, 1, 2).require_character()).dim == 3


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "D4"])
def test_neighbor_support(label):
    rs = build_root_system(label)
    assert all(neighbor_support_identity(rs, i) for i in rs.nodes)


def test_exchange_match_and_negative_control():
    assert qsystem_exchange_match(A2, 1, 1)
    assert qsystem_exchange_match(A1, 1, 2)
    assert not qsystem_exchange_match(A2, 1, 1, twist=False)


def test_non_simply_laced_rejected():
    with pytest.raises(DomainError):
        qsystem_check(build_root_system("B2"), 1, 1)
