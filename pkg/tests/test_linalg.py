from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from flfusion.linalg import DenseSpace, Echelon, exact_matmul, primitive

small_rows = st.lists(st.lists(st.integers(-4, 4), min_size=6, max_size=6), min_size=1, max_size=8)


def _vec(row):
    return {j: v for j, v in enumerate(row) if v}


def test_primitive_scales_to_integers():
    assert primitive({0: Fraction(1, 2), 3: Fraction(-3, 4)}) == {0: 2, 3: -3}
    assert primitive({1: -6, 2: 4}) == {1: 3, 2: -2}
    assert primitive({}) == {}


@settings(max_examples=60, deadline=None)
@given(small_rows)
def test_echelon_rank_matches_sympy(rows):
    e = Echelon()
    for r in rows:
        e.add(_vec(r))
    assert len(e) == sympy.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(small_rows, small_rows)
def test_dense_space_agrees_with_echelon(first, second):
    d = DenseSpace(range(6))
    e = Echelon()
    for batch in (first, second):
        d.add_batch([_vec(r) for r in batch if any(r)], tag=0)
        for r in batch:
            e.add(_vec(r))
    assert len(d) == len(e)
    for r in first + second:
        assert d.contains(_vec(r))


@settings(max_examples=40, deadline=None)
@given(small_rows)
def test_coordinates_reconstruct_vector(rows):
    e = Echelon()
    for r in rows:
        e.add(_vec(r))
    target = _vec([sum(c) for c in zip(*rows)])
    coords = e.coordinates(target)
    back: dict = {}
    for p, c in coords.items():
        for k, v in e.rows[p].items():
            back[k] = back.get(k, 0) + c * v
    assert {k: v for k, v in back.items() if v} == target


def test_exact_matmul_switches_to_python_integers():
    A = np.array([[1 << 40, 1], [3, -(1 << 40)]], dtype=np.int64)
    B = np.array([[1 << 40, 0], [0, 1 << 40]], dtype=np.int64)
    got = exact_matmul(A, B)
    want = [[(1 << 80), 1 << 40], [3 << 40, -(1 << 80)]]
    assert [[int(x) for x in row] for row in got] == want


def test_reduced_rows_and_frame():
    d = DenseSpace(range(3))
    d.add_batch([{0: 1, 1: 1}], tag=0)
    d.add_batch([{1: 1, 2: 1}], tag=1)
    rows = d.reduced_rows(1)
    assert [lead for lead, _, _ in rows] == [1]
    piv, vals, free, F = d.frame()
    assert list(piv) == [0, 1] and list(free) == [2]
    assert F.shape == (2, 1)
