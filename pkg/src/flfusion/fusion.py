"""Fusion products of graded cyclic g[t]-modules.

The tensor product of the twisted modules M_i(c_i) is filtered by the t-degree
of U(g[t]) applied to the tensor of cyclic vectors; the fusion product is the
associated graded space.  Because the cyclic vectors are highest weight
vectors, U(g[t]) v = U(n^-[t]) v and the filtration is computed from the
lowering generators alone (see ``currentmod.PBWSpan``).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .charring import (GradedCharacter, affine_demazure_character, fusion_chain_factors,
                       generalized_demazure_character)
from .currentmod import (CurrentModule, ExplicitModule, PBWSpan, TensorModule,
                         evaluation_shift, irreducible_evaluation_module,
                         is_highest_weight_vector, trivial_module)
from .errors import CyclicityError, DomainError, InconsistencyError, UnsupportedError
from .rootdata import RootSystem, Weight


@dataclass
class FusionFiltration:
    stages: list[int]
    layer_characters: list[dict]
    top_degree: int
    points: tuple = ()
    span: PBWSpan | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"stages": list(self.stages), "top_degree": self.top_degree,
                "points": [str(c) for c in self.points]}


def _check_inputs(Ms, cs):
    if not Ms:
        raise DomainError("need at least one module")
    rs = Ms[0].rs
    if any(M.rs != rs for M in Ms):
        raise DomainError("modules have different root systems")
    cs = tuple(Fraction(c) for c in (range(len(Ms)) if cs is None else cs))
    if len(cs) != len(Ms):
        raise DomainError("need one evaluation point per module")
    if len(set(cs)) != len(cs):
        raise DomainError(f"evaluation points must be distinct: {[str(c) for c in cs]}")
    for M in Ms:
        if not M.graded or M.cyclic_vector is None:
            raise DomainError(f"{M} is not a graded module with a cyclic vector")
        if not is_highest_weight_vector(M, M.cyclic(), M.t_bound):
            raise DomainError(f"cyclic vector of {M} is not a highest weight vector")
    return rs, cs


def fusion_filtration(Ms, cs=None, full: bool = False) -> FusionFiltration:
    """The filtration of the twisted tensor product by t-degree.

    Unless ``full`` is set only weights above the dominant ones are spanned;
    every stage is a g-module, so its character follows by W-symmetry.
    """
    rs, cs = _check_inputs(Ms, cs)
    T = TensorModule([evaluation_shift(M, c) for M, c in zip(Ms, cs)])
    span = PBWSpan(T, T.cyclic(), T.t_bound, target=T.dimension, dominant_cone=not full,
                   dense=True)
    dims = span.stage_dimensions()
    if dims[-1] != T.dimension:
        raise CyclicityError(dims[-1], T.dimension)
    return FusionFiltration(dims, span.layer_characters(), span.top_degree, cs, span)


def fusion_product(Ms, cs=None, full: bool = False) -> tuple[GradedCharacter, FusionFiltration]:
    """Graded character of M_1 * ... * M_k at the points cs (default 0, 1, 2, ...)."""
    filt = fusion_filtration(Ms, cs, full)
    return filt.span.graded_character(), filt


def fusion_module(Ms, cs=None, name="") -> ExplicitModule:
    """The fusion product as an explicit graded cyclic module."""
    if len(Ms) == 1:
        return Ms[0]
    filt = fusion_filtration(Ms, cs, full=True)
    return filt.span.associated_graded(name=name)


def random_points(k: int, rng: random.Random) -> tuple[Fraction, ...]:
    """k pairwise distinct rationals with small numerators and denominators."""
    out: list[Fraction] = []
    while len(out) < k:
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if c not in out:
            out.append(c)
    return tuple(out)


def check_parameter_independence(Ms, trials: int = 5, seed: int = 0,
                                 deadline: float | None = None) -> dict:
    """Fusion characters at seeded random point tuples; a singleton set is expected.

    ``deadline`` is a ``time.monotonic()`` value; trials not started by then are
    skipped and ``complete`` is False.
    """
    if trials < 2:
        raise DomainError("need at least two trials")
    rng = random.Random(seed)
    seen: list[GradedCharacter] = []
    points = []
    for _ in range(trials):
        if deadline is not None and time.monotonic() > deadline:
            break
        cs = random_points(len(Ms), rng)
        ch, _ = fusion_product(Ms, cs)
        points.append([str(c) for c in cs])
        if ch not in seen:
            seen.append(ch)
    return {"points": points, "characters": seen, "distinct": len(seen),
            "singleton": len(seen) == 1, "complete": len(points) == trials}


def check_associativity(Ms, grouping, cs_outer=None, cs_inner=None) -> dict:
    """Compare (M_a * ... * M_{b-1}) fused with the rest against the flat fusion.

    ``grouping`` = (a, b) selects the bracketed block Ms[a:b].
    """
    a, b = grouping
    if not 0 <= a < b <= len(Ms):
        raise DomainError(f"bad grouping {grouping} for {len(Ms)} modules")
    inner = fusion_module(list(Ms[a:b]), cs_inner)
    outer_list = list(Ms[:a]) + [inner] + list(Ms[b:])
    lhs, _ = fusion_product(outer_list, cs_outer)
    rhs, _ = fusion_product(list(Ms))
    return {"grouping": [a, b], "lhs": lhs, "rhs": rhs, "equal": lhs == rhs}


_DEMAZURE: dict = {}


def demazure_module_explicit(level: int, coweight, rs: RootSystem) -> ExplicitModule:
    """D(l, l*iota(coweight)) in type A as a fusion of the evaluation modules V(l*omega_i)."""
    coweight = tuple(coweight)
    if rs.dynkin_type != "A":
        raise UnsupportedError("explicit Demazure modules are available in type A only")
    if level < 0 or not rs.is_dominant(coweight):
        raise DomainError(f"need level >= 0 and a dominant coweight, got ({level}, {coweight})")
    key = (level, coweight, rs)
    if key in _DEMAZURE:
        return _DEMAZURE[key]
    if level == 0 or not any(coweight):
        mod = trivial_module(rs)
    elif sum(coweight) == 1:
        mod = irreducible_evaluation_module(tuple(level * x for x in coweight), rs)
    else:
        # fuse two halves: two big factors keep the exact arithmetic far cheaper
        # than one evaluation module per fundamental coweight
        units = [i for i, a in enumerate(coweight) for _ in range(a)]
        half = [0] * rs.rank
        for i in units[:len(units) // 2]:
            half[i] += 1
        rest = tuple(a - b for a, b in zip(coweight, half))
        factors = [demazure_module_explicit(level, tuple(half), rs),
                   demazure_module_explicit(level, rest, rs)]
        mod = fusion_module(factors, name=f"D({level},{coweight})")
    expected = affine_demazure_character(level, tuple(level * x for x in rs.embed(coweight)), rs)
    if mod.graded_character() != expected:
        raise InconsistencyError(f"explicit D({level}, {coweight}) disagrees with the Demazure character")
    _DEMAZURE[key] = mod
    return mod


def _split_mu(level: int, mu, rs: RootSystem) -> Weight:
    """nu with mu = level * iota(nu); only this cone is covered explicitly."""
    mu = tuple(mu)
    if level == 0:
        if any(mu):
            raise DomainError("level 0 admits only the zero weight")
        return rs.zero
    if any(x % level for x in mu) or not rs.simply_laced:
        raise UnsupportedError(f"explicit modules need mu in {level}*iota(P^vee+), got {mu}")
    return tuple(x // level for x in mu)


def chain_modules(levels, coweights, mu, rs: RootSystem) -> list[ExplicitModule]:
    """D(l_1, l_1 lam_1), ..., D(l_k, l_k lam_k), D(l, mu) as explicit modules."""
    nu = _split_mu(levels[-1], mu, rs)
    mods = [demazure_module_explicit(l, lam, rs) for l, lam in zip(levels, coweights)]
    mods.append(demazure_module_explicit(levels[-1], nu, rs))
    return mods


def generalized_demazure_oracle(levels, coweights, mu, rs: RootSystem) -> GradedCharacter:
    """Graded character of the cyclic submodule generated by the tensor of cyclic vectors of
    D(l_1-l_2, (l_1-l_2) lam_1) (x) D(l_2-l_3, (l_2-l_3)(lam_1+lam_2)) (x) ... (x) D(l, l sum lam + mu).
    """
    levels = list(levels)
    k = len(coweights)
    if len(levels) != k + 1 or any(x < y for x, y in zip(levels, levels[1:])) or levels[-1] < 0:
        raise DomainError(f"need non-increasing levels l_1 >= ... >= l_k >= l >= 0, got {levels}")
    nu = _split_mu(levels[-1], mu, rs)
    partial = rs.zero
    factors = []
    for j in range(k):
        partial = tuple(x + y for x, y in zip(partial, coweights[j]))
        factors.append(demazure_module_explicit(levels[j] - levels[j + 1], partial, rs))
    last = tuple(x + y for x, y in zip(partial, nu))
    factors.append(demazure_module_explicit(levels[-1], last, rs))
    factors = [f for f in factors if f.dimension > 1]
    if not factors:
        return GradedCharacter({(rs.zero, 0): 1})
    T = TensorModule(factors)
    span = PBWSpan(T, T.cyclic(), T.t_bound, dominant_cone=True, dense=True)
    return span.graded_character()


def chain_character(levels, coweights, mu, rs: RootSystem, D_max=None) -> GradedCharacter:
    """Generalized Demazure character of the chain, via the Demazure operator engine."""
    return generalized_demazure_character(fusion_chain_factors(levels, coweights, mu, rs), rs, D_max)
