"""Graded characters and the Demazure operator engine."""

from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, InconsistencyError, TruncationError
from .rootdata import (AffineWeight, ExtAffineWeylElement, RootSystem, Weight, act,
                       affine_length, compose, demazure_params, from_word, identity,
                       inverse, reduced_word, simple_reflection, translation)


class GradedCharacter:
    """Finite map (weight, qdeg) -> nonzero integer multiplicity.

    Equality compares terms only; ``level`` is carried for serialization.
    """

    __slots__ = ("terms", "level")

    def __init__(self, terms=None, level: int = 0):
        self.terms: dict[tuple[Weight, int], int] = {}
        for (wt, q), m in (terms or {}).items():
            if m:
                key = (tuple(wt), int(q))
                self.terms[key] = self.terms.get(key, 0) + m
                if self.terms[key] == 0:
                    del self.terms[key]
        self.level = level

    @classmethod
    def from_weights(cls, weights: dict, q: int = 0, level: int = 0) -> "GradedCharacter":
        return cls({(wt, q): m for wt, m in weights.items()}, level)

    def __eq__(self, other):
        if not isinstance(other, GradedCharacter):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"GradedCharacter(dim={self.dim}, qdegs={self.qdegs})"

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, m in other.terms.items():
            out[k] = out.get(k, 0) + m
        return GradedCharacter(out, self.level)

    def __neg__(self):
        return GradedCharacter({k: -m for k, m in self.terms.items()}, self.level)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GradedCharacter({k: m * other for k, m in self.terms.items()}, self.level)
        out: dict = defaultdict(int)
        for (w1, q1), m1 in self.terms.items():
            for (w2, q2), m2 in other.terms.items():
                out[(tuple(a + b for a, b in zip(w1, w2)), q1 + q2)] += m1 * m2
        return GradedCharacter(out, self.level + other.level)

    __rmul__ = __mul__

    @property
    def dim(self) -> int:
        return sum(self.terms.values())

    @property
    def qdegs(self) -> list[int]:
        return sorted({q for _, q in self.terms})

    def layer(self, q: int) -> dict[Weight, int]:
        return {wt: m for (wt, d), m in self.terms.items() if d == q}

    def layer_dims(self) -> list[int]:
        if not self.terms:
            return []
        top = max(self.qdegs)
        return [sum(self.layer(q).values()) for q in range(min(self.qdegs), top + 1)]

    def shift(self, s: int) -> "GradedCharacter":
        return GradedCharacter({(wt, q + s): m for (wt, q), m in self.terms.items()}, self.level)

    def normalized(self) -> tuple["GradedCharacter", int]:
        """Shift so the lowest qdeg is 0; returns (character, applied shift)."""
        if not self.terms:
            return self, 0
        low = min(q for _, q in self.terms)
        return self.shift(-low), -low

    def is_w_symmetric(self, rs: RootSystem) -> bool:
        for (wt, q), m in self.terms.items():
            for i in rs.nodes:
                if self.terms.get((rs.reflect(wt, i), q), 0) != m:
                    return False
        return True

    def is_nonnegative(self) -> bool:
        return all(m > 0 for m in self.terms.values())

    def to_dict(self) -> dict:
        items = sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        return {"level": self.level,
                "terms": [{"wt": list(wt), "q": q, "mult": m} for (wt, q), m in items]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "GradedCharacter":
        return cls({(tuple(t["wt"]), t["q"]): t["mult"] for t in data["terms"]}, data.get("level", 0))

    @classmethod
    def from_json(cls, text: str) -> "GradedCharacter":
        return cls.from_dict(json.loads(text))


def specialize_q(c: GradedCharacter, at: int = 1) -> GradedCharacter:
    """Set q = at; the result sits in qdeg 0."""
    out: dict = defaultdict(int)
    for (wt, q), m in c.terms.items():
        out[(wt, 0)] += m * at ** q
    return GradedCharacter(out, c.level)


class AffineCharPoly:
    """Finite map (finite weight, coefficient of -delta) -> integer at a fixed level."""

    __slots__ = ("terms", "level")

    def __init__(self, terms=None, level: int = 0):
        self.terms: dict[tuple[Weight, Fraction], int] = {k: v for k, v in (terms or {}).items() if v}
        self.level = level

    @classmethod
    def monomial(cls, big: AffineWeight) -> "AffineCharPoly":
        return cls({(tuple(big.finite), Fraction(big.delta)): 1}, big.level)

    def __eq__(self, other):
        return isinstance(other, AffineCharPoly) and self.level == other.level and self.terms == other.terms

    def __repr__(self):
        return f"AffineCharPoly(level={self.level}, terms={len(self.terms)})"

    def times_monomial(self, big: AffineWeight) -> "AffineCharPoly":
        lam, d = tuple(big.finite), Fraction(big.delta)
        return AffineCharPoly({(tuple(a + b for a, b in zip(wt, lam)), dd + d): m
                               for (wt, dd), m in self.terms.items()}, self.level + big.level)

    def transform(self, w: ExtAffineWeylElement, rs: RootSystem) -> "AffineCharPoly":
        out: dict = defaultdict(int)
        for (wt, d), m in self.terms.items():
            img = act(w, AffineWeight(self.level, wt, d), rs)
            out[(img.finite, img.delta)] += m
        return AffineCharPoly(out, self.level)


# Weyl characters


def _dominant_weights_below(lam: Weight, rs: RootSystem) -> list[Weight]:
    roots = [rs.root_to_weight(b) for b in rs.positive_roots]
    seen = {tuple(lam)}
    stack = [tuple(lam)]
    while stack:
        x = stack.pop()
        for a in roots:
            y = tuple(p - q for p, q in zip(x, a))
            if rs.is_dominant(y) and y not in seen:
                seen.add(y)
                stack.append(y)
    return sorted(seen, key=lambda w: (-rs.height(w), w))


@lru_cache(maxsize=None)
def dominant_multiplicities(lam: Weight, rs: RootSystem) -> dict[Weight, int]:
    """Freudenthal recursion for the dominant weight multiplicities of V(lam)."""
    lam = tuple(lam)
    doms = _dominant_weights_below(lam, rs)
    domset = set(doms)
    roots = [rs.root_to_weight(b) for b in rs.positive_roots]
    lr = tuple(a + 1 for a in lam)
    top = rs.weight_form(lr, lr)
    mult = {lam: 1}
    for mu in doms[1:]:
        acc = Fraction(0)
        for a in roots:
            k = 1
            while True:
                nu = tuple(x + k * y for x, y in zip(mu, a))
                dn = rs.dominant_conjugate(nu)[0]
                if dn not in domset:
                    break
                acc += mult[dn] * rs.weight_form(nu, a)
                k += 1
        mr = tuple(a + 1 for a in mu)
        val = 2 * acc / (top - rs.weight_form(mr, mr))
        if val.denominator != 1:
            raise InconsistencyError(f"non-integral multiplicity {val} at {mu} in V({lam})")
        if val:
            mult[mu] = int(val)
    return mult


@lru_cache(maxsize=None)
def _weyl_weights(lam: Weight, rs: RootSystem) -> tuple[tuple[Weight, int], ...]:
    out = []
    for mu, m in dominant_multiplicities(lam, rs).items():
        for nu in rs.orbit(mu):
            out.append((nu, m))
    return tuple(sorted(out))


def weyl_character(lam: Weight, rs: RootSystem) -> GradedCharacter:
    """Character of the irreducible module V(lam), placed in qdeg 0."""
    lam = tuple(lam)
    if len(lam) != rs.rank or not rs.is_dominant(lam):
        raise DomainError(f"{lam} is not a dominant weight of {rs.label}")
    return GradedCharacter({(nu, 0): m for nu, m in _weyl_weights(lam, rs)})


# decompositions into irreducibles: {(dominant weight, qdeg): multiplicity}


def expand(decomposition: dict, rs: RootSystem, level: int = 0) -> GradedCharacter:
    out: dict = defaultdict(int)
    for (lam, q), c in decomposition.items():
        for nu, m in _weyl_weights(tuple(lam), rs):
            out[(nu, q)] += c * m
    return GradedCharacter(out, level)


def decompose(c: GradedCharacter, rs: RootSystem) -> dict[tuple[Weight, int], int]:
    """Irreducible multiplicities per qdeg of a W-symmetric character."""
    out: dict = {}
    for q in c.qdegs:
        rest = dict(c.layer(q))
        while rest:
            doms = [w for w in rest if rs.is_dominant(w)]
            if not doms:
                raise DomainError("character is not W-symmetric")
            top = max(doms, key=lambda w: (rs.height(w), w))
            m = rest[top]
            out[(top, q)] = m
            for nu, k in _weyl_weights(top, rs):
                v = rest.get(nu, 0) - m * k
                if v:
                    rest[nu] = v
                else:
                    rest.pop(nu, None)
    return out


def _rho_shift_straighten(lam: Weight, rs: RootSystem):
    """(sign, dominant weight) with D_{w0}(e^lam) = sign * ch V(weight), or None."""
    x = tuple(a + 1 for a in lam)
    sign = 1
    while True:
        if any(a == 0 for a in x):
            return None
        i = next((k + 1 for k, a in enumerate(x) if a < 0), None)
        if i is None:
            return sign, tuple(a - 1 for a in x)
        x = rs.reflect(x, i)
        sign = -sign


def symmetrize(poly: AffineCharPoly, rs: RootSystem) -> dict[tuple[Weight, Fraction], int]:
    """Apply the longest-element Demazure operator, returning irreducible multiplicities."""
    out: dict = defaultdict(int)
    for (wt, d), m in poly.terms.items():
        r = _rho_shift_straighten(wt, rs)
        if r is not None:
            out[(r[1], d)] += r[0] * m
    return {k: v for k, v in out.items() if v}


# Demazure operators


def demazure_operator(f, i: int, rs: RootSystem, D_max=None, base=None):
    """D_i f = (f - e^{-alpha_i} s_i f) / (1 - e^{-alpha_i}), term by term.

    ``f`` is an AffineCharPoly or, for finite nodes, a GradedCharacter.  With
    ``D_max`` set, any produced term deeper than ``base + D_max`` raises
    TruncationError; ``base`` defaults to the shallowest delta-degree of ``f``.
    """
    if isinstance(f, GradedCharacter):
        if i == 0:
            raise DomainError("the affine node needs an AffineCharPoly")
        out: dict = defaultdict(int)
        for (wt, q), m in f.terms.items():
            for nu, sign in _string(wt, i, rs):
                out[(nu, q)] += sign * m
        return GradedCharacter(out, f.level)
    if i == 0 and D_max is None:
        raise DomainError("the affine Demazure operator needs a truncation bound")
    if base is None and f.terms:
        base = min(d for _, d in f.terms)
    level = f.level
    out = defaultdict(int)
    theta = rs.theta
    for (wt, d), m in f.terms.items():
        if i == 0:
            n = level - rs.pair_theta_vee(wt)
            if n >= 0:
                for k in range(n + 1):
                    out[(tuple(a + k * t for a, t in zip(wt, theta)), d + k)] += m
            elif n <= -2:
                for k in range(1, -n):
                    out[(tuple(a - k * t for a, t in zip(wt, theta)), d - k)] -= m
        else:
            for nu, sign in _string(wt, i, rs):
                out[(nu, d)] += sign * m
    res = AffineCharPoly(out, level)
    if D_max is not None:
        for _, d in res.terms:
            if d - base > D_max:
                raise TruncationError(d - base, D_max)
    return res


def _string(wt: Weight, i: int, rs: RootSystem):
    n = wt[i - 1]
    a = rs.simple_root(i)
    if n >= 0:
        for k in range(n + 1):
            yield tuple(x - k * y for x, y in zip(wt, a)), 1
    elif n <= -2:
        for k in range(1, -n):
            yield tuple(x + k * y for x, y in zip(wt, a)), -1


def apply_word(f: AffineCharPoly, word, rs: RootSystem, D_max, base) -> AffineCharPoly:
    """D_{i_1} ... D_{i_p} f for word (i_1, ..., i_p)."""
    for i in reversed(word):
        f = demazure_operator(f, i, rs, D_max, base)
    return f


def _strip_left_finite(x: ExtAffineWeylElement, rs: RootSystem) -> ExtAffineWeylElement:
    """Remove left finite descents greedily; D_{w0} absorbs them."""
    n = affine_length(x, rs)
    while True:
        for i in rs.nodes:
            y = compose(simple_reflection(i, rs), x, rs)
            m = affine_length(y, rs)
            if m < n:
                x, n = y, m
                break
        else:
            return x


def default_dmax(lengths, levels) -> int:
    total = sum(lengths)
    return max(2 * total, max(list(levels) + [1]) * total * total)


def _apply_element(f: AffineCharPoly, x: ExtAffineWeylElement, rs, D_max, base, symmetric=False):
    """D_x f for x = (word) * pi, optionally finished by the longest finite operator."""
    if symmetric:
        x = _strip_left_finite(x, rs)
    word, pi = reduced_word(x, rs)
    f = f.transform(pi, rs)
    if base is None and f.terms:
        base = min(d for _, d in f.terms)
    return apply_word(f, word, rs, D_max, base)


def _graded_from_symmetric(sym: dict, level: int) -> tuple[dict, Fraction]:
    if not sym:
        return {}, Fraction(0)
    d_ext = max(d for _, d in sym)
    out = {}
    for (lam, d), m in sym.items():
        q = d_ext - d
        if q.denominator != 1:
            raise InconsistencyError(f"non-integral qdeg {q}")
        out[(lam, int(q))] = m
    return out, d_ext


def affine_demazure_decomposition(level: int, mu: Weight, rs: RootSystem, D_max=None) -> dict:
    """Irreducible g-multiplicities per qdeg of D(level, mu)."""
    w, lam = demazure_params(level, tuple(mu), rs)
    if D_max is None:
        D_max = default_dmax([affine_length(w, rs)], [level])
    f = _apply_element(AffineCharPoly.monomial(lam), w, rs, D_max, None, symmetric=True)
    sym = symmetrize(f, rs)
    out, _ = _graded_from_symmetric(sym, level)
    if any(m < 0 for m in out.values()):
        raise InconsistencyError(f"negative multiplicity in D({level}, {mu})")
    if ((rs.dominant_conjugate(rs.w0(tuple(mu)))[0], 0) not in out):
        raise InconsistencyError(f"extremal weight missing from qdeg 0 of D({level}, {mu})")
    return out


def affine_demazure_character(level: int, mu: Weight, rs: RootSystem, D_max=None) -> GradedCharacter:
    """Graded character of D(level, mu), lowest qdeg 0."""
    return expand(affine_demazure_decomposition(level, mu, rs, D_max), rs, level)


def _increments(factors, rs):
    """x_1 = w_1, x_j = w_{j-1}^{-1} w_j, with length additivity enforced."""
    incs = []
    prev = identity(rs)
    prev_len = 0
    for j, (w, _) in enumerate(factors):
        x = compose(inverse(prev, rs), w, rs)
        lw, lx = affine_length(w, rs), affine_length(x, rs)
        if lw != prev_len + lx:
            raise DomainError(f"length additivity fails between factors {j} and {j + 1}: "
                              f"l({w}) = {lw} != {prev_len} + {lx}")
        incs.append(x)
        prev, prev_len = w, lw
    return incs


def _is_current_stable(factors, rs) -> bool:
    return all(rs.is_dominant(tuple(-a for a in act(w, lam, rs).finite)) for w, lam in factors)


def generalized_demazure_poly(factors, rs: RootSystem, D_max=None, symmetric=None):
    """Nested D_{x_1}(e^{L_1} D_{x_2}(e^{L_2} ... D_{x_k}(e^{L_k}))).

    Returns an AffineCharPoly, or irreducible multiplicities when the outer
    operator is replaced by the longest finite one (``symmetric``).
    """
    factors = [(w, lam) for w, lam in factors]
    if not factors:
        raise DomainError("need at least one factor")
    incs = _increments(factors, rs)
    if D_max is None:
        D_max = default_dmax([affine_length(w, rs) for w, _ in factors],
                             [sum(l.level for _, l in factors)])
    if symmetric is None:
        symmetric = _is_current_stable(factors, rs)
    f = AffineCharPoly({(rs.zero, Fraction(0)): 1}, 0)
    base = sum((Fraction(lam.delta) for _, lam in factors), Fraction(0))
    for j in range(len(factors) - 1, -1, -1):
        f = f.times_monomial(factors[j][1])
        f = _apply_element(f, incs[j], rs, D_max, base, symmetric=(symmetric and j == 0))
    if symmetric:
        return symmetrize(f, rs)
    return f


def generalized_demazure_decomposition(factors, rs: RootSystem, D_max=None) -> dict:
    if not _is_current_stable(factors, rs):
        raise DomainError("extremal weights are not antidominant; the module is not g-stable")
    sym = generalized_demazure_poly(factors, rs, D_max, symmetric=True)
    out, _ = _graded_from_symmetric(sym, sum(l.level for _, l in factors))
    if any(m < 0 for m in out.values()):
        raise InconsistencyError("negative multiplicity in a generalized Demazure character")
    return out


def generalized_demazure_character(factors, rs: RootSystem, D_max=None) -> GradedCharacter:
    """Normalized graded character of the generalized Demazure module of the factors."""
    level = sum(l.level for _, l in factors)
    if _is_current_stable(factors, rs):
        return expand(generalized_demazure_decomposition(factors, rs, D_max), rs, level)
    f = generalized_demazure_poly(factors, rs, D_max, symmetric=False)
    if not f.terms:
        return GradedCharacter({}, level)
    d_ext = max(d for _, d in f.terms)
    out = {}
    for (wt, d), m in f.terms.items():
        q = d_ext - d
        if q.denominator != 1:
            raise InconsistencyError(f"non-integral qdeg {q}")
        out[(wt, int(q))] = m
    return GradedCharacter(out, level)


def fusion_chain_factors(levels, coweights, mu: Weight, rs: RootSystem):
    """Factors whose generalized Demazure module matches the chain fusion.

    ``levels`` = (l_1, ..., l_k, l) non-increasing, ``coweights`` = (lam_1, ..., lam_k)
    dominant, ``mu`` dominant of level l.  Factor j is
    (tau(w0(lam_1 + ... + lam_j)), (l_j - l_{j+1}) Lambda_0) and the last factor is
    (tau(w0 sum lam) w, Lambda) where (w, Lambda) parametrizes D(l, mu).
    """
    levels = list(levels)
    k = len(coweights)
    if len(levels) != k + 1:
        raise DomainError("need one more level than coweights")
    if any(a < b for a, b in zip(levels, levels[1:])) or levels[-1] < 0:
        raise DomainError(f"levels must be non-increasing and nonnegative: {levels}")
    for lam in coweights:
        if not rs.is_dominant(lam):
            raise DomainError(f"coweight {lam} is not dominant")
    factors = []
    partial = rs.zero
    for j in range(k):
        partial = tuple(a + b for a, b in zip(partial, coweights[j]))
        t = translation(rs.w0_coweight(partial), rs)
        factors.append((t, AffineWeight(levels[j] - levels[j + 1], rs.zero)))
    w, lam = demazure_params(levels[-1], tuple(mu), rs)
    last = compose(translation(rs.w0_coweight(partial), rs), w, rs)
    factors.append((last, lam))
    return factors
