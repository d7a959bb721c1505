"""Explicit finite-dimensional g[t]-modules over the rationals.

A generator is a triple ``(kind, node, s)`` standing for ``x_node (x) t^s`` with
``kind`` one of ``"e"``, ``"f"``, ``"h"``.  Vectors are sparse dicts from basis
labels to Fractions.  Explicit modules use integer labels, tensor products use
tuples of factor labels.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import defaultdict
from fractions import Fraction
from math import comb, lcm

import numpy as np

from .charring import GradedCharacter, weyl_character
from .errors import DomainError, InconsistencyError, NonClosureError, UnsupportedError
from .linalg import DenseSpace, Echelon, exact_matmul, exact_sub, int_matrix, primitive
from .rootdata import RootSystem, Weight

KINDS = ("e", "f", "h")


def _num(v):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


def add_into(acc: dict, vec: dict, scale=1):
    for k, v in vec.items():
        x = acc.get(k, 0) + scale * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def generator_weight(gen, rs: RootSystem) -> Weight:
    kind, node, _ = gen
    if kind == "h":
        return rs.zero
    a = rs.simple_root(node)
    return a if kind == "e" else tuple(-x for x in a)


class CurrentModule:
    """Common interface; see ExplicitModule and TensorModule."""

    rs: RootSystem

    @property
    def graded(self) -> bool:
        raise NotImplementedError

    def act(self, gen, vec: dict) -> dict:
        raise NotImplementedError

    def basis(self) -> list:
        raise NotImplementedError

    def weight(self, label) -> Weight:
        raise NotImplementedError

    def qdeg(self, label):
        raise NotImplementedError

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    def vector_weight(self, vec: dict) -> Weight:
        weights = {self.weight(k) for k in vec}
        if len(weights) != 1:
            raise DomainError("vector is not a weight vector")
        return weights.pop()

    def weight_multiplicities(self) -> dict:
        out: dict = defaultdict(int)
        for k in self.basis():
            out[self.weight(k)] += 1
        return dict(out)

    def weight_components(self, vec: dict) -> dict:
        out: dict = defaultdict(dict)
        for k, v in vec.items():
            out[self.weight(k)][k] = v
        return dict(out)


class ExplicitModule(CurrentModule):
    """Module with stored action matrices for x (x) t^k, k < t_bound.

    ``complete`` means the stored actions are all there is (x (x) t^k = 0 for
    k >= t_bound on the untwisted module).  ``shift`` is the evaluation twist
    x t^s -> x (t + shift)^s.
    """

    def __init__(self, rs, weights, qdegs, actions, t_bound, cyclic_vector=None,
                 shift=Fraction(0), complete=True, name=""):
        self.rs = rs
        self.weights = [tuple(w) for w in weights]
        self.qdegs = None if qdegs is None else [int(q) for q in qdegs]
        self.actions = actions  # (kind, node, k) -> list of columns [(row, Fraction), ...]
        self.t_bound = t_bound
        self.cyclic_vector = cyclic_vector
        self.shift = Fraction(shift)
        self.complete = complete
        self.name = name
        self._cache: dict = {}

    def __repr__(self):
        return f"ExplicitModule({self.name or self.rs.label}, dim={self.dimension})"

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def graded(self) -> bool:
        return self.qdegs is not None and self.shift == 0

    @property
    def nfactors(self) -> int:
        return 1

    def basis(self):
        return list(range(self.dimension))

    def weight(self, label):
        return self.weights[label]

    def qdeg(self, label):
        return self.qdegs[label] if self.graded else None

    def cyclic(self) -> dict | None:
        if self.cyclic_vector is None:
            return None
        return {self.cyclic_vector: Fraction(1)}

    def _base_column(self, kind, node, k, j):
        if k >= self.t_bound:
            if self.complete:
                return ()
            raise DomainError(f"action of degree {k} not stored (t_bound {self.t_bound})")
        mat = self.actions.get((kind, node, k))
        return mat[j] if mat is not None else ()

    def image(self, gen, j) -> dict:
        """Image of basis vector j under the twisted generator."""
        key = (gen, j)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        kind, node, s = gen
        out: dict = {}
        c = self.shift
        if c == 0:
            for r, v in self._base_column(kind, node, s, j):
                out[r] = out.get(r, 0) + v
        else:
            top = s if not self.complete else min(s, self.t_bound - 1)
            for k in range(top + 1):
                coeff = comb(s, k) * c ** (s - k)
                for r, v in self._base_column(kind, node, k, j):
                    out[r] = out.get(r, 0) + coeff * v
        out = {r: _num(v) for r, v in out.items() if v}
        self._cache[key] = out
        return out

    def scaled_image(self, gen, j, scale) -> dict:
        key = (gen, j, scale)
        hit = self._cache.get(key)
        if hit is None:
            hit = {r: int(v * scale) for r, v in self.image(gen, j).items()}
            self._cache[key] = hit
        return hit

    def denominator(self, gen) -> int:
        key = ("den", gen)
        hit = self._cache.get(key)
        if hit is None:
            hit = 1
            for j in range(self.dimension):
                for v in self.image(gen, j).values():
                    if isinstance(v, Fraction):
                        hit = lcm(hit, v.denominator)
            self._cache[key] = hit
        return hit

    def act(self, gen, vec):
        out: dict = {}
        for j, v in vec.items():
            add_into(out, self.image(gen, j), v)
        return out

    def poly_image(self, kind, node, coeffs, j) -> dict:
        """Image of basis vector j under x (x) P(t) on the untwisted module,
        where coeffs[k] is the coefficient of t^k in P."""
        key = ("poly", kind, node, coeffs, j)
        hit = self._cache.get(key)
        if hit is None:
            out: dict = {}
            for k, a in enumerate(coeffs):
                if a:
                    for r, v in self._base_column(kind, node, k, j):
                        out[r] = out.get(r, 0) + a * v
            hit = self._cache[key] = {r: _num(v) for r, v in out.items() if v}
        return hit

    def matrix(self, gen) -> list[dict]:
        return [self.image(gen, j) for j in range(self.dimension)]

    def graded_character(self) -> GradedCharacter:
        if not self.graded:
            raise DomainError("ungraded module; use the fusion filtration for a grading")
        out: dict = defaultdict(int)
        for w, q in zip(self.weights, self.qdegs):
            out[(w, q)] += 1
        return GradedCharacter(out)

    def to_dict(self, max_s=None) -> dict:
        top = self.t_bound if max_s is None else max_s
        acts = []
        for s in range(top):
            for kind in KINDS:
                for node in self.rs.nodes:
                    entries = []
                    for j in range(self.dimension):
                        for r, v in sorted(self.image((kind, node, s), j).items()):
                            entries.append([r, j, str(v)])
                    if entries:
                        acts.append({"gen": kind, "node": node, "s": s, "entries": entries})
        return {"dim": self.dimension, "type": self.rs.label,
                "weights": [list(w) for w in self.weights],
                "qdeg": self.qdegs if self.graded else None,
                "t_bound": self.t_bound, "complete": self.complete,
                "cyclic_vector": self.cyclic_vector, "actions": acts}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict, rs: RootSystem) -> "ExplicitModule":
        n = data["dim"]
        actions: dict = {}
        for a in data["actions"]:
            key = (a["gen"], a["node"], a["s"])
            cols = [[] for _ in range(n)]
            for r, c, v in a["entries"]:
                cols[c].append((r, Fraction(v)))
            actions[key] = [tuple(col) for col in cols]
        return cls(rs, data["weights"], data["qdeg"], actions, data["t_bound"],
                   data.get("cyclic_vector"), complete=data.get("complete", True))


class TensorModule(CurrentModule):
    """Tensor product with the coproduct action; labels are tuples of factor labels."""

    def __init__(self, factors):
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, TensorModule) else [f])
        if not flat:
            raise DomainError("empty tensor product")
        rs = flat[0].rs
        if any(f.rs != rs for f in flat):
            raise DomainError("tensor factors have different root systems")
        self.rs = rs
        self.factors = flat
        self._dens: dict = {}

    def __repr__(self):
        return f"TensorModule({', '.join(map(repr, self.factors))})"

    @property
    def dimension(self) -> int:
        n = 1
        for f in self.factors:
            n *= f.dimension
        return n

    @property
    def nfactors(self) -> int:
        return len(self.factors)

    @property
    def t_bound(self) -> int:
        return sum(f.t_bound for f in self.factors)

    @property
    def graded(self) -> bool:
        return all(f.graded for f in self.factors)

    def basis(self):
        return list(itertools.product(*[range(f.dimension) for f in self.factors]))

    def weight(self, label):
        out = self.rs.zero
        for f, j in zip(self.factors, label):
            out = tuple(a + b for a, b in zip(out, f.weights[j]))
        return out

    def qdeg(self, label):
        if not self.graded:
            return None
        return sum(f.qdegs[j] for f, j in zip(self.factors, label))

    def weight_multiplicities(self) -> dict:
        out = {self.rs.zero: 1}
        for f in self.factors:
            nxt: dict = defaultdict(int)
            fm = f.weight_multiplicities()
            for a, x in out.items():
                for b, y in fm.items():
                    nxt[tuple(u + w for u, w in zip(a, b))] += x * y
            out = dict(nxt)
        return out

    def cyclic(self) -> dict | None:
        if any(f.cyclic_vector is None for f in self.factors):
            return None
        return {tuple(f.cyclic_vector for f in self.factors): Fraction(1)}

    @property
    def cyclic_vector(self):
        c = self.cyclic()
        return None if c is None else next(iter(c))

    def act(self, gen, vec):
        out: dict = {}
        for label, v in vec.items():
            for m, f in enumerate(self.factors):
                for r, c in f.image(gen, label[m]).items():
                    key = label[:m] + (r,) + label[m + 1:]
                    x = out.get(key, 0) + v * c
                    if x:
                        out[key] = x
                    else:
                        out.pop(key, None)
        return out

    def newton_coefficients(self, s: int) -> list[tuple]:
        """Per factor, the coefficients of P_s(t + c_m) below its t_bound.

        P_s(t) = prod_{j<s} (t - r_j) where the roots r list each evaluation
        point c_m repeated t_bound_m times.  P_0, P_1, ... have exact degrees
        0, 1, ..., so x (x) P_s span the same degree filtration as x (x) t^s,
        and P_s kills factor m once all of its copies of c_m are roots.
        """
        key = ("newton", s)
        hit = self._dens.get(key)
        if hit is None:
            roots = [f.shift for f in self.factors for _ in range(f.t_bound)]
            hit = []
            for f in self.factors:
                poly = [Fraction(1)]
                for r in roots[:s]:
                    a = f.shift - r
                    nxt = [Fraction(0)] * (len(poly) + 1)
                    for k, p in enumerate(poly):
                        nxt[k + 1] += p
                        nxt[k] += a * p
                    poly = nxt[:f.t_bound]
                poly = poly + [Fraction(0)] * (f.t_bound - len(poly))
                hit.append(tuple(poly))
            self._dens[key] = hit
        return hit

    @property
    def newton_ready(self) -> bool:
        return all(isinstance(f, ExplicitModule) and f.complete for f in self.factors)

    def filtration_scale(self, gen) -> int:
        """The integer factor by which filtration_act exceeds x (x) P_s."""
        self._filtration_data(gen)
        return self._dens[("filt-scale", gen)]

    def filtration_act(self, gen, vec):
        """A nonzero multiple of x (x) P_s applied to vec, in integers; see newton_coefficients."""
        if not self.newton_ready:
            return self.scaled_act(gen, vec)
        data = self._filtration_data(gen)
        out: dict = {}
        for label, v in vec.items():
            for m, imgs in data.items():
                for r, c in imgs[label[m]].items():
                    key = label[:m] + (r,) + label[m + 1:]
                    x = out.get(key, 0) + v * c
                    if x:
                        out[key] = x
                    else:
                        del out[key]
        return out

    def _filtration_data(self, gen) -> dict:
        kind, node, s = gen
        key = ("filt", gen)
        data = self._dens.get(key)
        if data is None:
            coeffs = self.newton_coefficients(s)
            scale = 1
            live = []
            for m, (f, cf) in enumerate(zip(self.factors, coeffs)):
                if not any(cf):
                    continue
                live.append(m)
                for j in range(f.dimension):
                    for v in f.poly_image(kind, node, cf, j).values():
                        if isinstance(v, Fraction):
                            scale = lcm(scale, v.denominator)
            images = {m: [{r: int(v * scale) for r, v in
                           self.factors[m].poly_image(kind, node, coeffs[m], j).items()}
                          for j in range(self.factors[m].dimension)] for m in live}
            data = self._dens[key] = images
            self._dens[("filt-scale", gen)] = scale
        return data

    def scaled_act(self, gen, vec):
        """A nonzero multiple of act(gen, vec) with integer arithmetic on integer input."""
        key = ("den", gen)
        scale = self._dens.get(key)
        if scale is None:
            scale = 1
            for f in self.factors:
                scale = lcm(scale, f.denominator(gen))
            self._dens[key] = scale
        images = [{} for _ in self.factors]
        out: dict = {}
        for label, v in vec.items():
            for m, f in enumerate(self.factors):
                j = label[m]
                img = images[m].get(j)
                if img is None:
                    img = images[m][j] = f.scaled_image(gen, j, scale)
                for r, c in img.items():
                    key = label[:m] + (r,) + label[m + 1:]
                    x = out.get(key, 0) + v * c
                    if x:
                        out[key] = x
                    else:
                        del out[key]
        return out

    def graded_character(self) -> GradedCharacter:
        if not self.graded:
            raise DomainError("ungraded module; use the fusion filtration for a grading")
        out = GradedCharacter({(self.rs.zero, 0): 1})
        for f in self.factors:
            out = out * f.graded_character()
        return GradedCharacter(out.terms)


def tensor(M: CurrentModule, N: CurrentModule) -> TensorModule:
    if M.rs != N.rs:
        raise DomainError("tensor factors have different root systems")
    return TensorModule([M, N])


def evaluation_shift(M: CurrentModule, c) -> CurrentModule:
    """Twist x t^s -> x (t + c)^s."""
    c = Fraction(c)
    if isinstance(M, TensorModule):
        return TensorModule([evaluation_shift(f, c) for f in M.factors])
    if c == 0:
        return M
    return ExplicitModule(M.rs, M.weights, M.qdegs, M.actions, M.t_bound, M.cyclic_vector,
                          M.shift + c, M.complete, M.name)


def graded_character(M: CurrentModule) -> GradedCharacter:
    return M.graded_character()


def trivial_module(rs: RootSystem) -> ExplicitModule:
    return ExplicitModule(rs, [rs.zero], [0], {}, 1, cyclic_vector=0, name="trivial")


def natural_module(rs: RootSystem) -> ExplicitModule:
    """C^{r+1} for sl_{r+1} with e_i = E_{i,i+1}, f_i = E_{i+1,i}, h_i = E_ii - E_{i+1,i+1}."""
    if rs.dynkin_type != "A":
        raise UnsupportedError("explicit modules are available in type A only")
    n = rs.rank + 1
    weights = []
    for k in range(n):
        w = [0] * rs.rank
        if k < rs.rank:
            w[k] += 1
        if k > 0:
            w[k - 1] -= 1
        weights.append(tuple(w))
    one = Fraction(1)
    actions = {}
    for i in rs.nodes:
        e = [()] * n
        f = [()] * n
        h = [()] * n
        e[i] = ((i - 1, one),)
        f[i - 1] = ((i, one),)
        h[i - 1] = ((i - 1, one),)
        h[i] = ((i, -one),)
        actions[("e", i, 0)] = e
        actions[("f", i, 0)] = f
        actions[("h", i, 0)] = h
    return ExplicitModule(rs, weights, [0] * n, actions, 1, cyclic_vector=0, name="natural")


# spans generated by a highest weight vector


class PBWSpan:
    """Stage-wise span of U(n^-[t]) v for a highest weight vector v.

    Stage n collects f_{i_1} t^{s_1} ... f_{i_m} t^{s_m} v with s_1 + ... + s_m <= n,
    built by G_n[lam] = G_{n-1}[lam] + sum_i sum_{s<K} f_i t^s N_{n-s}[lam + alpha_i],
    where N_m is the part added at stage m.  Degrees s >= K are never needed
    because the twisted operators satisfy a linear recurrence of order K.
    """

    def __init__(self, M: CurrentModule, v: dict, K: int, target=None, max_stage=200,
                 dominant_cone: bool = False, dense: bool = False):
        self.M = M
        self.dense = dense
        # on a graded module stage n only meets degree n, so the spans split by degree
        self.split = dense and M.graded
        self._labels = None
        self.rs = M.rs
        self.K = max(1, K)
        self.top = M.vector_weight(v)
        self.spaces: dict = {}
        self.new: list[dict] = []
        self.feed: list[dict] = []           # complement bases fed to the next generators
        self.snap: list[dict] = []           # dense mode: (pivot, value) of each feed row
        self.dims: list[int] = []
        self.total = 0
        self.ambient = M.weight_multiplicities()
        # weights above some dominant weight of M: an upward closed set, enough
        # for every dominant weight space (the span of U(g[t]) v is W-stable)
        self.cone = self._cone() if dominant_cone else None
        if self.cone is not None and target is not None:
            target = sum(self.ambient[lam] for lam in self.cone)
        # dense full spans keep per-stage snapshots for the associated graded
        self.frames = defaultdict(list) if dense and not self.split and self.cone is None else None
        self._run(v, target, max_stage)

    def _cone(self) -> set:
        rs = self.rs
        dominant = [lam for lam in self.ambient if rs.is_dominant(lam)]
        out = set()
        for mu in self.ambient:
            for lam in dominant:
                diff = rs.root_coordinates(tuple(a - b for a, b in zip(mu, lam)))
                if all(c >= 0 and c.denominator == 1 for c in diff):
                    out.add(mu)
                    break
        return out

    @property
    def restricted(self) -> bool:
        return self.cone is not None

    def _depth(self, lam):
        return self.rs.height(tuple(a - b for a, b in zip(self.top, lam)))

    def _key(self, lam, stage):
        return (lam, stage) if self.split else lam

    def _size(self, lam, stage) -> int:
        space = self.spaces.get(self._key(lam, stage))
        return 0 if space is None else len(space)

    def _full(self, lam, stage) -> int:
        if not self.split:
            return self.ambient.get(lam, 0)
        self._group()
        return len(self._labels.get((lam, stage), ()))

    def _group(self):
        if self._labels is None:
            M = self.M
            groups: dict = defaultdict(list)
            for k in M.basis():
                groups[self._key(M.weight(k), M.qdeg(k))].append(k)
            self._labels = groups

    def _space(self, lam, stage):
        key = self._key(lam, stage)
        space = self.spaces.get(key)
        if space is None:
            if self.dense:
                self._group()
                space = DenseSpace(sorted(self._labels[key]))
            else:
                space = Echelon()
            self.spaces[key] = space
        return space

    def _insert(self, lam, vecs, stage) -> list:
        space = self._space(lam, stage)
        if self.dense:
            rows = space.add_batch(vecs, stage)
        else:
            rows = [r for r in (space.add(vec, stage) for vec in vecs) if r is not None]
        self.total += len(rows)
        return rows

    def _run(self, v, target, max_stage):
        rs = self.rs
        nodes = list(rs.nodes)
        roots = {i: rs.simple_root(i) for i in nodes}
        by_depth: dict = defaultdict(set)
        act = getattr(self.M, "filtration_act", self.M.act)
        cone = self.cone
        quiet = 0
        n = 0
        while True:
            stage: dict = defaultdict(list)
            if n == 0:
                stage[self.top].extend(self._insert(self.top, [v], 0))
                by_depth[0].add(self.top)
            window = [(s, self.feed[n - s]) for s in range(1, min(n, self.K - 1) + 1)]
            current = self._feeder(stage, n)
            d = 1
            while True:
                sources = [mu for mu in by_depth.get(d - 1, ())
                           if stage.get(mu) or any(layer.get(mu) for _, layer in window)]
                if not sources and d - 1 >= max(by_depth, default=0):
                    break
                targets = defaultdict(list)
                for mu in sources:
                    for i in nodes:
                        lam = tuple(a - b for a, b in zip(mu, roots[i]))
                        targets[lam].append((mu, i))
                for lam in sorted(targets):
                    if cone is not None and lam not in cone:
                        continue
                    full = self._full(lam, n)
                    cands = (act(("f", i, s), vec)
                             for mu, i in targets[lam]
                             for s, layer in [(0, current)] + window
                             for vec in layer.get(mu, ()))
                    while self._size(lam, n) < full:
                        want = 1 if not self.dense else max(4, 2 * (full - self._size(lam, n)))
                        batch = [c for c in itertools.islice(cands, want) if c]
                        if not batch:
                            break
                        rows = self._insert(lam, batch, n)
                        if rows:
                            stage[lam].extend(rows)
                            by_depth[d].add(lam)
                d += 1
            added = sum(len(x) for x in stage.values())
            self.new.append(dict(stage))
            self.feed.append({mu: current[mu] for mu in stage})
            if self.dense:
                self.snap.append({mu: current.pivots[mu] for mu in stage})
            if self.frames is not None:
                for mu in stage:
                    self.frames[mu].append((n, self.spaces[mu].frame()))
            self.dims.append(self.total)
            quiet = 0 if added else quiet + 1
            if target is not None and self.total == target:
                break
            if quiet >= self.K:
                break
            n += 1
            if n > max_stage:
                raise NonClosureError(self.total, max_stage)
        while len(self.dims) > 1 and self.dims[-1] == self.dims[-2]:
            self.dims.pop()
            self.new.pop()
            self.feed.pop()
            if self.dense:
                self.snap.pop()

    def _feeder(self, stage, n):
        """Stage-n complement vectors by weight; in dense mode the reduced rows,
        read once a weight is finished for the stage (it is, when used as a source)."""
        if not self.dense:
            return stage
        spaces = self.spaces
        key = self._key

        class Feed(dict):
            pivots: dict = {}

            def __missing__(self, mu):
                got = spaces[key(mu, n)].reduced_rows(n) if stage.get(mu) else []
                self.pivots[mu] = [(p, a) for p, a, _ in got]
                rows = self[mu] = [r for _, _, r in got]
                return rows

            def get(self, mu, default=None):
                return self[mu] if stage.get(mu) else default

        feed = Feed()
        feed.pivots = {}
        return feed

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def layer_characters(self) -> list[dict]:
        out = [{} for _ in self.new]
        for (lam, q), m in self.graded_character().terms.items():
            out[q][lam] = m
        return out

    def graded_character(self) -> GradedCharacter:
        terms: dict = defaultdict(int)
        for q, layer in enumerate(self.new):
            for lam, rows in layer.items():
                if not rows:
                    continue
                if self.cone is None:
                    terms[(lam, q)] += len(rows)
                elif self.rs.is_dominant(lam):
                    for mu in self.rs.orbit(lam):
                        terms[(mu, q)] += len(rows)
        return GradedCharacter(terms)

    def stage_dimensions(self) -> list[int]:
        """dim of the full span at each stage (W-expanded in the restricted mode)."""
        if self.cone is None:
            return list(self.dims)
        out, acc = [], 0
        for layer in self.new:
            acc += sum(len(rows) * len(self.rs.orbit(lam))
                       for lam, rows in layer.items() if rows and self.rs.is_dominant(lam))
            out.append(acc)
        return out

    def associated_graded(self, name="") -> ExplicitModule:
        """The associated graded module with its induced g[t]-action."""
        if self.cone is not None:
            raise DomainError("the associated graded module needs the unrestricted span")
        if self.split:
            raise DomainError("the span of a graded module is its own associated graded")
        if self.frames is not None and getattr(self.M, "newton_ready", False):
            return self._graded_by_blocks(name)
        labels = []
        index = {}
        for q, layer in enumerate(self.new):
            for lam in sorted(layer):
                for row in layer[lam]:
                    p = min(row)
                    index[(lam, p)] = len(labels)
                    labels.append((q, lam, p))
        top = self.top_degree
        actions: dict = {}
        for s in range(top + 1):
            for kind in KINDS:
                for node in self.rs.nodes:
                    gen = (kind, node, s)
                    shift = generator_weight(gen, self.rs)
                    cols = []
                    nonzero = False
                    for q, lam, p in labels:
                        col = []
                        if q + s <= top:
                            tgt = tuple(a + b for a, b in zip(lam, shift))
                            img = self.M.act(gen, self.spaces[lam].rows[p])
                            if img:
                                space = self.spaces.get(tgt)
                                if space is None:
                                    raise InconsistencyError("image leaves the cyclic span")
                                coords = space.coordinates(img)
                                for pp, c in coords.items():
                                    stage = space.tags[pp]
                                    if stage > q + s:
                                        raise InconsistencyError("filtration is not respected")
                                    if stage == q + s:
                                        col.append((index[(tgt, pp)], c))
                        col.sort()
                        nonzero = nonzero or bool(col)
                        cols.append(tuple(col))
                    if nonzero:
                        actions[gen] = cols
        cyc = index[(self.top, min(self.new[0][self.top][0]))]
        return ExplicitModule(self.rs, [lam for _, lam, _ in labels], [q for q, _, _ in labels],
                              actions, top + 1, cyclic_vector=cyc, name=name)

    def _graded_by_blocks(self, name) -> ExplicitModule:
        # basis of layer n at lam: the reduced rows snapshotted at the end of stage n.
        # The class of x in G_n / G_{n-1}: reduce x by the snapshot of G_{n-1}, then
        # its entry at a stage-n pivot over the pivot value is the coefficient.
        # x (x) t^s and x (x) P_s agree on the associated graded, and P_s kills the
        # module once s reaches its t_bound.
        M = self.M
        labels = []
        blocks = []
        targets: dict = defaultdict(list)    # (lam, stage) -> [(pivot column, value, index)]
        for q, layer in enumerate(self.feed):
            for lam in sorted(layer):
                space = self.spaces[lam]
                first = len(labels)
                for p, a in self.snap[q][lam]:
                    targets[(lam, q)].append((space.index[p], a, len(labels)))
                    labels.append((q, lam))
                blocks.append((q, lam, first, int_matrix(layer[lam], space.index, space.m)))
        top = self.top_degree
        bound = min(top + 1, M.t_bound)
        actions: dict = {}
        for s in range(bound):
            for kind in KINDS:
                for node in self.rs.nodes:
                    gen = (kind, node, s)
                    shift = generator_weight(gen, self.rs)
                    cols: list = [[] for _ in labels]
                    ops: dict = {}
                    for q, lam, first, R in blocks:
                        n = q + s
                        tgt = tuple(a + b for a, b in zip(lam, shift))
                        piv = targets.get((tgt, n))
                        if not piv:
                            continue
                        if lam not in ops:
                            ops[lam] = self._operator_rows(gen, lam, tgt)
                        if ops[lam] is None:
                            continue
                        coeffs, den = self._layer_coefficients(R, ops[lam], tgt, n, piv)
                        den *= M.filtration_scale(gen)
                        for i, j in zip(*np.nonzero(coeffs)):
                            _, a, idx = piv[j]
                            cols[first + i].append((idx, _num(Fraction(int(coeffs[i, j]), den * a))))
                    if any(cols):
                        actions[gen] = [tuple(sorted(c)) for c in cols]
        cyc = targets[(self.top, 0)][0][2]
        return ExplicitModule(self.rs, [lam for _, lam in labels], [q for q, _ in labels],
                              actions, bound, cyclic_vector=cyc, name=name)

    def _layer_coefficients(self, R, op, tgt, n, piv):
        """Integer numerators (and a common denominator) of the stage-n classes of R @ op.T."""
        cols = [c for c, _, _ in piv]
        frame = None
        for stage, f in self.frames.get(tgt, ()):
            if stage < n:
                frame = f
            else:
                break
        if frame is None or not len(frame[0]):
            return exact_matmul(R, op[cols].T), 1
        P, vals, free, F = frame
        where = {c: k for k, c in enumerate(free)}
        L = lcm(*(int(x) for x in vals))
        V = exact_matmul(R, op[list(P) + cols].T)
        k = len(P)
        head, rest = V[:, :k], V[:, k:]
        if L != 1:
            scale = np.array([L // int(x) for x in vals], dtype=object)
            head, rest = head.astype(object) * scale[None, :], rest.astype(object) * L
        return exact_sub(rest, exact_matmul(head, F[:, [where[c] for c in cols]])), L

    def _operator_rows(self, gen, lam, tgt):
        """filtration_act(gen) from weight lam to tgt as a dense integer matrix, or None if zero."""
        src, dst = self.spaces[lam], self.spaces.get(tgt)
        if dst is None:
            return None
        rows = [dict() for _ in range(dst.m)]
        nonzero = False
        for k, label in enumerate(src.labels):
            for r, c in self.M.filtration_act(gen, {label: 1}).items():
                j = dst.index.get(r)
                if j is None:
                    raise InconsistencyError("image leaves the cyclic span")
                rows[j][k] = c
                nonzero = True
        if not nonzero:
            return None
        return int_matrix(rows, {k: k for k in range(src.m)}, src.m)


def is_highest_weight_vector(M: CurrentModule, v: dict, smax: int) -> bool:
    """e_i t^s v = 0 and h_i t^s v in C v for s <= smax."""
    lam = M.vector_weight(v)
    for s in range(smax + 1):
        for i in M.rs.nodes:
            if M.act(("e", i, s), v):
                return False
            hv = M.act(("h", i, s), v)
            if hv:
                k = next(iter(v))
                c = hv.get(k, 0) / v[k]
                if add_into(dict(hv), v, -c):
                    return False
    return True


def irreducible_evaluation_module(lam: Weight, rs: RootSystem) -> ExplicitModule:
    """V(lam) for sl_{r+1}, cut out of a tensor power of the natural module."""
    lam = tuple(lam)
    if rs.dynkin_type != "A":
        raise UnsupportedError("explicit irreducible modules are available in type A only")
    if len(lam) != rs.rank or not rs.is_dominant(lam):
        raise DomainError(f"{lam} is not a dominant weight of {rs.label}")
    return _irreducible(lam, rs)


_IRREDUCIBLES: dict = {}


def _irreducible(lam, rs):
    key = (lam, rs)
    if key in _IRREDUCIBLES:
        return _IRREDUCIBLES[key]
    if not any(lam):
        mod = trivial_module(rs)
    else:
        nat = natural_module(rs)
        blocks = []
        for i, a in enumerate(lam, start=1):
            blocks.extend([i] * a)
        amb = TensorModule([nat] * sum(blocks))
        v = {(): Fraction(1)}
        for i in blocks:
            wedge = {}
            for perm in itertools.permutations(range(i)):
                sign = _perm_sign(perm)
                wedge[perm] = Fraction(sign)
            v = {a + b: x * y for a, x in v.items() for b, y in wedge.items()}
        span = PBWSpan(amb, v, 1, target=rs.weyl_dimension(lam))
        mod = span.associated_graded(name=f"V{lam}")
        mod.t_bound = 1
        mod.actions = {g: m for g, m in mod.actions.items() if g[2] == 0}
        if mod.dimension != rs.weyl_dimension(lam):
            raise InconsistencyError(f"V({lam}) has dimension {mod.dimension}")
        if mod.graded_character() != weyl_character(lam, rs):
            raise InconsistencyError(f"V({lam}) has the wrong character")
    _IRREDUCIBLES[key] = mod
    return mod


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


# general cyclic closure


def default_schedule(M: CurrentModule) -> int:
    return M.t_bound + getattr(M, "nfactors", 1) + 2


def cyclic_closure(M: CurrentModule, v: dict, degree_schedule=None):
    """U(g[t]) v by fixpoint iteration over all generators of degree < S.

    Returns (submodule, is_all).  One extra degree S is applied to the final
    span as a certificate; if it enlarges the span, NonClosureError is raised.
    """
    v = {k: Fraction(x) for k, x in v.items() if x}
    if not v:
        raise DomainError("cyclic closure of the zero vector")
    S = default_schedule(M) if degree_schedule is None else int(degree_schedule)
    rs = M.rs
    homogeneous = M.graded and len({M.qdeg(k) for k in v}) == 1

    def key_of(vec):
        lab = next(iter(vec))
        return (M.weight(lab), M.qdeg(lab)) if homogeneous else M.weight(lab)

    spaces: dict = {}
    queue = []

    def push(vec):
        if homogeneous:
            parts = defaultdict(dict)
            for k, x in vec.items():
                parts[(M.weight(k), M.qdeg(k))][k] = x
        else:
            parts = M.weight_components(vec)
        grew = False
        for key, part in parts.items():
            space = spaces.setdefault(key, Echelon())
            row = space.add(part)
            if row is not None:
                queue.append((key, row))
                grew = True
        return grew

    if homogeneous and M.qdeg(next(iter(v))) == 0 and _is_weight_vector(M, v) \
            and is_highest_weight_vector(M, v, M.t_bound):
        span = highest_weight_closure(M, v)
        sub = span.associated_graded(name="closure")
        return sub, sub.dimension == M.dimension
    push(v)
    gens = [(kind, i, s) for s in range(S) for kind in KINDS for i in rs.nodes]
    while queue:
        _, row = queue.pop()
        for g in gens:
            img = M.act(g, row)
            if img:
                push(img)
    extra = [(kind, i, S) for kind in KINDS for i in rs.nodes]
    rows = [row for space in spaces.values() for row in space.rows.values()]
    for row in rows:
        for g in extra:
            img = M.act(g, row)
            if img and any(not spaces.get(key_of(part), Echelon()).contains(part)
                           for part in _split(M, img, homogeneous).values()):
                raise NonClosureError(sum(len(s) for s in spaces.values()), S)
    sub = _submodule(M, spaces, S, homogeneous)
    return sub, sub.dimension == M.dimension


def _is_weight_vector(M, v) -> bool:
    return len({M.weight(k) for k in v}) == 1


def highest_weight_closure(M: CurrentModule, v: dict, target=None) -> PBWSpan:
    """U(g[t]) v for a highest weight vector v, graded by stage."""
    return PBWSpan(M, v, M.t_bound, target=target)


def _split(M, vec, homogeneous):
    parts: dict = defaultdict(dict)
    for k, x in vec.items():
        key = (M.weight(k), M.qdeg(k)) if homogeneous else M.weight(k)
        parts[key][k] = x
    return parts


def _submodule(M, spaces, S, homogeneous) -> ExplicitModule:
    labels = []
    index = {}
    for key in sorted(spaces, key=repr):
        for p in spaces[key].order:
            index[(key, p)] = len(labels)
            labels.append((key, p))
    graded = M.graded and homogeneous
    top = M.t_bound if graded else S
    actions = {}
    for s in range(top):
        for kind in KINDS:
            for node in M.rs.nodes:
                gen = (kind, node, s)
                cols = []
                for key, p in labels:
                    img = M.act(gen, spaces[key].rows[p])
                    col = []
                    for k2, part in _split(M, img, homogeneous).items():
                        for pp, c in spaces[k2].coordinates(part).items():
                            col.append((index[(k2, pp)], c))
                    cols.append(tuple(sorted(col)))
                if any(cols):
                    actions[gen] = cols
    weights = [key[0] if homogeneous else key for key, _ in labels]
    qdegs = [key[1] for key, _ in labels] if graded else None
    return ExplicitModule(M.rs, weights, qdegs, actions, top, cyclic_vector=None,
                          complete=graded, name="closure")


# bracket audit


def _bracket(x, y, rs):
    """[x, y] for Chevalley generators as {generator kind/node: coeff}, or None if not a generator."""
    (k1, i), (k2, j) = x, y
    c = rs.cartan_matrix
    if k1 == "h" and k2 == "h":
        return {}
    if k1 == "h":
        if k2 == "e":
            return {("e", j): c[i - 1][j - 1]}
        return {("f", j): -c[i - 1][j - 1]}
    if k2 == "h":
        out = _bracket(y, x, rs)
        return {k: -v for k, v in out.items()}
    if k1 == "e" and k2 == "f":
        return {("h", i): 1} if i == j else {}
    if k1 == "f" and k2 == "e":
        return {("h", i): -1} if i == j else {}
    if i == j or c[i - 1][j - 1] == 0:
        return {}
    return None


def bracket_audit(M: CurrentModule, checks: int = 200, seed: int = 0, smax=None):
    """Random commutator checks [X t^a, Y t^b] v = [X, Y] t^{a+b} v, plus Serre relations.

    Returns (number of checks run, list of failures).
    """
    rng = random.Random(seed)
    rs = M.rs
    if smax is None:
        smax = max(1, min(3, getattr(M, "t_bound", 1)))
    dims = [f.dimension for f in M.factors] if isinstance(M, TensorModule) else None
    limit = None if (M.graded or getattr(M, "complete", True)) else M.t_bound - 1
    failures = []
    done = 0
    nodes = list(rs.nodes)
    while done < checks:
        if dims is not None:
            label = tuple(rng.randrange(d) for d in dims)
        else:
            label = rng.randrange(M.dimension)
        v = {label: Fraction(1)}
        a, b = rng.randint(0, smax), rng.randint(0, smax)
        if limit is not None and a + b > limit:
            continue
        x = (rng.choice(KINDS), rng.choice(nodes))
        y = (rng.choice(KINDS), rng.choice(nodes))
        br = _bracket(x, y, rs)
        gx, gy = (x[0], x[1], a), (y[0], y[1], b)
        lhs = add_into(M.act(gx, M.act(gy, v)), M.act(gy, M.act(gx, v)), -1)
        if br is None:
            # adjacent e_i, e_j (or f's): check ad(x_i)^{1-c_ij} x_j = 0 instead
            i, j = x[1], y[1]
            n = 1 - rs.cartan_matrix[i - 1][j - 1]
            degs = [rng.randint(0, smax) for _ in range(n)]
            if limit is not None and sum(degs) + b > limit:
                continue
            lhs = _ad_chain(M, [(x[0], i, d) for d in degs], gy, v)
            rhs = {}
        else:
            rhs = {}
            for (kind, node), coeff in br.items():
                add_into(rhs, M.act((kind, node, a + b), v), coeff)
        if add_into(dict(lhs), rhs, -1):
            failures.append((gx, gy, label))
        done += 1
    return done, failures


def _ad_chain(M, xs, y, v):
    """ad(x_1) ... ad(x_n)(y) applied to v, expanded as operator words."""
    words = [((y,), 1)]
    for x in reversed(xs):
        nxt = []
        for word, c in words:
            nxt.append(((x,) + word, c))
            nxt.append((word + (x,), -c))
        words = nxt
    out: dict = {}
    for word, c in words:
        w = v
        for g in reversed(word):
            w = M.act(g, w)
            if not w:
                break
        if w:
            add_into(out, w, c)
    return out
