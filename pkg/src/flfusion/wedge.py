"""Level-one Demazure modules of sl_n[t] realized inside semi-infinite wedges.

The natural loop module has basis u_k, k in Z, with u_k = e_a t^m for
k = a + n m (0 <= a < n).  A wedge state is a set of occupied indices that
agrees with the sea {k >= 0} outside a finite window.  It is stored as the
pair (particles below 0, holes at or above 0), both sorted tuples.

E_ab t^s acts as a derivation: it moves one colour-b particle up s modes into
colour a.  The sign is (-1) to the number of occupied indices jumped over.
For s >= 0 only finitely many particles can move, so every state has a finite
image, and the total mode can only grow.  It is bounded above by 0, so the
states reachable from any start form a finite graded set.

The state with colour a filled from mode -mu_a upward has finite weight
(mu_0 - mu_1, ..., mu_{n-2} - mu_{n-1}) and is killed by e_i t^s and by
h_i t^s for s > 0.  Its cyclic g[t]-submodule is the level-one Demazure
module with that highest weight, built here without any fusion product.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import defaultdict
from fractions import Fraction

from .currentmod import CurrentModule, ExplicitModule, _submodule
from .errors import DomainError
from .linalg import Echelon
from .rootdata import RootSystem, Weight


def _occupied(state, k: int) -> bool:
    parts, holes = state
    if k < 0:
        i = bisect_left(parts, k)
        return i < len(parts) and parts[i] == k
    i = bisect_left(holes, k)
    return not (i < len(holes) and holes[i] == k)


def _between(state, lo: int, hi: int) -> int:
    """Occupied indices strictly between lo and hi."""
    parts, holes = state
    count = bisect_left(parts, hi) - bisect_right(parts, lo)
    a = max(lo + 1, 0)
    if hi > a:
        count += hi - a - (bisect_left(holes, hi) - bisect_left(holes, a))
    return count


def _move(state, k: int, k2: int):
    parts, holes = state
    parts, holes = list(parts), list(holes)
    if k < 0:
        parts.remove(k)
    else:
        holes.append(k)
    if k2 < 0:
        parts.append(k2)
    else:
        holes.remove(k2)
    return tuple(sorted(parts)), tuple(sorted(holes))


class WedgeModule(CurrentModule):
    """The (infinite) wedge space as an sl_n[t]-module; only ``act`` is global."""

    def __init__(self, rs: RootSystem):
        if rs.dynkin_type != "A":
            raise DomainError("wedge realization is for type A only")
        self.rs = rs
        self.n = rs.rank + 1
        self.t_bound = 1

    @property
    def graded(self) -> bool:
        return True

    def colour_counts(self, state) -> list[int]:
        n = self.n
        counts = [0] * n
        for k in state[0]:
            counts[k % n] += 1
        for k in state[1]:
            counts[k % n] -= 1
        return counts

    def weight(self, state) -> Weight:
        c = self.colour_counts(state)
        return tuple(c[a] - c[a + 1] for a in range(self.n - 1))

    def mode(self, state) -> int:
        n = self.n
        return sum(k // n for k in state[0]) - sum(k // n for k in state[1])

    def qdeg(self, state) -> int:
        return self.mode(state) - self.base_mode

    def state(self, mu) -> tuple:
        """Colour a filled from mode -mu[a] upward."""
        n = self.n
        parts, holes = [], []
        for a, m in enumerate(mu):
            if m > 0:
                parts += [a + n * j for j in range(-m, 0)]
            else:
                holes += [a + n * j for j in range(0, -m)]
        return tuple(sorted(parts)), tuple(sorted(holes))

    def _unit(self, state, a: int, b: int, s: int) -> dict:
        """E_ab t^s on one state, with (a, b, s) != (a, a, 0)."""
        n = self.n
        shift = a - b + n * s
        top = (state[1][-1] if state[1] else 0) + n + 1
        out: dict = {}
        for k in list(state[0]) + [k for k in range(b, top, n) if _occupied(state, k)]:
            if k % n != b:
                continue
            k2 = k + shift
            if _occupied(state, k2):
                continue
            lo, hi = min(k, k2), max(k, k2)
            sign = -1 if _between(state, lo, hi) % 2 else 1
            new = _move(state, k, k2)
            out[new] = out.get(new, 0) + sign
        return out

    def act(self, gen, vec: dict) -> dict:
        kind, i, s = gen
        out: dict = defaultdict(Fraction)
        for st, c in vec.items():
            if kind == "h" and s == 0:
                out[st] += c * self.weight(st)[i - 1]
                continue
            if kind == "e":
                terms = [(i - 1, i, 1)]
            elif kind == "f":
                terms = [(i, i - 1, 1)]
            else:
                terms = [(i - 1, i - 1, 1), (i, i, -1)]
            for a, b, sgn in terms:
                for new, x in self._unit(st, a, b, s).items():
                    out[new] += sgn * x * c
        return {k: v for k, v in out.items() if v}


def level_one_demazure_module(lam: Weight, rs: RootSystem) -> ExplicitModule:
    """Cyclic g[t]-submodule of the wedge space on the highest weight state of weight lam."""
    if any(x < 0 for x in lam):
        raise DomainError("highest weight must be dominant")
    W = WedgeModule(rs)
    mu = [0]
    for x in lam:
        mu.append(mu[-1] - x)
    v = W.state(mu)
    W.base_mode = W.mode(v)
    # modes are at most 0, so degrees stay below -base_mode
    W.t_bound = -W.base_mode + 1
    spaces: dict = defaultdict(Echelon)
    queue = [{v: 1}]
    spaces[(W.weight(v), 0)].add({v: 1})
    while queue:
        row = queue.pop()
        for s in range(W.t_bound):
            for i in rs.nodes:
                img = W.act(("f", i, s), row)
                if not img:
                    continue
                st = next(iter(img))
                new = spaces[(W.weight(st), W.qdeg(st))].add(img)
                if new is not None:
                    queue.append(new)
    M = _submodule(W, spaces, W.t_bound, True)
    key = (W.weight(v), 0)
    for j, (w, q) in enumerate(zip(M.weights, M.qdegs)):
        if (w, q) == key:
            M.cyclic_vector = j
    M.name = "wedge"
    return M
