"""Q-system identities among Demazure characters and the matching cluster mutations.

For a node i and level l >= 1 the three characters

    A = ch_q D(l+1, (l+1) omega_i) * D(l-1, (l-1) omega_i)
    B = ch_q D(l, l omega_i) * D(l, l omega_i)
    C = ch_q of the fusion of D(l, l omega_j) over the neighbours j of i

satisfy B = A + q^s C for a single integer shift s.  The cluster side uses the
Q-system quiver on I x {0, 1} and compares its exchange binomials, evaluated
at twisted ungraded characters, with the same identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .charring import GradedCharacter, affine_demazure_character, specialize_q
from .errors import DomainError, UnsupportedError
from .fusion import chain_character, demazure_module_explicit, fusion_product
from .rootdata import RootSystem


# --- K-classes -------------------------------------------------------------

@dataclass(frozen=True)
class KClass:
    """Class of the section module of the (node, level) sheaf; formal for negative levels."""
    node: int
    level: int
    character: GradedCharacter | None = None

    @property
    def formal(self) -> bool:
        return self.level < 0

    def require_character(self) -> GradedCharacter:
        if self.character is None:
            raise DomainError(f"formal class ({self.node}, {self.level}) has no character")
        return self.character

    def __str__(self):
        return f"P[{self.node},{self.level}]"


def kclass(rs: RootSystem, i: int, level: int, D_max=None) -> KClass:
    if i not in rs.nodes:
        raise DomainError(f"node {i} not in {list(rs.nodes)}")
    if level < 0:
        return KClass(i, level)
    mu = tuple(level * x for x in rs.embed(rs.fundamental_weight(i)))
    return KClass(i, level, affine_demazure_character(level, mu, rs, D_max))


def neighbors(rs: RootSystem, i: int) -> list[int]:
    return [j for j in rs.nodes if j != i and rs.cartan_matrix[i - 1][j - 1] != 0]


def _require_simply_laced(rs: RootSystem):
    if not rs.simply_laced:
        raise DomainError(f"{rs.label} is not simply laced")


def neighbor_support_identity(rs: RootSystem, i: int) -> bool:
    """sum_{j ~ i} (-C_ij) omega_j^vee == 2 omega_i^vee - alpha_i^vee, in coweight coordinates."""
    _require_simply_laced(rs)
    C = rs.cartan_matrix
    lhs = [0] * rs.rank
    for j in neighbors(rs, i):
        lhs[j - 1] += -C[i - 1][j - 1]
    rhs = [2 * int(j == i) - c for j, c in zip(rs.nodes, rs.simple_coroot(i))]
    return lhs == rhs


# --- character identity ----------------------------------------------------

def _unit(rs: RootSystem, i: int):
    return tuple(int(k == i) for k in rs.nodes)


def _triple_characters(rs: RootSystem, i: int, level: int, D_max=None):
    """A, B, C from the Demazure operator engine."""
    w = _unit(rs, i)
    A = chain_character([level + 1, level - 1], [w], tuple((level - 1) * x for x in rs.embed(w)),
                        rs, D_max)
    B = affine_demazure_character(level, tuple(2 * level * x for x in rs.embed(w)), rs, D_max)
    nb = tuple(sum(int(k == j) for j in neighbors(rs, i)) for k in rs.nodes)
    C = affine_demazure_character(level, tuple(level * x for x in rs.embed(nb)), rs, D_max)
    return A, B, C


def _fuse(rs: RootSystem, keys) -> GradedCharacter:
    mods = [demazure_module_explicit(l, c, rs) for l, c in keys if l > 0]
    if not mods:
        return GradedCharacter({(rs.zero, 0): 1})
    return fusion_product(mods)[0]


def _triple_fusion(rs: RootSystem, i: int, level: int):
    """A, B, C from explicit fusion products (type A)."""
    if rs.dynkin_type != "A":
        raise UnsupportedError("the fusion engine builds explicit modules in type A only")
    w = _unit(rs, i)
    A = _fuse(rs, [(level + 1, w), (level - 1, w)])
    B = _fuse(rs, [(level, w), (level, w)])
    C = _fuse(rs, [(level, _unit(rs, j)) for j in neighbors(rs, i)])
    return A, B, C


def _match(big: GradedCharacter, small: GradedCharacter, extra: GradedCharacter):
    """Shift s with big = small + q^s extra, or None; also the residual big - small."""
    residual = big - small
    if not residual.terms or not extra.terms:
        return (0 if residual == extra else None), residual
    s = min(residual.qdegs) - min(extra.qdegs)
    return (s if residual == extra.shift(s) else None), residual


def qsystem_check(rs: RootSystem, i: int, level: int, D_max=None, engine: str | None = None) -> dict:
    """Find the orientation and shift realizing the exact triple at (i, level).

    engine: "character", "fusion" or "both" (default: both in type A, character otherwise).
    With both engines the two triples must also agree after normalization.
    """
    _require_simply_laced(rs)
    if level < 1:
        raise DomainError(f"need level >= 1, got {level}")
    if i not in rs.nodes:
        raise DomainError(f"node {i} not in {list(rs.nodes)}")
    if engine is None:
        engine = "both" if rs.dynkin_type == "A" else "character"
    if engine not in ("character", "fusion", "both"):
        raise DomainError(f"unknown engine {engine}")
    if engine == "fusion":
        triple = _triple_fusion(rs, i, level)
    else:
        triple = _triple_characters(rs, i, level, D_max)
    engines_agree = True
    if engine == "both":
        other = _triple_fusion(rs, i, level)
        engines_agree = all(x.normalized()[0] == y.normalized()[0] for x, y in zip(triple, other))
    A, B, C = (x.normalized()[0] for x in triple)
    orientation, shift, residual = None, None, None
    for name, big, small in (("B = A + q^s C", B, A), ("A = B + q^s C", A, B)):
        s, res = _match(big, small, C)
        if s is not None:
            orientation, shift, residual = name, s, res
            break
        if residual is None:
            residual = res
    ok = orientation is not None and engines_agree
    return {"type": rs.label, "node": i, "level": level, "engine": engine,
            "pass": ok, "orientation": orientation, "shift": shift,
            "engines_agree": engines_agree, "A": A, "B": B, "C": C,
            "residual": None if ok else residual,
            "dims": {"A": A.dim, "B": B.dim, "C": C.dim}}


# --- cluster seeds ---------------------------------------------------------

def _same(a, b) -> bool:
    return sympy.cancel(a - b) == 0


@dataclass(frozen=True)
class ClusterSeed:
    nodes: tuple
    B: tuple            # skew-symmetric integer matrix, rows indexed like nodes
    variables: tuple    # sympy expressions, one per node
    labels: tuple = ()  # optional bookkeeping label per node

    def __post_init__(self):
        n = len(self.nodes)
        if len(self.B) != n or any(len(r) != n for r in self.B) or len(self.variables) != n:
            raise DomainError("seed shape mismatch")
        if any(self.B[a][b] != -self.B[b][a] for a in range(n) for b in range(n)):
            raise DomainError("exchange matrix is not skew-symmetric")

    def index(self, node) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise DomainError(f"unknown node {node}") from None

    def equivalent(self, other: "ClusterSeed") -> bool:
        return (self.nodes == other.nodes and self.B == other.B
                and all(_same(a, b) for a, b in zip(self.variables, other.variables)))

    def to_dict(self) -> dict:
        return {"nodes": [list(n) if isinstance(n, tuple) else n for n in self.nodes],
                "B": [list(r) for r in self.B],
                "vars": {_node_key(n): str(v) for n, v in zip(self.nodes, self.variables)}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _node_key(node) -> str:
    return ",".join(map(str, node)) if isinstance(node, tuple) else str(node)


def exchange_monomials(seed: ClusterSeed, k) -> tuple[dict, dict]:
    """Exponents of the two exchange monomials at k: (b_jk > 0 part, b_jk < 0 part)."""
    c = seed.index(k)
    pos, neg = {}, {}
    for j, row in enumerate(seed.B):
        b = row[c]
        if b > 0:
            pos[j] = b
        elif b < 0:
            neg[j] = -b
    return pos, neg


def mutate(seed: ClusterSeed, k) -> ClusterSeed:
    c = seed.index(k)
    n = len(seed.nodes)
    B = seed.B
    new = [list(r) for r in B]
    for a in range(n):
        for b in range(n):
            if a == c or b == c:
                new[a][b] = -B[a][b]
            else:
                new[a][b] = B[a][b] + (abs(B[a][c]) * B[c][b] + B[a][c] * abs(B[c][b])) // 2
    pos, neg = exchange_monomials(seed, k)
    xs = seed.variables
    plus = sympy.Mul(*[xs[j] ** e for j, e in pos.items()])
    minus = sympy.Mul(*[xs[j] ** e for j, e in neg.items()])
    variables = list(xs)
    variables[c] = sympy.cancel((plus + minus) / xs[c])
    labels = list(seed.labels)
    if labels:
        node, lvl = labels[c]
        labels[c] = (node, lvl + 2)
    return ClusterSeed(seed.nodes, tuple(map(tuple, new)), tuple(variables), tuple(labels))


def qsystem_seed(rs: RootSystem) -> ClusterSeed:
    """Nodes (i, 0), (i, 1) carrying Q_{i,0}, Q_{i,1}; B = [[0, -C], [C, 0]]."""
    _require_simply_laced(rs)
    r = rs.rank
    C = rs.cartan_matrix
    nodes = tuple((i, e) for e in (0, 1) for i in rs.nodes)
    B = [[0] * (2 * r) for _ in range(2 * r)]
    for a in range(r):
        for b in range(r):
            B[a][r + b] = -C[a][b]
            B[r + a][b] = C[a][b]
    variables = tuple(sympy.Symbol(f"Q_{i}_{e}") for i, e in nodes)
    return ClusterSeed(nodes, tuple(map(tuple, B)), variables, nodes)


def exchange_at(rs: RootSystem, i: int, level: int) -> tuple[ClusterSeed, object, dict, dict]:
    """Mutate the Q-system seed in alternating rounds up to the exchange producing (i, level+1).

    Returns (seed before the last mutation, mutated node, labels of the two monomials).
    """
    if level < 1:
        raise DomainError(f"need level >= 1, got {level}")
    seed = qsystem_seed(rs)
    for rnd in range(level - 1):
        for j in rs.nodes:
            seed = mutate(seed, (j, rnd % 2))
    k = (i, (level - 1) % 2)
    if seed.labels[seed.index(k)] != (i, level - 1):
        raise DomainError("unexpected seed bookkeeping")
    pos, neg = exchange_monomials(seed, k)
    lab = seed.labels
    return seed, k, {lab[j]: e for j, e in pos.items()}, {lab[j]: e for j, e in neg.items()}


# Twists by fourth roots of unity: x_{j,m} = eps_j * ch(P_{j,m}) with
# eps_j = sqrt(-1) ** <2 rho, omega_j^vee>.  Values are dicts exponent mod 4 -> character.

def twist_exponents(rs: RootSystem, enabled: bool = True) -> dict[int, int]:
    if not enabled:
        return {j: 0 for j in rs.nodes}
    out = {}
    for j in rs.nodes:
        e = 2 * rs.pair(rs.rho, _unit(rs, j))
        if Fraction(e).denominator != 1:
            raise DomainError("non-integral twist exponent")
        out[j] = int(e) % 4
    return out


def _gauss(values: dict[int, GradedCharacter]) -> tuple[GradedCharacter, GradedCharacter]:
    zero = GradedCharacter({})
    re = values.get(0, zero) - values.get(2, zero)
    im = values.get(1, zero) - values.get(3, zero)
    return re, im


def _evaluate(monomial: dict, chars: dict, eps: dict, rs: RootSystem) -> dict:
    value = GradedCharacter({(rs.zero, 0): 1})
    e = 0
    for (j, m), power in monomial.items():
        for _ in range(power):
            value = value * chars[(j, m)]
        e += eps[j] * power
    return {e % 4: value}


def _add(x: dict, y: dict) -> dict:
    out = dict(x)
    for e, v in y.items():
        out[e] = out[e] + v if e in out else v
    return out


def qsystem_exchange_match(rs: RootSystem, i: int, level: int, D_max=None, twist: bool = True,
                           check: dict | None = None) -> bool:
    """Exchange binomial at (i, level) against the certified character identity.

    The exchange x_{i,l+1} x_{i,l-1} = P_+ + P_- is evaluated at x_{j,m} = eps_j ch P_{j,m}
    (ungraded); it must hold exactly and the graded identity must pass qsystem_check.
    ``twist=False`` sets every eps_j = 1 (negative control).
    """
    _require_simply_laced(rs)
    check = check or qsystem_check(rs, i, level, D_max, engine="character")
    if not check["pass"]:
        return False
    _, _, pos, neg = exchange_at(rs, i, level)
    eps = twist_exponents(rs, twist)
    wanted = {(j, m) for mono in (pos, neg) for (j, m) in mono} | {(i, level + 1), (i, level - 1)}
    chars = {key: specialize_q(kclass(rs, key[0], key[1], D_max).require_character())
             for key in wanted}
    lhs = _evaluate({(i, level + 1): 1, (i, level - 1): 1}, chars, eps, rs)
    rhs = _add(_evaluate(pos, chars, eps, rs), _evaluate(neg, chars, eps, rs))
    return _gauss(lhs) == _gauss(rhs)
