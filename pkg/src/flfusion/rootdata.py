"""Root data, Weyl groups and the extended affine Weyl group.

Conventions used throughout the package:

* ``cartan[i][j] = <alpha_i^vee, alpha_j>``.
* Weights are integer tuples in the fundamental weight basis, coweights are
  integer tuples in the fundamental coweight basis.  Roots are usually kept
  in simple-root coordinates.
* Node labels are 1..r for the finite Dynkin nodes and 0 for the affine node.
* Affine weights are written ``l*Lambda_0 + lam - d*delta``; ``d`` is stored
  as ``AffineWeight.delta``.
* ``tau(mu) * v`` acts on affine weights of level ``l`` by
  ``l*Lambda_0 + v(lam) + l*iota(mu) - (d + <v(lam), mu> + l*(mu, mu)/2) delta``
  and the affine reflection is ``s_0 = tau(theta^vee) * s_theta``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import DomainError, InconsistencyError

Weight = tuple[int, ...]
Coweight = tuple[int, ...]
Word = tuple[int, ...]


def _chain(n: int) -> list[list[int]]:
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
        if i + 1 < n:
            c[i][i + 1] = c[i + 1][i] = -1
    return c


def cartan_matrix(letter: str, rank: int) -> list[list[int]]:
    """Cartan matrix in Bourbaki numbering, rows indexed by coroots."""
    letter = letter.upper()
    n = rank
    if letter == "A" and n >= 1:
        return _chain(n)
    if letter == "B" and n >= 2:
        c = _chain(n)
        c[n - 1][n - 2] = -2
        return c
    if letter == "C" and n >= 2:
        c = _chain(n)
        c[n - 2][n - 1] = -2
        return c
    if letter == "D" and n >= 4:
        c = _chain(n - 1) + [[0] * n]
        for row in c[: n - 1]:
            row.append(0)
        c[n - 1][n - 1] = 2
        c[n - 2][n - 3] = c[n - 3][n - 2] = -1
        c[n - 1][n - 3] = c[n - 3][n - 1] = -1
        c[n - 2][n - 1] = c[n - 1][n - 2] = 0
        return c
    if letter == "E" and n in (6, 7, 8):
        c = [[0] * n for _ in range(n)]
        edges = [(1, 3), (3, 4), (4, 2)] + [(k, k + 1) for k in range(4, n)]
        for i in range(n):
            c[i][i] = 2
        for a, b in edges:
            c[a - 1][b - 1] = c[b - 1][a - 1] = -1
        return c
    if letter == "F" and n == 4:
        c = _chain(4)
        c[2][1] = -2
        return c
    if letter == "G" and n == 2:
        return [[2, -3], [-1, 2]]
    raise DomainError(f"no Dynkin datum of type {letter}{rank}")


def _invert(matrix: list[list[int]]) -> list[list[Fraction]]:
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class RootSystem:
    """A finite root system given by its Dynkin datum."""

    dynkin_type: str
    rank: int

    def __post_init__(self):
        cartan_matrix(self.dynkin_type, self.rank)

    def __repr__(self):
        return f"RootSystem({self.dynkin_type}{self.rank})"

    @property
    def label(self) -> str:
        return f"{self.dynkin_type}{self.rank}"

    @cached_property
    def cartan_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(row) for row in cartan_matrix(self.dynkin_type, self.rank))

    @cached_property
    def cartan_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(row) for row in _invert([list(r) for r in self.cartan_matrix]))

    @cached_property
    def symmetrizer(self) -> tuple[Fraction, ...]:
        """Half squared lengths (alpha_i, alpha_i)/2, long roots normalized to 1."""
        c = self.cartan_matrix
        d: dict[int, Fraction] = {0: Fraction(1)}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(self.rank):
                if j not in d and c[i][j] != 0:
                    d[j] = d[i] * c[i][j] / c[j][i]
                    stack.append(j)
        top = max(d.values())
        return tuple(d[i] / top for i in range(self.rank))

    @property
    def simply_laced(self) -> bool:
        return self.dynkin_type in ("A", "D", "E")

    @property
    def nodes(self) -> range:
        return range(1, self.rank + 1)

    @property
    def zero(self) -> Weight:
        return (0,) * self.rank

    @property
    def rho(self) -> Weight:
        return (1,) * self.rank

    @property
    def rho_vee(self) -> Coweight:
        return (1,) * self.rank

    def fundamental_weight(self, i: int) -> Weight:
        return tuple(int(k == i - 1) for k in range(self.rank))

    fundamental_coweight = fundamental_weight

    def simple_root(self, i: int) -> Weight:
        """alpha_i in the fundamental weight basis (column i of C)."""
        return tuple(row[i - 1] for row in self.cartan_matrix)

    def simple_coroot(self, i: int) -> Coweight:
        """alpha_i^vee in the fundamental coweight basis (row i of C)."""
        return self.cartan_matrix[i - 1]

    # roots in simple-root coordinates

    @cached_property
    def positive_roots(self) -> tuple[tuple[int, ...], ...]:
        c = self.cartan_matrix
        r = self.rank
        simple = [tuple(int(k == i) for k in range(r)) for i in range(r)]
        found = set(simple)
        layer = list(simple)
        out = list(simple)
        while layer:
            nxt = []
            for beta in layer:
                for i in range(r):
                    p = 0
                    probe = list(beta)
                    while True:
                        probe[i] -= 1
                        if tuple(probe) in found:
                            p += 1
                        else:
                            break
                    pair = sum(beta[j] * c[i][j] for j in range(r))
                    if p - pair > 0:
                        gamma = tuple(beta[k] + (k == i) for k in range(r))
                        if gamma not in found:
                            found.add(gamma)
                            nxt.append(gamma)
            nxt.sort(key=lambda b: (sum(b), b))
            out.extend(nxt)
            layer = nxt
        return tuple(out)

    def root_to_weight(self, b) -> Weight:
        c = self.cartan_matrix
        return tuple(sum(b[j] * c[i][j] for j in range(self.rank)) for i in range(self.rank))

    def root_half_norm(self, b) -> Fraction:
        """(beta, beta)/2 for a root given in simple-root coordinates."""
        c, d = self.cartan_matrix, self.symmetrizer
        r = self.rank
        return sum((b[j] * b[k] * d[j] * c[j][k] for j in range(r) for k in range(r)),
                   Fraction(0)) / 2

    def coroot_coefficients(self, b) -> tuple[Fraction, ...]:
        """beta^vee in simple-coroot coordinates."""
        n = self.root_half_norm(b)
        return tuple(b[j] * self.symmetrizer[j] / n for j in range(self.rank))

    @cached_property
    def highest_root(self) -> tuple[int, ...]:
        """theta in simple-root coordinates."""
        return max(self.positive_roots, key=sum)

    @cached_property
    def theta(self) -> Weight:
        return self.root_to_weight(self.highest_root)

    @cached_property
    def theta_coroot_coefficients(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.coroot_coefficients(self.highest_root))

    @cached_property
    def theta_vee(self) -> Coweight:
        """theta^vee in the fundamental coweight basis."""
        cc = self.theta_coroot_coefficients
        c = self.cartan_matrix
        return tuple(sum(cc[i] * c[i][j] for i in range(self.rank)) for j in range(self.rank))

    def pair_theta_vee(self, lam: Weight) -> int:
        return sum(a * b for a, b in zip(self.theta_coroot_coefficients, lam))

    # pairings and the embedding iota

    def pair(self, lam: Weight, mu: Coweight) -> Fraction:
        """<lam, mu> for a weight and a coweight."""
        ci = self.cartan_inverse
        r = self.rank
        return sum((lam[i] * mu[j] * ci[j][i] for i in range(r) for j in range(r) if lam[i] and mu[j]),
                   Fraction(0))

    def root_pair(self, b, mu: Coweight) -> int:
        """<beta, mu> for a root in simple-root coordinates."""
        return sum(x * y for x, y in zip(b, mu))

    @cached_property
    def _iota_columns(self) -> tuple[Weight, ...]:
        r = self.rank
        c, ci, d = self.cartan_matrix, self.cartan_inverse, self.symmetrizer
        cols = []
        for j in range(r):
            col = [sum(ci[j][k] * c[i][k] / d[k] for k in range(r)) for i in range(r)]
            if any(x.denominator != 1 for x in col):
                raise InconsistencyError(f"iota of a fundamental coweight is not integral in {self}")
            cols.append(tuple(int(x) for x in col))
        return tuple(cols)

    def embed(self, mu: Coweight) -> Weight:
        """iota(mu): coweights to weights via the normalized invariant form."""
        cols = self._iota_columns
        return tuple(sum(mu[j] * cols[j][i] for j in range(self.rank)) for i in range(self.rank))

    def coweight_form(self, mu: Coweight, nu: Coweight) -> Fraction:
        """(mu, nu) normalized so that short coroots have norm 2."""
        return self.pair(self.embed(mu), nu)

    @cached_property
    def weight_gram(self) -> tuple[tuple[Fraction, ...], ...]:
        """(omega_i, omega_k) with long roots of norm 2."""
        ci, d = self.cartan_inverse, self.symmetrizer
        r = self.rank
        return tuple(tuple(ci[k][i] * d[k] for k in range(r)) for i in range(r))

    def weight_form(self, lam: Weight, mu: Weight) -> Fraction:
        g = self.weight_gram
        r = self.rank
        return sum((lam[i] * mu[k] * g[i][k] for i in range(r) for k in range(r) if lam[i] and mu[k]),
                   Fraction(0))

    def root_coordinates(self, lam: Weight) -> tuple[Fraction, ...]:
        """Coefficients of lam in the basis of simple roots."""
        ci = self.cartan_inverse
        r = self.rank
        return tuple(sum(ci[j][i] * lam[i] for i in range(r)) for j in range(r))

    def height(self, lam: Weight) -> Fraction:
        return sum(self.root_coordinates(lam), Fraction(0))

    # finite Weyl group

    def reflect(self, lam: Weight, i: int) -> Weight:
        a = lam[i - 1]
        if a == 0:
            return tuple(lam)
        col = self.simple_root(i)
        return tuple(x - a * y for x, y in zip(lam, col))

    def reflect_coweight(self, mu: Coweight, i: int) -> Coweight:
        a = mu[i - 1]
        if a == 0:
            return tuple(mu)
        row = self.simple_coroot(i)
        return tuple(x - a * y for x, y in zip(mu, row))

    def act(self, word: Word, lam: Weight) -> Weight:
        for i in reversed(word):
            lam = self.reflect(lam, i)
        return tuple(lam)

    def act_coweight(self, word: Word, mu: Coweight) -> Coweight:
        for i in reversed(word):
            mu = self.reflect_coweight(mu, i)
        return tuple(mu)

    def word_from_rho_image(self, image: Weight) -> Word:
        """Canonical reduced word of the element v with v(rho) = image."""
        word = []
        x = tuple(image)
        while True:
            i = next((k + 1 for k, a in enumerate(x) if a < 0), None)
            if i is None:
                return tuple(word)
            word.append(i)
            x = self.reflect(x, i)

    def canonical_word(self, word: Word) -> Word:
        return self.word_from_rho_image(self.act(word, self.rho))

    def weyl_multiply(self, u: Word, v: Word) -> Word:
        return self.word_from_rho_image(self.act(u, self.act(v, self.rho)))

    def weyl_inverse(self, v: Word) -> Word:
        return self.canonical_word(tuple(reversed(v)))

    @cached_property
    def longest_word(self) -> Word:
        return self.word_from_rho_image(tuple(-x for x in self.rho))

    @cached_property
    def theta_reflection(self) -> Word:
        n = self.pair_theta_vee(self.rho)
        image = tuple(a - n * t for a, t in zip(self.rho, self.theta))
        return self.word_from_rho_image(image)

    def dominant_conjugate(self, lam: Weight) -> tuple[Weight, Word]:
        """(dominant lam', word w) with w(lam') = lam."""
        word = []
        x = tuple(lam)
        while True:
            i = next((k + 1 for k, a in enumerate(x) if a < 0), None)
            if i is None:
                return x, tuple(word)
            word.append(i)
            x = self.reflect(x, i)

    def antidominant_conjugate(self, lam: Weight) -> Weight:
        x = tuple(lam)
        while True:
            i = next((k + 1 for k, a in enumerate(x) if a > 0), None)
            if i is None:
                return x
            x = self.reflect(x, i)

    def w0(self, lam: Weight) -> Weight:
        return self.act(self.longest_word, lam)

    def w0_coweight(self, mu: Coweight) -> Coweight:
        return self.act_coweight(self.longest_word, mu)

    def orbit(self, lam: Weight) -> list[Weight]:
        """Weyl orbit of a weight, sorted."""
        start = self.dominant_conjugate(lam)[0]
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for i in self.nodes:
                if x[i - 1] > 0:
                    y = self.reflect(x, i)
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        return sorted(seen)

    def is_dominant(self, lam) -> bool:
        return all(a >= 0 for a in lam)

    def dominance_leq(self, lam: Weight, mu: Weight) -> bool:
        """True iff mu - lam is a nonnegative integer combination of simple roots."""
        diff = tuple(b - a for a, b in zip(lam, mu))
        coords = self.root_coordinates(diff)
        return all(x.denominator == 1 and x >= 0 for x in coords)

    def weyl_dimension(self, lam: Weight) -> int:
        num = Fraction(1)
        for b in self.positive_roots:
            cc = self.coroot_coefficients(b)
            top = sum(x * (a + 1) for x, a in zip(cc, lam))
            bot = sum(cc)
            num *= top / bot
        return int(num)

    # affine weights

    def affine_pairing(self, big: "AffineWeight", i: int) -> int:
        """<Lambda, alpha_i^vee> for affine node i."""
        if i == 0:
            return big.level - self.pair_theta_vee(big.finite)
        return big.finite[i - 1]

    def affine_reflect(self, big: "AffineWeight", i: int) -> "AffineWeight":
        n = self.affine_pairing(big, i)
        if n == 0:
            return big
        if i == 0:
            fin = tuple(a + n * t for a, t in zip(big.finite, self.theta))
            return AffineWeight(big.level, fin, big.delta + n)
        return AffineWeight(big.level, self.reflect(big.finite, i), big.delta)

    def affine_dominant(self, big: "AffineWeight") -> bool:
        return self.is_dominant(big.finite) and self.pair_theta_vee(big.finite) <= big.level


_DYNKIN = re.compile(r"^\s*([A-Ga-g])\s*(\d+)\s*$")


@lru_cache(maxsize=None)
def build_root_system(dynkin_type: str, rank: int | None = None) -> RootSystem:
    """Build (and cache) a root system from ("A", 2) or from a label such as "D4"."""
    if rank is None:
        m = _DYNKIN.match(dynkin_type)
        if not m:
            raise DomainError(f"cannot parse Dynkin label {dynkin_type!r}")
        dynkin_type, rank = m.group(1), int(m.group(2))
    if not isinstance(rank, int) or rank < 1:
        raise DomainError(f"no Dynkin datum of type {dynkin_type}{rank}")
    return RootSystem(dynkin_type.upper(), rank)


def dominance_leq(lam: Weight, mu: Weight, rs: RootSystem) -> bool:
    return rs.dominance_leq(lam, mu)


def coweight_embed(mu: Coweight, rs: RootSystem) -> Weight:
    return rs.embed(mu)


@dataclass(frozen=True, order=True)
class AffineWeight:
    """l*Lambda_0 + finite - delta_coefficient*delta."""

    level: int
    finite: Weight
    delta: Fraction = Fraction(0)

    def __str__(self):
        parts = [f"{self.level}L0"] if self.level else []
        parts += [f"{a}w{i + 1}" for i, a in enumerate(self.finite) if a]
        if self.delta:
            parts.append(f"-({self.delta})d")
        return "+".join(parts) or "0"


@dataclass(frozen=True, order=True)
class ExtAffineWeylElement:
    """tau(translation) * v with v given by its canonical reduced word."""

    translation: Coweight
    finite_part: Word = ()

    def __str__(self):
        t = ",".join(str(x) for x in self.translation)
        w = "".join(f"s{i}" for i in self.finite_part) or "1"
        return f"t({t}){w}"


def element(rs: RootSystem, translation: Coweight | None = None, word: Word = ()) -> ExtAffineWeylElement:
    mu = tuple(translation) if translation is not None else rs.zero
    return ExtAffineWeylElement(mu, rs.canonical_word(tuple(word)))


def identity(rs: RootSystem) -> ExtAffineWeylElement:
    return ExtAffineWeylElement(rs.zero, ())


def translation(mu: Coweight, rs: RootSystem) -> ExtAffineWeylElement:
    return ExtAffineWeylElement(tuple(mu), ())


def simple_reflection(i: int, rs: RootSystem) -> ExtAffineWeylElement:
    if i == 0:
        return ExtAffineWeylElement(rs.theta_vee, rs.theta_reflection)
    return ExtAffineWeylElement(rs.zero, (i,))


def compose(w1: ExtAffineWeylElement, w2: ExtAffineWeylElement, rs: RootSystem) -> ExtAffineWeylElement:
    """(tau_mu v)(tau_nu u) = tau_{mu + v nu} (vu)."""
    moved = rs.act_coweight(w1.finite_part, w2.translation)
    mu = tuple(a + b for a, b in zip(w1.translation, moved))
    return ExtAffineWeylElement(mu, rs.weyl_multiply(w1.finite_part, w2.finite_part))


def inverse(w: ExtAffineWeylElement, rs: RootSystem) -> ExtAffineWeylElement:
    vinv = rs.weyl_inverse(w.finite_part)
    mu = rs.act_coweight(vinv, w.translation)
    return ExtAffineWeylElement(tuple(-x for x in mu), vinv)


def from_word(word, rs: RootSystem, omega: ExtAffineWeylElement | None = None) -> ExtAffineWeylElement:
    """Fold a word of affine reflections, optionally followed by a length-zero element."""
    out = identity(rs)
    for i in word:
        out = compose(out, simple_reflection(i, rs), rs)
    if omega is not None:
        out = compose(out, omega, rs)
    return out


def affine_length(w: ExtAffineWeylElement, rs: RootSystem) -> int:
    """Alcove count: sum over positive roots of |<mu, alpha> - [v^{-1} alpha < 0]|."""
    mu, v = w.translation, w.finite_part
    image = rs.act_coweight(v, rs.rho_vee)
    total = 0
    for b in rs.positive_roots:
        neg = 1 if rs.root_pair(b, image) < 0 else 0
        total += abs(rs.root_pair(b, mu) - neg)
    return total


def act(w: ExtAffineWeylElement, big: AffineWeight, rs: RootSystem) -> AffineWeight:
    mu = w.translation
    lam = rs.act(w.finite_part, big.finite)
    shift = rs.embed(mu)
    fin = tuple(a + big.level * b for a, b in zip(lam, shift))
    d = big.delta + rs.pair(lam, mu) + Fraction(big.level) * rs.coweight_form(mu, mu) / 2
    return AffineWeight(big.level, fin, d)


@lru_cache(maxsize=None)
def omega_elements(rs: RootSystem) -> tuple[ExtAffineWeylElement, ...]:
    """Length-zero elements: the identity and one per minuscule fundamental coweight."""
    out = [identity(rs)]
    for j in rs.nodes:
        if rs.highest_root[j - 1] == 1:
            _, pi = _peel(translation(rs.fundamental_coweight(j), rs), rs)
            out.append(pi)
    return tuple(out)


@lru_cache(maxsize=None)
def omega_permutation(pi: ExtAffineWeylElement, rs: RootSystem) -> tuple[int, ...]:
    """perm[j] = k with pi s_j pi^{-1} = s_k, over affine nodes 0..r."""
    pinv = inverse(pi, rs)
    refl = [simple_reflection(i, rs) for i in range(rs.rank + 1)]
    perm = []
    for j in range(rs.rank + 1):
        conj = compose(compose(pi, refl[j], rs), pinv, rs)
        perm.append(refl.index(conj))
    return tuple(perm)


def _peel(w: ExtAffineWeylElement, rs: RootSystem) -> tuple[list[int], ExtAffineWeylElement]:
    """Peel smallest right descents; returns (peeled nodes in order, remainder)."""
    peeled = []
    cur = w
    n = affine_length(cur, rs)
    refl = [simple_reflection(i, rs) for i in range(rs.rank + 1)]
    while n > 0:
        for i in range(rs.rank + 1):
            cand = compose(cur, refl[i], rs)
            m = affine_length(cand, rs)
            if m < n:
                peeled.append(i)
                cur, n = cand, m
                break
        else:
            raise InconsistencyError(f"no right descent found for {cur}")
    return peeled, cur


@lru_cache(maxsize=None)
def reduced_word(w: ExtAffineWeylElement, rs: RootSystem) -> tuple[Word, ExtAffineWeylElement]:
    """(word, pi) with w = s_{word[0]} ... s_{word[-1]} * pi and pi of length zero."""
    peeled, pi = _peel(w, rs)
    perm = omega_permutation(pi, rs)
    word = tuple(perm[i] for i in reversed(peeled))
    return word, pi


def demazure_params(level: int, mu: Weight, rs: RootSystem) -> tuple[ExtAffineWeylElement, AffineWeight]:
    """(w, Lambda) with Lambda dominant of the given level and w Lambda = l Lambda_0 + w0 mu.

    Found by straightening the target into the dominant chamber with affine
    simple reflections, then choosing among the length-zero translates the one
    with the smallest dominant weight.
    """
    mu = tuple(mu)
    if level < 0 or not rs.is_dominant(mu):
        raise DomainError(f"need level >= 0 and dominant weight, got ({level}, {mu})")
    if level == 0:
        if any(mu):
            raise DomainError("level 0 admits only the zero weight")
        return identity(rs), AffineWeight(0, rs.zero)
    target = AffineWeight(level, rs.w0(mu))
    cur = target
    word = []
    while True:
        i = next((k for k in range(rs.rank + 1) if rs.affine_pairing(cur, k) < 0), None)
        if i is None:
            break
        cur = rs.affine_reflect(cur, i)
        word.append(i)
    w = from_word(word, rs)
    lam = AffineWeight(level, cur.finite)
    best = None
    for idx, pi in enumerate(omega_elements(rs)):
        cand_w = compose(w, pi, rs)
        moved = act(inverse(pi, rs), lam, rs)
        cand_l = AffineWeight(level, moved.finite)
        if not rs.is_dominant(tuple(-x for x in cand_w.translation)):
            continue
        key = (affine_length(cand_w, rs), sum(cand_l.finite), cand_l.finite, idx)
        if best is None or key < best[0]:
            best = (key, cand_w, cand_l)
    if best is None:
        raise InconsistencyError(f"no antidominant-translation solution for ({level}, {mu})")
    _, w, lam = best
    check = act(w, lam, rs)
    if check.finite != target.finite or not rs.affine_dominant(lam):
        raise InconsistencyError(f"demazure_params failed for ({level}, {mu})")
    return w, lam
