"""Incremental exact echelon bases for sparse vectors.

Vectors are dicts mapping hashable, mutually comparable labels to numbers.
Stored rows are primitive integer vectors; each row has a distinct leading
(smallest) label and only larger labels elsewhere, which is all membership
testing needs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import InconsistencyError


def primitive(vec: dict) -> dict:
    """Scale a rational vector to a primitive integer vector with positive leading entry."""
    if not vec:
        return {}
    den = 1
    for v in vec.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    out = {k: int(v * den) for k, v in vec.items() if v}
    g = gcd(*out.values())
    if out[min(out)] < 0:
        g = -g
    if g != 1:
        out = {k: v // g for k, v in out.items()}
    return out


class Echelon:
    """Growing basis of a subspace, kept in semi-echelon form."""

    __slots__ = ("rows", "order", "tags")

    def __init__(self):
        self.rows: dict = {}
        self.order: list = []
        self.tags: dict = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Primitive integer remainder of vec modulo the span (empty if inside)."""
        w = primitive(vec)
        rows = self.rows
        while w:
            p = min(w)
            r = rows.get(p)
            if r is None:
                return w if w[p] > 0 else {k: -v for k, v in w.items()}
            a, b = r[p], w[p]
            if a != 1:
                w = {k: a * v for k, v in w.items()}
            for k, v in r.items():
                x = w.get(k, 0) - b * v
                if x:
                    w[k] = x
                else:
                    w.pop(k, None)
            if w:
                g = gcd(*w.values())
                if g > 1:
                    w = {k: v // g for k, v in w.items()}
        return w

    def add(self, vec: dict, tag=None):
        """Insert vec if independent; returns the stored row or None."""
        w = self.reduce(vec)
        if not w:
            return None
        p = min(w)
        self.rows[p] = w
        self.order.append(p)
        self.tags[p] = tag
        return w

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: dict) -> dict:
        """Coefficients c with vec = sum c[p] * rows[p]; raises if vec is outside."""
        w = {k: Fraction(v) for k, v in vec.items() if v}
        rows = self.rows
        out = {}
        while w:
            p = min(w)
            r = rows.get(p)
            if r is None:
                raise InconsistencyError("vector is not in the span")
            c = w[p] / r[p]
            out[p] = out.get(p, 0) + c
            for k, v in r.items():
                x = w.get(k, 0) - c * v
                if x:
                    w[k] = x
                else:
                    w.pop(k, None)
        return out


_LIMIT = 1 << 62
_FLOAT_EXACT = float(1 << 52)     # integer matmul in float64 is exact below this
_SMALL = 1 << 24


def _bound(a) -> int:
    return int(np.abs(a).max()) if a.size else 0


def _as_object(a):
    return a if a.dtype == object else a.astype(object)


def _shrink(a):
    """Back to int64 once the entries are small again."""
    if a.dtype == object and _bound(a) < (1 << 40):
        return a.astype(np.int64)
    return a


def _primitive_rows(W):
    if W.dtype == object:
        for r in range(W.shape[0]):
            g = gcd(*W[r])
            if g > 1:
                W[r] //= g
        return _shrink(W)
    g = np.gcd.reduce(W, axis=1)
    g[g == 0] = 1
    return W // g[:, None]


def _combine(X, Y, a, b):
    """a * X - b[:, None] * Y  (Y a single row) computed exactly."""
    if X.dtype != object and Y.dtype != object:
        if (_bound(X) * abs(int(a)) + _bound(b) * _bound(Y)) < _LIMIT:
            return X * a - b[:, None] * Y[None, :]
    X, Y, b = _as_object(X), _as_object(Y), _as_object(b)
    return X * int(a) - b[:, None] * Y[None, :]


def exact_matmul(A, B):
    """A @ B for integer arrays, exact: float64 or int64 when the bound allows."""
    if A.dtype != object and B.dtype != object and A.size and B.size:
        est = float(_bound(A)) * float(_bound(B)) * A.shape[1]
        if est < _FLOAT_EXACT:
            return np.rint(A.astype(float) @ B.astype(float)).astype(np.int64)
        if est < float(_LIMIT):
            return A @ B
    return _as_object(A).dot(_as_object(B))


def exact_sub(A, B):
    """A - B for integer arrays without int64 overflow."""
    if A.dtype != object and B.dtype != object and _bound(A) + _bound(B) < _LIMIT:
        return A - B
    return _as_object(A) - _as_object(B)


def int_matrix(rows, index, width):
    """Dense integer matrix from dict rows keyed through index."""
    big = any(abs(v) >= _LIMIT for r in rows for v in r.values())
    out = np.zeros((len(rows), width), dtype=object if big else np.int64)
    for i, r in enumerate(rows):
        for k, v in r.items():
            out[i, index[k]] = v
    return out


class DenseSpace:
    """Exact basis of a subspace of one weight space, kept in reduced echelon form.

    Columns are the sorted ambient labels.  Stored rows are primitive integer
    vectors, each vanishing at every other row's pivot, so reducing a batch of
    candidates is one matrix product.  Arithmetic is int64 when the entries
    provably stay below 2**62 and Python integers otherwise.
    """

    def __init__(self, labels):
        self.labels = list(labels)
        self.index = {k: j for j, k in enumerate(self.labels)}
        self.m = len(self.labels)
        self.pivots: list[int] = []
        self.mat = np.zeros((0, self.m), dtype=np.int64)
        self.rows: dict = {}                 # lead label -> row as inserted (dict)
        self.tags: dict = {}
        self.order: list = []
        self._echelon = None

    def __len__(self):
        return len(self.pivots)

    def _dense(self, vecs):
        rows = [primitive(v) for v in vecs]
        big = any(abs(x) >= 1 << 40 for r in rows for x in r.values())
        W = np.zeros((len(rows), self.m), dtype=object if big else np.int64)
        for r, vec in enumerate(rows):
            for k, v in vec.items():
                W[r, self.index[k]] = v
        return W

    def _reduce(self, W):
        """Clear the pivot columns of W against the stored rows."""
        if not self.pivots:
            return W
        B = self.mat
        P = np.array(self.pivots)
        A = W[:, P]
        if not A.any():
            return W
        a = [int(B[j, p]) for j, p in enumerate(self.pivots)]
        if not all(a):
            raise InconsistencyError("zero pivot in a reduced basis")
        L = lcm(*a)
        scale = [L // x for x in a]
        if W.dtype != object and _bound(A) * max(scale) < _LIMIT:
            C = A * np.array(scale, dtype=np.int64)[None, :]
        else:
            C = _as_object(A) * np.array(scale, dtype=object)[None, :]
        if W.dtype != object and B.dtype != object and C.dtype != object:
            # per-row bound on |C @ B| from row maxima of B, with a float safety margin
            est = np.abs(C).astype(float) @ np.abs(B).max(axis=1).astype(float)
            est += np.abs(W).max(axis=1).astype(float) * L
            if est.max() < _FLOAT_EXACT:
                prod = np.rint(C.astype(float) @ B.astype(float)).astype(np.int64)
                return W * L - prod
            ok = est < float(1 << 60)
            if ok.all():
                return W * L - C @ B
            out = np.empty(W.shape, dtype=object)
            out[ok] = W[ok] * L - C[ok] @ B
            bad = ~ok
            out[bad] = _as_object(W[bad]) * L - _as_object(C[bad]).dot(_as_object(B))
            return out
        W, B, C = _as_object(W), _as_object(B), _as_object(C)
        return W * L - C.dot(B)

    def add_batch(self, vecs, tag=None) -> list[dict]:
        """Insert the independent part of vecs; returns the new rows as dicts."""
        if not vecs:
            return []
        W = self._dense(vecs)
        W = self._reduce(W)
        W = _primitive_rows(W[np.any(W != 0, axis=1)])
        if W.dtype == object:
            W = W.copy()
        out = []
        while W.shape[0] and len(self.pivots) < self.m:
            cols = np.flatnonzero(np.any(W != 0, axis=0))
            if not len(cols):
                break
            col = int(cols[0])
            hit = np.flatnonzero(W[:, col])
            pick = int(hit[np.argmin([abs(int(W[h, col])) for h in hit])])
            row = W[pick].copy()
            if row[col] < 0:
                row = -row
            W = np.delete(W, pick, axis=0)
            hit = np.flatnonzero(W[:, col])
            if len(hit):
                sub = _combine(W[hit], row, row[col], W[hit, col])
                if sub.dtype == object and W.dtype != object:
                    W = W.astype(object)
                if sub.dtype == object or _bound(sub) > _SMALL:
                    sub = _primitive_rows(sub)
                W[hit] = sub
                W = W[np.any(W != 0, axis=1)]
            self._append(_shrink(row), col, tag, out)
        if out:
            self._echelon = None
        return out

    def _append(self, row, col, tag, out):
        B = self.mat
        hit = np.flatnonzero(B[:, col]) if B.shape[0] else np.array([], dtype=int)
        if len(hit):
            sub = _primitive_rows(_combine(B[hit], row, row[col], B[hit, col]))
            if sub.dtype == object and B.dtype != object:
                B = B.astype(object)
            B[hit] = sub
        if row.dtype == object and B.dtype != object:
            B = B.astype(object)
        self.mat = _shrink(np.vstack([B, row[None, :].astype(B.dtype)]))
        self.pivots.append(col)
        d = {self.labels[j]: int(row[j]) for j in np.flatnonzero(row)}
        lead = self.labels[col]
        self.rows[lead] = d
        self.tags[lead] = tag
        self.order.append(lead)
        out.append(d)

    def reduced_rows(self, tag) -> list[tuple]:
        """(pivot label, pivot value, row) for the current reduced rows inserted under tag.

        Taken right after the tag's insertions these span a complement of the
        earlier rows, and a vector of the span has coefficient x[p] / value on
        the row with pivot p.
        """
        out = []
        for j, lead in enumerate(self.order):
            if self.tags[lead] == tag:
                row = self.mat[j]
                out.append((lead, int(row[self.pivots[j]]),
                            {self.labels[k]: int(row[k]) for k in np.flatnonzero(row)}))
        return out

    def frame(self) -> tuple:
        """Snapshot of the span: pivot columns, pivot values, and the rows on the
        non-pivot columns (enough to reduce any later pivot column)."""
        piv = np.array(self.pivots, dtype=int)
        free = np.setdiff1d(np.arange(self.m), piv)
        vals = self.mat[np.arange(len(piv)), piv] if len(piv) else np.zeros(0, dtype=np.int64)
        return piv, vals.copy(), free, self.mat[:, free].copy()

    def echelon(self) -> Echelon:
        if self._echelon is None:
            e = Echelon()
            for lead in self.order:
                e.rows[lead] = self.rows[lead]
                e.order.append(lead)
                e.tags[lead] = self.tags[lead]
            self._echelon = e
        return self._echelon

    def coordinates(self, vec: dict) -> dict:
        return self.echelon().coordinates(vec)

    def contains(self, vec: dict) -> bool:
        return self.echelon().contains(vec)
