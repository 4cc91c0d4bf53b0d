"""Exact rank and Waring rank over GF(q) by normalized exhaustive search.

Field elements are handled as indices 0..q-1 with numpy addition and
subtraction tables.  A rank-one tensor becomes an index vector of length N
and is hashed to a base-q integer key, so the last term of every candidate
sum is found by a sorted-key lookup instead of another loop.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, InvalidField, NotWaringDecomposable
from .tensor_core import (
    Decomposition,
    DenseTensor,
    Shape,
    SymTensor,
    eval_decomposition,
    exponent_vectors,
    rank_bounds,
    sym_expand,
)


@dataclass
class SearchBudget:
    """Caps on candidate tuples examined and on wall-clock seconds."""

    max_candidates: int | None = None
    max_seconds: float | None = None

    def start(self) -> "_Meter":
        return _Meter(self)


class _Meter:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.count = 0
        self.t0 = time.monotonic()

    def charge(self, n: int):
        self.count += n
        b = self.budget
        if b.max_candidates is not None and self.count > b.max_candidates:
            raise BudgetExceeded(f"more than {b.max_candidates} candidates needed")
        if b.max_seconds is not None and time.monotonic() - self.t0 > b.max_seconds:
            raise BudgetExceeded(f"time allowance of {b.max_seconds}s exhausted")


UNLIMITED = SearchBudget()


class _Tables:
    def __init__(self, field):
        if not field.is_finite:
            raise InvalidField("exhaustive search needs a finite field")
        self.field = field
        q = self.q = field.order
        els = field.elements
        self.add = np.array([[field.index(a + b) for b in els] for a in els], dtype=np.int64)
        self.sub = np.array([[field.index(a - b) for b in els] for a in els], dtype=np.int64)
        self.mul = np.array([[field.index(a * b) for b in els] for a in els], dtype=np.int64)
        self.nonzero = list(range(1, q))

    def idx(self, values):
        return np.array([self.field.index(self.field.coerce(v)) for v in values], dtype=np.int64)


def _vectors(q: int, n: int, normalized: bool):
    """Nonzero index vectors of length n; normalized ones lead with a 1."""
    for v in itertools.product(range(q), repeat=n):
        nz = next((a for a in v if a), 0)
        if nz and (not normalized or nz == 1):
            yield v


def _outer(tab: _Tables, vectors) -> np.ndarray:
    cur = np.array([1], dtype=np.int64)
    for x in vectors:
        cur = tab.mul[np.asarray(x)[:, None], cur[None, :]].reshape(-1)
    return cur


class _Pool:
    """Candidate rank-one tensors with a sorted key index for residual lookup."""

    def __init__(self, tab: _Tables, rows: np.ndarray, labels: list):
        self.tab = tab
        self.rows = rows
        self.labels = labels
        N = rows.shape[1]
        self.small = tab.q ** N < 2 ** 62
        if self.small:
            self.powers = np.array([tab.q ** k for k in range(N)], dtype=np.int64)
            keys = rows @ self.powers
            self.order = np.argsort(keys, kind="stable")
            self.keys = keys[self.order]
        else:
            self.lookup = {}
            for k, row in enumerate(rows):
                self.lookup.setdefault(row.tobytes(), k)

    def __len__(self):
        return len(self.labels)

    def find(self, residuals: np.ndarray, offset: int):
        """First ``(j, k)`` with ``residuals[j] == rows[k]`` and ``k >= offset + j``."""
        if self.small:
            keys = residuals @ self.powers
            pos = np.searchsorted(self.keys, keys)
            pos = np.minimum(pos, len(self.keys) - 1)
            hit = self.keys[pos] == keys
            ks = self.order[pos]
            ok = hit & (ks >= offset + np.arange(len(keys)))
            js = np.flatnonzero(ok)
            if len(js):
                return int(js[0]), int(ks[js[0]])
            return None
        for j, row in enumerate(residuals):
            k = self.lookup.get(row.tobytes())
            if k is not None and k >= offset + j:
                return j, k
        return None


def _search(pool: _Pool, target: np.ndarray, r: int, meter: _Meter):
    """Lexicographically first multiset of exactly r pool indices summing to target."""
    tab = pool.tab
    nc = len(pool)
    if r == 0:
        return () if not target.any() else None
    if r == 1:
        meter.charge(nc)
        found = pool.find(target[None, :], 0)
        return None if found is None else (found[1],)
    for prefix in itertools.combinations_with_replacement(range(nc), r - 2):
        last = prefix[-1] if prefix else 0
        rest = target
        for k in prefix:
            rest = tab.sub[rest, pool.rows[k]]
        meter.charge((nc - last) * (nc - last + 1) // 2)
        residuals = tab.sub[rest[None, :], pool.rows[last:]]
        found = pool.find(residuals, last)
        if found is not None:
            j, k = found
            return prefix + (last + j, k)
    return None


def _rank_one_pool(tab: _Tables, shape: Shape) -> _Pool:
    per_mode = [list(_vectors(tab.q, n, normalized=j < shape.d - 1)) for j, n in enumerate(shape)]
    labels = list(itertools.product(*per_mode))
    rows = np.array([_outer(tab, vecs) for vecs in labels], dtype=np.int64)
    return _Pool(tab, rows, labels)


def candidate_count(q: int, shape) -> int:
    """Normalized rank-one candidates: prod_{j<d} (q^n_j - 1)/(q - 1) times q^n_d - 1."""
    shape = Shape(shape)
    lead = math.prod((q ** n - 1) // (q - 1) for n in shape[:-1])
    return lead * (q ** shape[-1] - 1)


def _to_decomposition(tab: _Tables, pool: _Pool, picks) -> Decomposition:
    els = tab.field.elements
    terms = [tuple(tuple(els[a] for a in v) for v in pool.labels[k]) for k in picks]
    return Decomposition(tuple(terms))


def _search_exact(T: DenseTensor, tab, pool, r, meter):
    target = tab.idx(T.entries)
    picks = _search(pool, target, r, meter)
    if picks is None:
        return None
    dec = _to_decomposition(tab, pool, picks)
    if eval_decomposition(dec, T.shape, T.field) != T:
        raise AssertionError("search produced a decomposition that does not evaluate to T")
    return dec


def search_decomposition(T: DenseTensor, r: int, budget: SearchBudget = UNLIMITED):
    """Some decomposition with at most r terms, or None if none exists over GF(q).

    Term counts are tried in increasing order, so the witness has the fewest
    terms possible; among those it is lexicographically first.
    """
    tab = _Tables(T.field)
    pool = _rank_one_pool(tab, T.shape)
    meter = budget.start()
    for rp in range(r + 1):
        dec = _search_exact(T, tab, pool, rp, meter)
        if dec is not None:
            return dec
    return None


def rank_over_Fq(T: DenseTensor, budget: SearchBudget = UNLIMITED) -> int:
    """Exact rank over the base field GF(q)."""
    if T.is_zero():
        return 0
    lower, upper = rank_bounds(T)
    tab = _Tables(T.field)
    pool = _rank_one_pool(tab, T.shape)
    meter = budget.start()
    for r in range(lower, upper + 1):
        if _search_exact(T, tab, pool, r, meter) is not None:
            return r
    raise AssertionError(f"no decomposition with at most {upper} terms; the upper bound is violated")


def _power_pool(tab: _Tables, n: int, d: int) -> _Pool:
    """Distinct scaled powers t x^(x)d in packed coordinates, in first-seen order."""
    exps = exponent_vectors(n, d)
    seen = {}
    for x in _vectors(tab.q, n, normalized=False):
        base = np.zeros(len(exps), dtype=np.int64)
        for col, e in enumerate(exps):
            acc = 1
            for k, m in enumerate(e):
                for _ in range(m):
                    acc = tab.mul[acc, x[k]]
            base[col] = acc
        for t in tab.nonzero:
            row = tab.mul[t, base]
            key = row.tobytes()
            if row.any() and key not in seen:
                seen[key] = ((t, x), row)
    labels = [lab for lab, _ in seen.values()]
    rows = np.array([row for _, row in seen.values()], dtype=np.int64).reshape(len(labels), len(exps))
    return _Pool(tab, rows, labels)


def waring_search(S: SymTensor, r: int, budget: SearchBudget = UNLIMITED):
    """A decomposition S = sum t_i x_i^(x)d with exactly r terms, or None."""
    tab = _Tables(S.field)
    pool = _power_pool(tab, S.n, S.d)
    target = tab.idx(S.ordered())
    picks = _search(pool, target, r, budget.start())
    if picks is None:
        return None
    return _waring_decomposition(tab, pool, picks, S)


def _waring_decomposition(tab, pool, picks, S):
    els = tab.field.elements
    terms, scales = [], []
    for k in picks:
        t, x = pool.labels[k]
        vec = tuple(els[a] for a in x)
        terms.append((vec,) * S.d)
        scales.append(els[t])
    dec = Decomposition(tuple(terms), tuple(scales))
    if eval_decomposition(dec, Shape((S.n,) * S.d), S.field) != sym_expand(S):
        raise AssertionError("search produced a Waring decomposition that does not evaluate to S")
    return dec


def srank_over_Fq(S: SymTensor, budget: SearchBudget = UNLIMITED) -> int:
    """Least r with S = sum_{i<=r} t_i x_i^(x)d over GF(q).

    Raises NotWaringDecomposable when no r up to dim S^d(F^n) works; over a
    small field the scaled powers need not span the symmetric tensors.
    """
    if S.is_zero():
        return 0
    tab = _Tables(S.field)
    pool = _power_pool(tab, S.n, S.d)
    target = tab.idx(S.ordered())
    meter = budget.start()
    for r in range(1, S.dim + 1):
        picks = _search(pool, target, r, meter)
        if picks is not None:
            _waring_decomposition(tab, pool, picks, S)
            return r
    raise NotWaringDecomposable(
        f"no sum of at most {S.dim} scaled {S.d}-th powers over GF({tab.q}) equals S")
