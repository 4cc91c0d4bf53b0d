"""Exact matrix elimination over Q, Q(i), Z, Z[i] and GF(p^l).

Dense routines (:func:`gauss_rank`, :func:`bareiss_eliminate`, :func:`solvable`)
work on :class:`ExactMatrix`.  :func:`sparse_solve` is the kernel behind the
certificate search: it echelonizes sparse column vectors and returns one
solution with every non-pivot unknown set to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .errors import DimensionMismatch
from .exact_arith import (
    QQ,
    QQI,
    ZZ,
    ZZI,
    GaloisField,
    GaussianInteger,
    GaussianRational,
    GaussianRationalField,
    RationalField,
    gaussian_gcd,
    height,
)


@dataclass(frozen=True)
class ExactMatrix:
    """Dense m x n matrix over a field or over Z / Z[i]."""

    rows: tuple
    domain: object
    ncols: int

    @classmethod
    def from_rows(cls, rows, domain, ncols=None) -> "ExactMatrix":
        rows = tuple(tuple(_coerce(domain, x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        return cls(rows, domain, ncols)

    @classmethod
    def zeros(cls, m, n, domain) -> "ExactMatrix":
        z = _zero(domain)
        return cls(tuple((z,) * n for _ in range(m)), domain, n)

    @classmethod
    def identity(cls, n, domain) -> "ExactMatrix":
        z, o = _zero(domain), _one(domain)
        return cls(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), domain, n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(tuple(zip(*self.rows)) if self.rows else (),
                           self.domain, self.nrows)

    def augment(self, b) -> "ExactMatrix":
        if len(b) != self.nrows:
            raise DimensionMismatch(f"rhs has length {len(b)}, expected {self.nrows}")
        return ExactMatrix.from_rows([tuple(r) + (x,) for r, x in zip(self.rows, b)],
                                     self.domain, self.ncols + 1)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        z = _zero(self.domain)
        cols = other.transpose().rows
        rows = [tuple(sum((a * b for a, b in zip(r, c)), z) for c in cols) for r in self.rows]
        return ExactMatrix(tuple(rows), self.domain, other.ncols)

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows)


def _zero(domain):
    if domain is ZZ:
        return 0
    if domain is ZZI:
        return GaussianInteger(0, 0)
    return domain.zero


def _one(domain):
    if domain is ZZ:
        return 1
    if domain is ZZI:
        return GaussianInteger(1, 0)
    return domain.one


def _coerce(domain, x):
    if domain is ZZ:
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        if not ZZ.contains(x):
            raise TypeError(f"{x!r} is not an integer")
        return x
    if domain is ZZI:
        if isinstance(x, int):
            return GaussianInteger(x, 0)
        if not ZZI.contains(x):
            raise TypeError(f"{x!r} is not a Gaussian integer")
        return x
    return domain.coerce(x)


def _is_ring(domain) -> bool:
    return domain is ZZ or domain is ZZI


# ------------------------------------------------------------ field elimination


def row_echelon(A: ExactMatrix):
    """Row echelon form over a field (or the fraction field of Z / Z[i]).

    Pivot rule: leftmost unprocessed column, first nonzero entry from the top.
    Returns ``(rows, pivots)`` where ``pivots`` lists ``(row, col)`` in order.
    """
    domain = A.domain.fraction_field if _is_ring(A.domain) else A.domain
    M = [[_lift(domain, x) for x in r] for r in A.rows]
    m, n = A.nrows, A.ncols
    pivots = []
    k = 0
    for c in range(n):
        if k == m:
            break
        r = next((i for i in range(k, m) if M[i][c]), None)
        if r is None:
            continue
        M[k], M[r] = M[r], M[k]
        inv = domain.one / M[k][c]
        M[k] = [x * inv for x in M[k]]
        for i in range(k + 1, m):
            a = M[i][c]
            if a:
                Mk = M[k]
                M[i] = [x - a * y for x, y in zip(M[i], Mk)]
        pivots.append((k, c))
        k += 1
    return M, pivots


def _lift(field, x):
    if isinstance(x, GaussianInteger):
        return x.to_rational()
    return field.coerce(x)


def gauss_rank(A: ExactMatrix) -> int:
    """Number of nonzero rows in the row echelon form of ``A``."""
    return len(row_echelon(A)[1])


def rank(A: ExactMatrix) -> int:
    """Exact rank; fraction-free over Z, Z[i], Q, Q(i); field elimination over GF(q)."""
    if isinstance(A.domain, GaloisField):
        return gauss_rank(A)
    if not _is_ring(A.domain):
        A = clear_denominators(A)
    return bareiss_eliminate(A).rank


def solve(A: ExactMatrix, b) -> list | None:
    """One solution of ``A x = b`` (free unknowns zero), or None if inconsistent."""
    if len(b) != A.nrows:
        raise DimensionMismatch(f"rhs has length {len(b)}, expected {A.nrows}")
    M, pivots = row_echelon(A.augment(b))
    n = A.ncols
    if any(c == n for _, c in pivots):
        return None
    domain = A.domain.fraction_field if _is_ring(A.domain) else A.domain
    x = [domain.zero] * n
    for r, c in reversed(pivots):
        s = M[r][n]
        for j in range(c + 1, n):
            if M[r][j]:
                s = s - M[r][j] * x[j]
        x[c] = s
    return x


def inverse(A: ExactMatrix) -> ExactMatrix:
    """Inverse of a square matrix over a field (Gauss-Jordan)."""
    n = A.nrows
    if A.ncols != n:
        raise DimensionMismatch("inverse of a non-square matrix")
    I = ExactMatrix.identity(n, A.domain)
    aug = ExactMatrix(tuple(r + i for r, i in zip(A.rows, I.rows)), A.domain, 2 * n)
    M, pivots = row_echelon(aug)
    if len(pivots) < n or pivots[n - 1][1] >= n:
        raise ArithmeticError("matrix is singular")
    for k in range(n - 1, -1, -1):
        for i in range(k):
            a = M[i][k]
            if a:
                M[i] = [x - a * y for x, y in zip(M[i], M[k])]
    return ExactMatrix(tuple(tuple(r[n:]) for r in M), A.domain, n)


# ------------------------------------------------------------ fraction-free


@dataclass
class EliminationTrace:
    """Record of one fraction-free elimination run.

    ``minors[k-1]`` is D_k, the determinant of the k x k submatrix on the
    chosen pivot rows (in selection order) and pivot columns.
    ``pivot_ratios[k-1]`` is the k-th pivot of ordinary Gaussian elimination,
    D_k / D_{k-1}.
    """

    rank: int
    pivots: list = field(default_factory=list)
    minors: list = field(default_factory=list)
    pivot_ratios: list = field(default_factory=list)
    max_height: int = 1

    def report(self) -> str:
        lines = [f"rank {self.rank}",
                 "pivots " + " ".join(f"({r},{c})" for r, c in self.pivots),
                 "minors " + " ".join(_fmt_ring(d) for d in self.minors),
                 f"max-height {self.max_height}"]
        return "\n".join(lines)


def _fmt_ring(x) -> str:
    if isinstance(x, GaussianInteger):
        return str(QQI.format(x.to_rational()))
    return str(x)


def _ring_height(x) -> int:
    if isinstance(x, GaussianInteger):
        return max(height(x.re), height(x.im))
    return height(x)


def bareiss_eliminate(A: ExactMatrix) -> EliminationTrace:
    """Fraction-free Gaussian elimination over Z or Z[i] without normalizing pivots.

    Every intermediate entry is a minor of ``A`` and stays integral; each
    update divides exactly by the previous pivot value.
    """
    if not _is_ring(A.domain):
        raise TypeError(f"bareiss_eliminate needs Z or Z[i] entries, got {A.domain!r}")
    gaussian = A.domain is ZZI
    M = [list(r) for r in A.rows]
    order = list(range(A.nrows))
    m, n = A.nrows, A.ncols
    trace = EliminationTrace(rank=0)
    trace.max_height = max((_ring_height(x) for r in M for x in r), default=1)
    prev = _one(A.domain)
    k = 0
    for c in range(n):
        if k == m:
            break
        r = next((i for i in range(k, m) if M[i][c]), None)
        if r is None:
            continue
        M[k], M[r] = M[r], M[k]
        order[k], order[r] = order[r], order[k]
        piv = M[k][c]
        Mk = M[k]
        for i in range(k + 1, m):
            Mi = M[i]
            a = Mi[c]
            for j in range(c + 1, n):
                num = piv * Mi[j] - a * Mk[j]
                Mi[j] = num.exact_div(prev) if gaussian else _exact_int_div(num, prev)
            Mi[c] = _zero(A.domain)
        trace.max_height = max(trace.max_height,
                               max((_ring_height(x) for row in M[k + 1:] for x in row), default=1))
        trace.pivots.append((order[k], c))
        trace.minors.append(piv)
        if gaussian:
            trace.pivot_ratios.append(piv.to_rational() / prev.to_rational())
        else:
            trace.pivot_ratios.append(Fraction(piv, prev))
        prev = piv
        k += 1
    trace.rank = k
    return trace


def _exact_int_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError(f"{b} does not divide {a}")
    return q


def column_scales(A: ExactMatrix) -> list:
    """Per-column LCM of entry denominators (1 for zero columns)."""
    scales = []
    for j in range(A.ncols):
        dens = []
        for x in A.column(j):
            dens.extend(_denominators(x))
        scales.append(math.lcm(*dens) if dens else 1)
    return scales


def _denominators(x):
    if isinstance(x, GaussianRational):
        return [x.re.denominator, x.im.denominator]
    if isinstance(x, Fraction):
        return [x.denominator]
    return []


def clear_denominators(A: ExactMatrix) -> ExactMatrix:
    """Scale each column by the LCM of its denominators, landing in Z or Z[i]."""
    if _is_ring(A.domain):
        return A
    if isinstance(A.domain, RationalField):
        ring, conv = ZZ, lambda x, s: (x * s).numerator
    elif isinstance(A.domain, GaussianRationalField):
        ring = ZZI

        def conv(x, s):
            y = x * s
            return GaussianInteger(y.re.numerator, y.im.numerator)
    else:
        raise TypeError(f"clear_denominators needs Q or Q(i), got {A.domain!r}")
    scales = column_scales(A)
    rows = tuple(tuple(conv(x, s) for x, s in zip(r, scales)) for r in A.rows)
    return ExactMatrix(rows, ring, A.ncols)


def matrix_height(A: ExactMatrix) -> int:
    """Maximum entry height (1 for an empty or zero matrix)."""
    return max((height(x) for r in A.rows for x in r), default=1)


def solvable(A: ExactMatrix, b) -> bool:
    """Kronecker-Capelli: ``A x = b`` is solvable iff rank A == rank [A|b].

    When A has more columns than rows both ranks are taken on the transposes.
    """
    if len(b) != A.nrows:
        raise DimensionMismatch(f"rhs has length {len(b)}, expected {A.nrows}")
    aug = A.augment(b)
    if A.ncols > A.nrows:
        return rank(A.transpose()) == rank(aug.transpose())
    return rank(A) == rank(aug)


# ------------------------------------------------------------ sparse kernel


class SparseEchelon:
    """Incremental column echelon basis over sparse vectors ``{row_id: scalar}``.

    Columns are added one at a time; :meth:`solve` expresses a target as a
    combination of every column added so far.  The pivot of a vector is its
    largest row id.  Over Q and Q(i) each column is first cleared of
    denominators and all reductions are fraction-free with content removal;
    over GF(q) reductions divide by the pivot.
    """

    def __init__(self, domain):
        self.domain = domain
        if isinstance(domain, GaloisField):
            if domain.order == 2:
                self._kernel = _GF2Kernel()
            elif domain.l == 1:
                self._kernel = _FieldKernel(_ModP(domain.p), domain)
            else:
                self._kernel = _FieldKernel(_Generic(domain), domain)
        elif isinstance(domain, RationalField):
            self._kernel = _RingKernel(_IntOps)
        elif isinstance(domain, GaussianRationalField):
            self._kernel = _RingKernel(_GaussOps)
        else:
            raise TypeError(f"unsupported domain {domain!r}")
        self.ncols = 0
        self.reductions = 0

    @property
    def rank(self) -> int:
        return len(self._kernel.basis)

    def add(self, column) -> bool:
        """Add a column; True if it enlarged the span."""
        j = self.ncols
        self.ncols += 1
        grew, steps = self._kernel.add(j, column)
        self.reductions += steps
        return grew

    def solve(self, target):
        """Coefficients (one per column, non-pivot columns zero) or None."""
        return self._kernel.solve(target, self.ncols)


def sparse_solve(columns, target, domain, stats=None):
    """Solve ``sum_j x_j * columns[j] == target`` exactly, or return None."""
    ech = SparseEchelon(domain)
    for col in columns:
        ech.add(col)
    sol = ech.solve(target)
    if stats is not None:
        stats["reductions"] = stats.get("reductions", 0) + ech.reductions
        stats["rank"] = ech.rank
    return sol


class _GF2Kernel:
    def __init__(self):
        self.basis = {}
        self.one = GaloisField(2).one
        self.zero = GaloisField(2).zero

    def add(self, j, column):
        v = 0
        for k, x in column.items():
            if x:
                v |= 1 << k
        c = 1 << j
        steps = 0
        basis = self.basis
        while v:
            lead = v.bit_length() - 1
            hit = basis.get(lead)
            if hit is None:
                basis[lead] = (v, c)
                return True, steps
            v ^= hit[0]
            c ^= hit[1]
            steps += 1
        return False, steps

    def solve(self, target, ncols):
        t = 0
        for k, x in target.items():
            if x:
                t |= 1 << k
        combo = 0
        while t:
            hit = self.basis.get(t.bit_length() - 1)
            if hit is None:
                return None
            t ^= hit[0]
            combo ^= hit[1]
        return [self.one if (combo >> j) & 1 else self.zero for j in range(ncols)]


class _ModP:
    def __init__(self, p):
        self.p = p
        self.one = 1
        self.zero = 0

    def to_raw(self, x):
        return x.coeffs[0]

    def inv(self, a):
        return pow(a, self.p - 2, self.p)

    def axpy(self, v, a, w):
        # v <- v - a*w in place
        p = self.p
        for k, x in w.items():
            y = (v.get(k, 0) - a * x) % p
            if y:
                v[k] = y
            else:
                v.pop(k, None)

    def scale(self, v, a):
        p = self.p
        return {k: x * a % p for k, x in v.items()}


class _Generic:
    def __init__(self, field):
        self.field = field
        self.one = field.one
        self.zero = field.zero

    def to_raw(self, x):
        return x

    def inv(self, a):
        return self.one / a

    def axpy(self, v, a, w):
        for k, x in w.items():
            y = v.get(k, self.zero) - a * x
            if y:
                v[k] = y
            else:
                v.pop(k, None)

    def scale(self, v, a):
        return {k: x * a for k, x in v.items()}


class _FieldKernel:
    def __init__(self, ops, field):
        self.ops = ops
        self.field = field
        self.basis = {}

    def _vec(self, column):
        raw = self.ops.to_raw
        return {k: raw(x) for k, x in column.items() if x}

    def add(self, j, column):
        ops = self.ops
        v = self._vec(column)
        c = {j: ops.one}
        steps = 0
        while v:
            lead = max(v)
            hit = self.basis.get(lead)
            if hit is None:
                inv = ops.inv(v[lead])
                self.basis[lead] = (ops.scale(v, inv), ops.scale(c, inv))
                return True, steps
            a = v[lead]
            ops.axpy(v, a, hit[0])
            ops.axpy(c, a, hit[1])
            steps += 1
        return False, steps

    def solve(self, target, ncols):
        ops = self.ops
        t = self._vec(target)
        combo = {}
        while t:
            lead = max(t)
            hit = self.basis.get(lead)
            if hit is None:
                return None
            a = t[lead]
            ops.axpy(t, a, hit[0])
            ops.axpy(combo, -a, hit[1])
        if isinstance(ops, _ModP):
            return [self.field.from_int(combo.get(j, 0)) for j in range(ncols)]
        return [combo.get(j, ops.zero) for j in range(ncols)]


class _IntOps:
    field = QQ
    one = 1
    zero = 0

    @staticmethod
    def clear(vec):
        s = math.lcm(*(x.denominator for x in vec.values())) if vec else 1
        return {k: (x * s).numerator for k, x in vec.items() if x}, s

    @staticmethod
    def gcd(*xs):
        return math.gcd(*xs)

    @staticmethod
    def div(x, g):
        return x // g

    @staticmethod
    def is_unit(g):
        return g == 1 or g == -1

    @staticmethod
    def to_field(x):
        return Fraction(x)


class _GaussOps:
    field = QQI
    one = GaussianInteger(1, 0)
    zero = GaussianInteger(0, 0)

    @staticmethod
    def clear(vec):
        dens = []
        for x in vec.values():
            dens.extend((x.re.denominator, x.im.denominator))
        s = math.lcm(*dens) if dens else 1
        out = {}
        for k, x in vec.items():
            if x:
                y = x * s
                out[k] = GaussianInteger(y.re.numerator, y.im.numerator)
        return out, s

    @staticmethod
    def gcd(*xs):
        return reduce(gaussian_gcd, xs, GaussianInteger(0, 0))

    @staticmethod
    def div(x, g):
        return x.exact_div(g)

    @staticmethod
    def is_unit(g):
        return g.norm() == 1

    @staticmethod
    def to_field(x):
        return x.to_rational() if isinstance(x, GaussianInteger) else GaussianRational(x)


class _RingKernel:
    """Fraction-free reduction of denominator-cleared columns over Z or Z[i].

    Invariant for every basis entry ``(v, c)``: v == sum_j c[j] * cleared_j.
    """

    def __init__(self, ops):
        self.ops = ops
        self.basis = {}
        self.scales = []

    def _combine(self, v, c, a, b, hit):
        # b*v - a*hit_v and b*c - a*hit_c, with a, b already divided by gcd
        zero = self.ops.zero
        bv, bc = hit
        nv = {k: b * x for k, x in v.items()}
        for k, x in bv.items():
            y = nv.get(k, zero) - a * x
            if y:
                nv[k] = y
            else:
                nv.pop(k, None)
        nc = {k: b * x for k, x in c.items()}
        for k, x in bc.items():
            y = nc.get(k, zero) - a * x
            if y:
                nc[k] = y
            else:
                nc.pop(k, None)
        return nv, nc

    def _primitive(self, v, c, *extra):
        ops = self.ops
        g = ops.gcd(*v.values(), *c.values(), *extra)
        if not g or ops.is_unit(g):
            return v, c, extra, False
        return ({k: ops.div(x, g) for k, x in v.items()},
                {k: ops.div(x, g) for k, x in c.items()},
                tuple(ops.div(x, g) for x in extra), True)

    def _ratio(self, a, b):
        g = self.ops.gcd(a, b)
        return self.ops.div(a, g), self.ops.div(b, g)

    def add(self, j, column):
        v, s = self.ops.clear(column)
        self.scales.append(s)
        c = {j: self.ops.one}
        steps = 0
        while v:
            lead = max(v)
            hit = self.basis.get(lead)
            if hit is None:
                v, c, _, _ = self._primitive(v, c)
                self.basis[lead] = (v, c)
                return True, steps
            a, b = self._ratio(v[lead], hit[0][lead])
            v, c = self._combine(v, c, a, b, hit)
            steps += 1
        return False, steps

    def solve(self, target, ncols):
        ops = self.ops
        # t == scale * cleared_target - sum combo_j * cleared_j
        t, t_den = ops.clear(target)
        scale = ops.one
        neg = {}  # -combo
        while t:
            lead = max(t)
            hit = self.basis.get(lead)
            if hit is None:
                return None
            a, b = self._ratio(t[lead], hit[0][lead])
            t, neg = self._combine(t, neg, a, b, hit)
            scale = scale * b
            t, neg, (scale,), _ = self._primitive(t, neg, scale)
        # cleared_target = t_den * target, cleared_j = s_j * column_j
        out = []
        denom = ops.to_field(scale) * t_den
        for j in range(ncols):
            cj = neg.get(j)
            if cj is None:
                out.append(ops.field.zero)
            else:
                out.append(ops.to_field(-cj) * self.scales[j] / denom)
        return out
