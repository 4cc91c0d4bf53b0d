"""Dense and symmetric tensors over an exact field.

Entries are stored in colexicographic order (first index varies fastest).
Modes are numbered 1..d in the public API.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import (
    ModeOutOfRange,
    NonCubical,
    NotSymmetric,
    ShapeMismatch,
    SmallCharacteristic,
    ZeroTensor,
)
from .exact_linalg import ExactMatrix, inverse, rank, row_echelon


class Shape(tuple):
    """Mode lengths (n_1, ..., n_d), d >= 2."""

    def __new__(cls, dims):
        dims = tuple(int(n) for n in dims)
        if len(dims) < 2:
            raise ShapeMismatch(f"a tensor needs at least 2 modes, got {dims}")
        if any(n < 1 for n in dims):
            raise ShapeMismatch(f"mode lengths must be positive: {dims}")
        return super().__new__(cls, dims)

    @property
    def d(self) -> int:
        return len(self)

    @property
    def N(self) -> int:
        return math.prod(self)

    @property
    def L(self) -> int:
        return sum(self)

    def multi_indices(self):
        """All multi-indices (0-based) in colexicographic order."""
        for rev in itertools.product(*(range(n) for n in reversed(self))):
            yield rev[::-1]

    def linear(self, idx) -> int:
        k = 0
        for i, n in zip(reversed(idx), reversed(self)):
            k = k * n + i
        return k


@dataclass(frozen=True)
class DenseTensor:
    shape: Shape
    field: object
    entries: tuple

    def __post_init__(self):
        if not isinstance(self.shape, Shape):
            object.__setattr__(self, "shape", Shape(self.shape))
        if len(self.entries) != self.shape.N:
            raise ShapeMismatch(f"{len(self.entries)} entries for shape {tuple(self.shape)}")

    @classmethod
    def from_entries(cls, shape, field, entries) -> "DenseTensor":
        return cls(Shape(shape), field, tuple(field.coerce(x) for x in entries))

    @classmethod
    def zeros(cls, shape, field) -> "DenseTensor":
        shape = Shape(shape)
        return cls(shape, field, (field.zero,) * shape.N)

    @classmethod
    def from_dict(cls, shape, field, values) -> "DenseTensor":
        """Build from ``{multi_index: value}`` (0-based), zeros elsewhere."""
        shape = Shape(shape)
        entries = [field.zero] * shape.N
        for idx, v in values.items():
            entries[shape.linear(idx)] = field.coerce(v)
        return cls(shape, field, tuple(entries))

    def __getitem__(self, idx):
        return self.entries[self.shape.linear(idx)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        return DenseTensor(self.shape, self.field,
                           tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return DenseTensor(self.shape, self.field, tuple(-a for a in self.entries))

    def __sub__(self, other):
        return self + (-other)


def _check_mode(T: DenseTensor, j: int):
    if not 1 <= j <= T.shape.d:
        raise ModeOutOfRange(f"mode {j} outside 1..{T.shape.d}")


def unfold(T: DenseTensor, j: int) -> ExactMatrix:
    """Mode-j matricization: n_j x (N/n_j), complementary indices in colex order."""
    _check_mode(T, j)
    shape = T.shape
    nj = shape[j - 1]
    ncols = shape.N // nj
    rows = [[None] * ncols for _ in range(nj)]
    rest = Shape(tuple(n for k, n in enumerate(shape) if k != j - 1) + (1,))
    for idx, x in zip(shape.multi_indices(), T.entries):
        other = tuple(i for k, i in enumerate(idx) if k != j - 1) + (0,)
        rows[idx[j - 1]][rest.linear(other)] = x
    return ExactMatrix(tuple(tuple(r) for r in rows), T.field, ncols)


def fold(M: ExactMatrix, shape, j: int, field=None) -> DenseTensor:
    """Inverse of :func:`unfold` for the given target shape."""
    shape = Shape(shape)
    if not 1 <= j <= shape.d:
        raise ModeOutOfRange(f"mode {j} outside 1..{shape.d}")
    if M.shape != (shape[j - 1], shape.N // shape[j - 1]):
        raise ShapeMismatch(f"matrix {M.shape} does not fold into {tuple(shape)} at mode {j}")
    rest = Shape(tuple(n for k, n in enumerate(shape) if k != j - 1) + (1,))
    entries = []
    for idx in shape.multi_indices():
        other = tuple(i for k, i in enumerate(idx) if k != j - 1) + (0,)
        entries.append(M.rows[idx[j - 1]][rest.linear(other)])
    return DenseTensor(shape, field if field is not None else M.domain, tuple(entries))


def unfolding_rank(T: DenseTensor, j: int) -> int:
    return rank(unfold(T, j))


def unfolding_ranks(T: DenseTensor) -> tuple:
    return tuple(unfolding_rank(T, j) for j in range(1, T.shape.d + 1))


def mode_product(T: DenseTensor, M: ExactMatrix, j: int) -> DenseTensor:
    """Multiply mode j of T by M (p x n_j); the result has n_j replaced by p."""
    _check_mode(T, j)
    new_shape = list(T.shape)
    new_shape[j - 1] = M.nrows
    return fold(M @ unfold(T, j), new_shape, j, T.field)


def _column_basis(U: ExactMatrix):
    _, pivots = row_echelon(U)
    return [c for _, c in pivots]


def compress(T: DenseTensor):
    """Core compression to shape (r_1, ..., r_d).

    Returns ``(core, bases)`` where ``bases[j]`` is an invertible n_j x n_j
    matrix whose first r_j columns are the pivot columns of the mode-j
    unfolding; ``apply_bases(core, bases) == T``.
    """
    if T.is_zero():
        raise ZeroTensor("cannot compress the zero tensor")
    field = T.field
    bases = []
    for j in range(1, T.shape.d + 1):
        U = unfold(T, j)
        cols = _column_basis(U)
        C = [U.column(c) for c in cols]  # r_j vectors of length n_j
        Ct = ExactMatrix(tuple(tuple(v) for v in C), field, U.nrows)
        _, piv = row_echelon(Ct)
        used = {c for _, c in piv}
        n = U.nrows
        vecs = list(C)
        for k in range(n):
            if k not in used:
                vecs.append(tuple(field.one if i == k else field.zero for i in range(n)))
        B = ExactMatrix(tuple(zip(*vecs)), field, n)
        bases.append(B)
    full = T
    for j, B in enumerate(bases, start=1):
        full = mode_product(full, inverse(B), j)
    ranks = tuple(len(_column_basis(unfold(T, j))) for j in range(1, T.shape.d + 1))
    core_shape = Shape(ranks)
    core = DenseTensor(core_shape, field, tuple(full[idx] for idx in core_shape.multi_indices()))
    return core, tuple(bases)


def apply_bases(core: DenseTensor, bases) -> DenseTensor:
    """Map a core back through the leading columns of each change-of-basis matrix."""
    out = core
    for j, B in enumerate(bases, start=1):
        r = core.shape[j - 1]
        lead = ExactMatrix(tuple(row[:r] for row in B.rows), B.domain, r)
        out = mode_product(out, lead, j)
    return out


def rank_bounds(T: DenseTensor):
    """``(max_j r_j, min_j prod_{k != j} r_k)``, evaluated in the compressed frame."""
    if T.is_zero():
        raise ZeroTensor("rank bounds of the zero tensor")
    r = unfolding_ranks(T)
    upper = min(math.prod(r[:j] + r[j + 1:]) for j in range(len(r)))
    return max(r), upper


# ----------------------------------------------------------------- symmetric


def exponent_vectors(n: int, d: int):
    """J(d, n): exponent vectors summing to d, for sorted multi-indices in lex order.

    Equivalently exponent vectors in decreasing lexicographic order, e.g.
    (3,0), (2,1), (1,2), (0,3).
    """
    out = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def content(idx, n: int) -> tuple:
    e = [0] * n
    for i in idx:
        e[i] += 1
    return tuple(e)


def multinomial(e) -> int:
    """d! / (e_1! ... e_n!) with d = sum(e)."""
    out = math.factorial(sum(e))
    for k in e:
        out //= math.factorial(k)
    return out


@dataclass(frozen=True, eq=True)
class SymTensor:
    """Symmetric tensor in S^d F^n stored by its entries on J(d, n)."""

    n: int
    d: int
    field: object
    coeffs: dict

    def __post_init__(self):
        keys = set(exponent_vectors(self.n, self.d))
        if set(self.coeffs) != keys:
            raise ShapeMismatch(f"coefficients must be indexed by J({self.d},{self.n})")

    __hash__ = None

    @classmethod
    def zeros(cls, n, d, field) -> "SymTensor":
        return cls(n, d, field, {e: field.zero for e in exponent_vectors(n, d)})

    @classmethod
    def from_dict(cls, n, d, field, values) -> "SymTensor":
        coeffs = {e: field.zero for e in exponent_vectors(n, d)}
        for e, v in values.items():
            e = tuple(e)
            if e not in coeffs:
                raise ShapeMismatch(f"{e} is not in J({d},{n})")
            coeffs[e] = field.coerce(v)
        return cls(n, d, field, coeffs)

    @property
    def dim(self) -> int:
        return math.comb(self.n + self.d - 1, self.d)

    def ordered(self):
        """Coefficients in the canonical J(d, n) order."""
        return [self.coeffs[e] for e in exponent_vectors(self.n, self.d)]

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())


def _cubical(T: DenseTensor) -> int:
    n = T.shape[0]
    if any(m != n for m in T.shape):
        raise NonCubical(f"shape {tuple(T.shape)} is not cubical")
    return n


def is_symmetric(T: DenseTensor) -> bool:
    """Invariance under index permutations, via sorted-index representatives."""
    _cubical(T)
    return all(x == T[tuple(sorted(idx))] for idx, x in zip(T.shape.multi_indices(), T.entries))


def sym_pack(T: DenseTensor) -> SymTensor:
    n = _cubical(T)
    if not is_symmetric(T):
        raise NotSymmetric("tensor is not symmetric")
    d = T.shape.d
    coeffs = {}
    for combo in itertools.combinations_with_replacement(range(n), d):
        coeffs[content(combo, n)] = T[combo]
    return SymTensor(n, d, T.field, coeffs)


def sym_expand(S: SymTensor) -> DenseTensor:
    shape = Shape((S.n,) * S.d)
    return DenseTensor(shape, S.field,
                       tuple(S.coeffs[content(idx, S.n)] for idx in shape.multi_indices()))


def poly_of_sym(S: SymTensor):
    """The homogeneous form sum_j c(j) S_j x^j, with c(j) the multinomial coefficient."""
    from .poly_system import Poly

    terms = {e: S.coeffs[e] * multinomial(e) for e in exponent_vectors(S.n, S.d)}
    return Poly(S.n, S.field, terms)


def sym_of_poly(f, n: int, d: int) -> SymTensor:
    """Inverse of :func:`poly_of_sym`; needs characteristic 0 or > d."""
    field = f.field
    if field.characteristic and field.characteristic <= d:
        raise SmallCharacteristic(
            f"characteristic {field.characteristic} <= degree {d}: multinomials not invertible")
    if f.nvars != n:
        raise ShapeMismatch(f"polynomial has {f.nvars} variables, expected {n}")
    coeffs = {e: field.zero for e in exponent_vectors(n, d)}
    for e, c in f.terms.items():
        if sum(e) != d:
            raise ShapeMismatch(f"polynomial is not homogeneous of degree {d}")
        coeffs[e] = c / field.from_int(multinomial(e))
    return SymTensor(n, d, field, coeffs)


# ------------------------------------------------------------ decompositions


@dataclass(frozen=True)
class Decomposition:
    """r rank-one terms, each a tuple of d vectors; optional per-term scalars."""

    terms: tuple
    scales: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(tuple(v) for v in t) for t in self.terms))
        if self.scales is not None:
            object.__setattr__(self, "scales", tuple(self.scales))
            if len(self.scales) != len(self.terms):
                raise ShapeMismatch("one scale per term required")

    @property
    def rank(self) -> int:
        return len(self.terms)


def outer(vectors) -> list:
    """Colex-ordered entries of x_1 (x) ... (x) x_d."""
    cur = [1]
    for x in vectors:
        cur = [a * b for b in x for a in cur]
    return cur


def eval_decomposition(dec: Decomposition, shape, field) -> DenseTensor:
    """Exact sum of the outer products, each multiplied by its scale if present."""
    shape = Shape(shape)
    total = [field.zero] * shape.N
    for k, term in enumerate(dec.terms):
        if len(term) != shape.d or any(len(x) != n for x, n in zip(term, shape)):
            raise ShapeMismatch(f"term {k} does not conform to shape {tuple(shape)}")
        vecs = [[field.coerce(a) for a in x] for x in term]
        if dec.scales is not None:
            t = field.coerce(dec.scales[k])
            vecs[0] = [t * a for a in vecs[0]]
        total = [a + b for a, b in zip(total, outer(vecs))]
    return DenseTensor(shape, field, tuple(total))


def matrix_multiplication_tensor(m: int, n: int, p: int, field) -> DenseTensor:
    """<m,n,p>: sum_{i,j,k} a_ij (x) b_jk (x) c_ik with row-major flattening."""
    values = {}
    for i in range(m):
        for j in range(n):
            for k in range(p):
                values[(i * n + j, j * p + k, i * p + k)] = 1
    return DenseTensor.from_dict((m * n, n * p, m * p), field, values)
