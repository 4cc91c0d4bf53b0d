"""Sparse multivariate polynomials and the rank-<=r polynomial systems.

Variables are indexed 0..M-1.  Rank systems order them term-major, then
mode-major, then by coordinate: x_{1,1}[1..n_1], x_{2,1}[1..n_2], ...,
x_{1,2}[1..n_1], ...  Systems carrying per-term scalars put t_1..t_r first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import DimensionMismatch, InvalidRank, ParseError, SmallField, VariableMismatch
from .exact_arith import GaussianRational


def grlex_key(e):
    return (sum(e), e)


class Poly:
    """Polynomial as a sparse map exponent-tuple -> nonzero coefficient."""

    __slots__ = ("nvars", "field", "terms")

    def __init__(self, nvars: int, field, terms=None):
        self.nvars = nvars
        self.field = field
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise VariableMismatch(f"exponent {e} has length {len(e)}, expected {nvars}")
            c = field.coerce(c)
            clean[e] = clean[e] + c if e in clean else c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _raw(cls, nvars, field, terms):
        p = cls.__new__(cls)
        p.nvars, p.field, p.terms = nvars, field, terms
        return p

    @classmethod
    def constant(cls, nvars, field, c) -> "Poly":
        return cls(nvars, field, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, field, k) -> "Poly":
        e = [0] * nvars
        e[k] = 1
        return cls(nvars, field, {tuple(e): field.one})

    def _compat(self, other: "Poly"):
        if not isinstance(other, Poly):
            return False
        if other.nvars != self.nvars or other.field != self.field:
            raise VariableMismatch(
                f"{self.nvars} vars over {self.field!r} vs {other.nvars} vars over {other.field!r}")
        return True

    def _lift(self, other):
        if isinstance(other, Poly):
            self._compat(other)
            return other
        return Poly.constant(self.nvars, self.field, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out[e] + c if e in out else c
            if s:
                out[e] = s
            else:
                del out[e]
        return Poly._raw(self.nvars, self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, self.field, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.field.coerce(other)
            if not c:
                return Poly._raw(self.nvars, self.field, {})
            return Poly._raw(self.nvars, self.field, {e: a * c for e, a in self.terms.items()})
        self._compat(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out[e] + c1 * c2 if e in out else c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.nvars, self.field, out)

    __rmul__ = __mul__

    def mul_monomial(self, mono, coeff=None) -> "Poly":
        """Multiply by ``coeff * x^mono`` without any cancellation checks."""
        out = {tuple(a + b for a, b in zip(e, mono)): c for e, c in self.terms.items()}
        if coeff is not None:
            out = {e: c * coeff for e, c in out.items()}
        return Poly._raw(self.nvars, self.field, out)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return (self.nvars == other.nvars and self.field == other.field
                    and self.terms == other.terms)
        try:
            return self == Poly.constant(self.nvars, self.field, other)
        except Exception:
            return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.field.zero)

    def evaluate(self, values):
        if len(values) != self.nvars:
            raise DimensionMismatch(f"{len(values)} values for {self.nvars} variables")
        values = [self.field.coerce(v) for v in values]
        total = self.field.zero
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v ** k if k > 1 else term * v
            total = total + term
        return total

    def substitute(self, fixed: dict) -> "Poly":
        """Set ``fixed[var] = value`` and drop those variables."""
        keep = [k for k in range(self.nvars) if k not in fixed]
        vals = {k: self.field.coerce(v) for k, v in fixed.items()}
        out = {}
        for e, c in self.terms.items():
            for k, v in vals.items():
                if e[k]:
                    c = c * v ** e[k]
            if not c:
                continue
            ne = tuple(e[k] for k in keep)
            s = out[ne] + c if ne in out else c
            if s:
                out[ne] = s
            else:
                del out[ne]
        return Poly._raw(len(keep), self.field, out)

    def sorted_terms(self):
        """Terms in decreasing graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def format(self) -> str:
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self.format()})"


def _fmt_coeff(field, c) -> str:
    s = field.format(c)
    if isinstance(c, GaussianRational) and c.re and c.im:
        return f"({s})"
    return s


def format_poly(p: Poly) -> str:
    """``coeff*v0^2*v3 + coeff*v1 + coeff`` with terms in decreasing grlex order."""
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        factors = [_fmt_coeff(p.field, c)]
        for k, a in enumerate(e):
            if a == 1:
                factors.append(f"v{k}")
            elif a > 1:
                factors.append(f"v{k}^{a}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def parse_poly(text: str, nvars: int, field) -> Poly:
    text = text.strip()
    if text == "0":
        return Poly(nvars, field)
    terms = {}
    for part in text.split(" + "):
        part = part.strip()
        if part.startswith("("):
            close = part.find(")")
            if close < 0:
                raise ParseError(f"unbalanced parenthesis in {part!r}")
            coeff_text, rest = part[1:close], part[close + 1:]
        else:
            cut = part.find("*v")
            coeff_text, rest = (part, "") if cut < 0 else (part[:cut], part[cut:])
        coeff = field.parse(coeff_text)
        e = [0] * nvars
        for factor in filter(None, rest.split("*")):
            if not factor.startswith("v"):
                raise ParseError(f"bad factor {factor!r}")
            name, _, power = factor[1:].partition("^")
            try:
                k, a = int(name), int(power) if power else 1
            except ValueError as exc:
                raise ParseError(f"bad factor {factor!r}") from exc
            if not 0 <= k < nvars:
                raise ParseError(f"variable v{k} outside v0..v{nvars - 1}")
            e[k] += a
        e = tuple(e)
        terms[e] = terms[e] + coeff if e in terms else coeff
    return Poly(nvars, field, terms)


# ----------------------------------------------------------------- systems


@dataclass(frozen=True)
class PolySystem:
    """Generators f_1..f_K in M variables.

    ``keys[v]`` identifies variable v: ``("x", term, mode, coord)`` (all
    0-based) or ``("t", term)`` for a per-term scalar.
    """

    field: object
    nvars: int
    gens: tuple
    keys: tuple

    def __post_init__(self):
        if len(self.keys) != self.nvars:
            raise VariableMismatch(f"{len(self.keys)} variable keys for {self.nvars} variables")
        for g in self.gens:
            if g.nvars != self.nvars or g.field != self.field:
                raise VariableMismatch("generator does not match the system's variables")

    @property
    def degree(self) -> int:
        return max((g.degree for g in self.gens), default=0)

    def names(self) -> list:
        out = []
        for key in self.keys:
            if key[0] == "t":
                out.append(f"t{key[1] + 1}")
            elif key[0] == "v":
                out.append(f"v{key[1]}")
            else:
                _, t, j, k = key
                out.append(f"x{j + 1},{t + 1}[{k + 1}]")
        return out

    def substitute(self, fixed: dict) -> "PolySystem":
        keys = tuple(k for v, k in enumerate(self.keys) if v not in fixed)
        return PolySystem(self.field, len(keys), tuple(g.substitute(fixed) for g in self.gens), keys)

    def format(self) -> str:
        return "\n".join(format_poly(g) for g in self.gens)


def eval_system(sys: PolySystem, assignment) -> list:
    """Values of every generator at ``assignment``."""
    if len(assignment) != sys.nvars:
        raise DimensionMismatch(f"{len(assignment)} values for {sys.nvars} variables")
    return [g.evaluate(assignment) for g in sys.gens]


def _check_rank(r):
    if r < 1:
        raise InvalidRank(f"rank must be >= 1, got {r}")


def rank_system_keys(shape, r: int) -> tuple:
    return tuple(("x", t, j, k) for t in range(r) for j, n in enumerate(shape) for k in range(n))


def build_rank_system(T, r: int) -> PolySystem:
    """sum_{i<=r} x_{1,i} (x) ... (x) x_{d,i} - T = 0, one equation per entry (colex)."""
    _check_rank(r)
    shape, field = T.shape, T.field
    L = shape.L
    offsets = [sum(shape[:j]) for j in range(shape.d)]
    M = r * L
    gens = []
    for idx, value in zip(shape.multi_indices(), T.entries):
        terms = {}
        for t in range(r):
            e = [0] * M
            for j, i in enumerate(idx):
                e[t * L + offsets[j] + i] = 1
            terms[tuple(e)] = field.one
        if value:
            terms[(0,) * M] = -value
        gens.append(Poly._raw(M, field, terms))
    return PolySystem(field, M, tuple(gens), rank_system_keys(shape, r))


def _check_sym_field(field, d):
    if field.is_finite and field.order < d:
        raise SmallField(f"|F| = {field.order} < d = {d}")


def build_sym_rank_system(S, r: int) -> PolySystem:
    """sum_{i<=r} x_i^{(x)d} - S = 0, one equation per sorted multi-index."""
    _check_rank(r)
    _check_sym_field(S.field, S.d)
    return _sym_system(S, r, scaled=False)


def build_sym_rank_system_ff(S, r: int) -> PolySystem:
    """sum_{i<=r} t_i x_i^{(x)d} - S = 0 with scalar unknowns t_i.

    Variables: t_1..t_r, then x_1..x_r, i.e. r(n+1) in total.
    """
    _check_rank(r)
    return _sym_system(S, r, scaled=True)


build_scaled_sym_rank_system = build_sym_rank_system_ff


def _sym_system(S, r, scaled):
    from .tensor_core import exponent_vectors

    n, field = S.n, S.field
    base = r if scaled else 0
    M = base + r * n
    keys = (tuple(("t", t) for t in range(r)) if scaled else ()) + \
        tuple(("x", t, 0, k) for t in range(r) for k in range(n))
    gens = []
    for e in exponent_vectors(n, S.d):
        terms = {}
        for t in range(r):
            mono = [0] * M
            if scaled:
                mono[t] = 1
            for k, a in enumerate(e):
                mono[base + t * n + k] = a
            terms[tuple(mono)] = field.one
        value = S.coeffs[e]
        if value:
            terms[(0,) * M] = -value
        gens.append(Poly._raw(M, field, terms))
    return PolySystem(field, M, tuple(gens), keys)


# ----------------------------------------------------------- normalization


@dataclass(frozen=True)
class NormalizationPattern:
    """``positions[i][j]`` is the coordinate of x_{j,i} fixed to 1 (0-based)."""

    positions: tuple

    @property
    def r(self) -> int:
        return len(self.positions)

    def fixed_variables(self, sys: PolySystem) -> dict:
        index = {k: v for v, k in enumerate(sys.keys)}
        fixed = {}
        for t, modes in enumerate(self.positions):
            for j, k in enumerate(modes):
                fixed[index[("x", t, j, k)]] = sys.field.one
        return fixed

    def label(self) -> str:
        return ";".join(",".join(str(k + 1) for k in term) for term in self.positions)


def normalization_patterns(shape, r: int):
    """All N(n')^r patterns fixing one coordinate of x_{j,i} for every j < d."""
    per_term = list(itertools.product(*(range(n) for n in shape[:-1])))
    for combo in itertools.product(per_term, repeat=r):
        yield NormalizationPattern(combo)


def count_patterns(shape, r: int) -> int:
    return math.prod(shape[:-1]) ** r


def sym_normalization_patterns(n: int, r: int):
    """n^r patterns fixing one coordinate of each x_i."""
    for combo in itertools.product(range(n), repeat=r):
        yield NormalizationPattern(tuple((k,) for k in combo))


def apply_pattern(sys: PolySystem, pattern: NormalizationPattern) -> PolySystem:
    """Substitute 1 for the variables the pattern fixes."""
    return sys.substitute(pattern.fixed_variables(sys))


def extend_assignment(sys: PolySystem, pattern: NormalizationPattern, values) -> list:
    """Insert the pattern's fixed 1s into an assignment of the substituted system."""
    fixed = pattern.fixed_variables(sys)
    values = iter(values)
    return [fixed[v] if v in fixed else next(values) for v in range(sys.nvars)]


def parse_system(lines, nvars: int, field, keys=None) -> PolySystem:
    gens = tuple(parse_poly(line, nvars, field) for line in lines)
    if keys is None:
        keys = tuple(("v", k) for k in range(nvars))
    return PolySystem(field, nvars, gens, keys)
