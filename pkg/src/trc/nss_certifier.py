"""Degree-graded Nullstellensatz certificates for "rank > r".

A certificate for a system f_1..f_K is a list of cofactors g_i with
sum g_i f_i = 1.  Finding one of degree <= D is a linear problem in the
coefficients of the g_i; it is solved exactly and the result is re-checked
with polynomial arithmetic before it is returned.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SmallField, ZeroTensor
from .exact_linalg import ExactMatrix, SparseEchelon
from .poly_system import (
    Poly,
    PolySystem,
    apply_pattern,
    build_rank_system,
    build_scaled_sym_rank_system,
    build_sym_rank_system,
    grlex_key,
    normalization_patterns,
    sym_normalization_patterns,
)
from .tensor_core import eval_decomposition, sym_expand, unfolding_ranks

DEFAULT_MAX_DEGREE = 4

# Rational upper bound for e used in every exact bound comparison.
E_UPPER = Fraction(2718282, 1000000)


def monomials_up_to(m: int, D: int) -> list:
    """Exponent vectors of degree <= D in m variables, graded lex order.

    Degrees ascend; within a degree x_1 is largest, e.g. for m=2, D=2:
    1, x1, x2, x1^2, x1x2, x2^2.
    """
    out = []
    for deg in range(D + 1):
        for combo in itertools.combinations_with_replacement(range(m), deg):
            e = [0] * m
            for k in combo:
                e[k] += 1
            out.append(tuple(e))
    return out


def _monomials_of_degree(m: int, deg: int) -> list:
    out = []
    for combo in itertools.combinations_with_replacement(range(m), deg):
        e = [0] * m
        for k in combo:
            e[k] += 1
        out.append(tuple(e))
    return out


# ------------------------------------------------------------ linear system


class CertificateSystem:
    """Sparse linear system in the cofactor coefficients for one degree D.

    Column ``(i, nu)`` holds the coefficients of ``nu * f_i``; rows are
    monomials of degree <= D + deg(system).  The right-hand side is the
    constant polynomial 1.
    """

    def __init__(self, system: PolySystem, D: int, monomial_filter=None):
        self.system = system
        self.degree = D
        mults = monomials_up_to(system.nvars, D)
        if monomial_filter is not None:
            mults = [mu for mu in mults if monomial_filter(mu)]
        self.multipliers = mults
        self.labels = [(i, mu) for i in range(len(system.gens)) for mu in mults]
        self._row_ids = {}
        self.columns = [self._column(system.gens[i], mu) for i, mu in self.labels]
        one = (0,) * system.nvars
        self.target = {self._row_id(one): system.field.one}

    def _row_id(self, mono):
        rid = self._row_ids.get(mono)
        if rid is None:
            rid = self._row_ids[mono] = len(self._row_ids)
        return rid

    def _column(self, f: Poly, mu):
        col = {}
        for e, c in f.terms.items():
            col[self._row_id(tuple(a + b for a, b in zip(e, mu)))] = c
        return col

    @property
    def ncols(self) -> int:
        return len(self.labels)

    @property
    def nrows(self) -> int:
        """Monomials of degree <= D + d: C(M + D + d, M)."""
        M = self.system.nvars
        return math.comb(M + self.degree + self.system.degree, M)

    def row_monomials(self) -> list:
        return monomials_up_to(self.system.nvars, self.degree + self.system.degree)

    def dense(self):
        """``(A, b)`` with rows in graded lex order; intended for small systems."""
        field = self.system.field
        rows = self.row_monomials()
        by_id = {rid: mono for mono, rid in self._row_ids.items()}
        pos = {mono: k for k, mono in enumerate(rows)}
        A = [[field.zero] * self.ncols for _ in rows]
        for j, col in enumerate(self.columns):
            for rid, c in col.items():
                A[pos[by_id[rid]]][j] = c
        b = [field.zero] * len(rows)
        b[pos[(0,) * self.system.nvars]] = field.one
        return ExactMatrix.from_rows(A, field, self.ncols), b


def build_certificate_system(sys: PolySystem, D: int, monomial_filter=None) -> CertificateSystem:
    return CertificateSystem(sys, D, monomial_filter)


# ------------------------------------------------------------ certificates


@dataclass
class Certificate:
    system: PolySystem
    degree: int
    cofactors: tuple
    label: str = ""

    def combination(self) -> Poly:
        total = Poly(self.system.nvars, self.system.field)
        for g, f in zip(self.cofactors, self.system.gens):
            total = total + g * f
        return total

    def verify(self) -> bool:
        return verify_certificate(self)


def verify_certificate(cert: Certificate) -> bool:
    """Recompute sum g_i f_i with polynomial arithmetic and compare to 1."""
    if len(cert.cofactors) != len(cert.system.gens):
        return False
    if any(g.degree > cert.degree for g in cert.cofactors):
        return False
    total = cert.combination()
    return total == Poly.constant(cert.system.nvars, cert.system.field, 1)


def _cofactors(system: PolySystem, labels, solution):
    terms = [dict() for _ in system.gens]
    for (i, mu), c in zip(labels, solution):
        if c:
            terms[i][mu] = c
    return tuple(Poly(system.nvars, system.field, t) for t in terms)


def find_certificate(sys: PolySystem, max_degree: int, monomial_filter=None, stats=None):
    """Graded search D = 0, 1, ..., max_degree; the first certificate found is returned.

    The echelon basis is extended in place as D grows, so each degree only
    pays for its new multiplier columns.
    """
    field = sys.field
    ech = SparseEchelon(field)
    row_ids = {}
    labels = []
    one = (0,) * sys.nvars

    def rid(mono):
        k = row_ids.get(mono)
        if k is None:
            k = row_ids[mono] = len(row_ids)
        return k

    target = {rid(one): field.one}
    for D in range(max_degree + 1):
        new = _monomials_of_degree(sys.nvars, D)
        if monomial_filter is not None:
            new = [mu for mu in new if monomial_filter(mu)]
        for i, f in enumerate(sys.gens):
            for mu in new:
                col = {rid(tuple(a + b for a, b in zip(e, mu))): c for e, c in f.terms.items()}
                ech.add(col)
                labels.append((i, mu))
        if stats is not None:
            stats.setdefault("dimensions", []).append(
                (math.comb(sys.nvars + D + sys.degree, sys.nvars), len(labels)))
        sol = ech.solve(target)
        if sol is not None:
            cert = Certificate(sys, D, _cofactors(sys, labels, sol))
            if not verify_certificate(cert):
                raise AssertionError("solver produced a certificate that does not verify")
            if stats is not None:
                stats["reductions"] = stats.get("reductions", 0) + ech.reductions
            return cert
    if stats is not None:
        stats["reductions"] = stats.get("reductions", 0) + ech.reductions
    return None


# ------------------------------------------------------------ verdicts


class Status(str, enum.Enum):
    CERTIFIED_GT = "CERTIFIED_GT"
    DISPROVED = "DISPROVED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Verdict:
    status: Status
    r: int
    method: str = ""
    justification: str = ""
    certificates: list = field(default_factory=list)
    degrees: list = field(default_factory=list)
    dimensions: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    witness: object = None
    normalize: bool = False
    symmetric: bool = False

    @property
    def max_degree_used(self) -> int:
        return max((c.degree for c in self.certificates), default=-1)

    def summary(self) -> str:
        head = f"{self.status.value} r={self.r}"
        if self.status is Status.CERTIFIED_GT:
            what = "srank" if self.symmetric else "rank"
            head += f" ({what} > {self.r} over the algebraic closure)"
        return head


def default_workers() -> int:
    """Worker cap from TRC_THREADS: unset means 1, 0 means one per CPU."""
    raw = os.environ.get("TRC_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    return os.cpu_count() or 1 if n == 0 else max(1, n)


def _solve_task(args):
    label, system, max_degree = args
    stats = {}
    cert = find_certificate(system, max_degree, stats=stats)
    if cert is not None:
        cert.label = label
    return label, cert, stats


def _run_tasks(tasks, max_degree, workers):
    """Yield ``(label, cert, stats)`` in task order; sequential runs stop at the first miss."""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            yield from pool.map(_solve_task, [(lab, s, max_degree) for lab, s in tasks])
        return
    for label, system in tasks:
        out = _solve_task((label, system, max_degree))
        yield out
        if out[1] is None:
            return


def _nullstellensatz_verdict(tasks, r, max_degree, workers, **extra) -> Verdict:
    verdict = Verdict(Status.INCONCLUSIVE, r, method="nullstellensatz", **extra)
    certs = []
    for label, cert, stats in _run_tasks(tasks, max_degree, workers):
        verdict.dimensions.extend(stats.get("dimensions", []))
        verdict.counters["reductions"] = verdict.counters.get("reductions", 0) + stats.get("reductions", 0)
        verdict.counters["systems"] = verdict.counters.get("systems", 0) + 1
        if cert is None:
            verdict.justification = f"no certificate of degree <= {max_degree} for {label}"
            verdict.degrees = [c.degree for c in certs]
            return verdict
        certs.append(cert)
    verdict.status = Status.CERTIFIED_GT
    verdict.certificates = certs
    verdict.degrees = [c.degree for c in certs]
    verdict.justification = (f"{len(certs)} Nullstellensatz certificate(s), "
                             f"max degree {verdict.max_degree_used}")
    return verdict


def rank_tasks(T, r: int, normalize: bool):
    if not normalize:
        return [("full", build_rank_system(T, r))]
    tasks = []
    for rp in range(1, r + 1):
        full = build_rank_system(T, rp)
        for pat in normalization_patterns(T.shape, rp):
            tasks.append((f"r'={rp} pattern {pat.label()}", apply_pattern(full, pat)))
    return tasks


def sym_rank_tasks(S, r: int, normalize: bool):
    if not normalize:
        return [("full", build_sym_rank_system(S, r))]
    tasks = []
    for rp in range(1, r + 1):
        full = build_scaled_sym_rank_system(S, rp)
        for pat in sym_normalization_patterns(S.n, rp):
            tasks.append((f"r'={rp} pattern {pat.label()}", apply_pattern(full, pat)))
    return tasks


def _witness_verdict(T, r, witness, **extra):
    if witness is None or witness.rank > r:
        return None
    if eval_decomposition(witness, T.shape, T.field) != T:
        raise ValueError("supplied witness does not evaluate to the tensor")
    return Verdict(Status.DISPROVED, r, method="witness",
                   justification=f"explicit {witness.rank}-term decomposition", witness=witness,
                   **extra)


def certify_rank_gt(T, r: int, max_degree: int = DEFAULT_MAX_DEGREE, normalize: bool = False,
                    witness=None, workers=None) -> Verdict:
    """Try to prove rank(T) > r over the algebraic closure of T's field.

    Unfolding ranks settle r < max_j r_j immediately.  Otherwise the rank
    system (or, with ``normalize``, every normalized subsystem for every
    r' <= r) must admit a certificate of degree <= ``max_degree``.
    """
    if T.is_zero():
        raise ZeroTensor("rank questions need a nonzero tensor")
    ranks = unfolding_ranks(T)
    if r < max(ranks):
        j = ranks.index(max(ranks)) + 1
        return Verdict(Status.CERTIFIED_GT, r, method="unfolding", normalize=normalize,
                       justification=f"unfolding rank r_{j} = {ranks[j - 1]} > {r}")
    found = _witness_verdict(T, r, witness, normalize=normalize)
    if found is not None:
        return found
    workers = default_workers() if workers is None else workers
    return _nullstellensatz_verdict(rank_tasks(T, r, normalize), r, max_degree, workers,
                                    normalize=normalize)


def certify_srank_gt(S, r: int, max_degree: int = DEFAULT_MAX_DEGREE, normalize: bool = False,
                     witness=None, workers=None) -> Verdict:
    """Symmetric analogue of :func:`certify_rank_gt` for Waring rank.

    With ``normalize`` each term is written t_i x_i^{(x)d} with one coordinate
    of x_i fixed to 1; the scalar t_i keeps the substitution lossless.
    """
    if S.field.is_finite and S.field.order < S.d:
        raise SmallField(f"|F| = {S.field.order} < d = {S.d}")
    if S.is_zero():
        raise ZeroTensor("rank questions need a nonzero tensor")
    T = sym_expand(S)
    ranks = unfolding_ranks(T)
    if r < max(ranks):
        return Verdict(Status.CERTIFIED_GT, r, method="unfolding", symmetric=True,
                       normalize=normalize,
                       justification=f"unfolding rank {max(ranks)} > {r} (srank >= rank)")
    if witness is not None and witness.rank <= r:
        if eval_decomposition(witness, T.shape, T.field) != T:
            raise ValueError("supplied witness does not evaluate to the tensor")
        return Verdict(Status.DISPROVED, r, method="witness", symmetric=True,
                       justification=f"explicit {witness.rank}-term Waring decomposition",
                       witness=witness, normalize=normalize)
    workers = default_workers() if workers is None else workers
    return _nullstellensatz_verdict(sym_rank_tasks(S, r, normalize), r, max_degree, workers,
                                    normalize=normalize, symmetric=True)


# ------------------------------------------------------------ complexity


def kollar_degree_bound(d: int, M: int) -> int:
    """d^(M-1), the cofactor degree that guarantees completeness."""
    return d ** (M - 1)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def monomial_bound_holds(d: int, M: int) -> bool:
    """C(M + d^(M-1), M) <= ceil(e * d^(M(M-1))), checked with exact integers."""
    return math.comb(M + d ** (M - 1), M) <= _ceil(E_UPPER * d ** (M * (M - 1)))


@dataclass
class ComplexityReport:
    shape: tuple
    r: int
    symmetric: bool
    variables: int
    equations: int
    kollar_bound: int
    monomials_per_cofactor: int
    monomial_bound: int
    linear_variable_bound: int
    flop_exponent: int
    reduced_variables: int
    pattern_multiplier: int
    reduced_flop_exponent: int
    generator_bound: int | None = None

    def lines(self) -> list:
        d = len(self.shape)
        out = [
            f"shape {' '.join(map(str, self.shape))}",
            f"rank r {self.r}",
            f"symmetric {'yes' if self.symmetric else 'no'}",
            f"variables M {self.variables}",
            f"equations {self.equations}",
            f"kollar-degree-bound {d}^{self.variables - 1} = {self.kollar_bound}",
            f"monomials-per-cofactor C(M+{d}^(M-1),M) = {self.monomials_per_cofactor}",
            f"monomial-bound ceil(e*{d}^(M(M-1))) = {self.monomial_bound}",
            f"linear-variable-bound {self.linear_variable_bound}",
            f"flops O(equations * {d}^{self.flop_exponent})",
            f"reduced-variables {self.reduced_variables}",
            f"pattern-multiplier {self.pattern_multiplier}",
            f"reduced-flops O({self.pattern_multiplier} * {d}^{self.reduced_flop_exponent})",
            f"bruteforce-over-GF(q) O(q^{self.variables})",
            f"randomized-over-GF(q) O(q^((1-delta)*{self.variables})), delta(2)~0.1135",
        ]
        if self.generator_bound is not None:
            out.insert(5, f"generator-bound min(n^d,(d+1)^(n-1)) = {self.generator_bound}")
        return out


def complexity_estimate(shape, r: int, symmetric: bool = False) -> ComplexityReport:
    """Exact big-integer figures for the certificate route at rank r."""
    shape = tuple(shape)
    d = len(shape)
    if symmetric:
        n = shape[0]
        M = n * r
        K = math.comb(n + d - 1, d)
        gen_bound = min(n ** d, (d + 1) ** (n - 1))
        reduced = M  # one coordinate fixed, one scalar added per term
        multiplier = n ** r
    else:
        M = r * sum(shape)
        K = math.prod(shape)
        gen_bound = None
        reduced = M - r * (d - 1)
        multiplier = math.prod(shape[:-1]) ** r
    kollar = kollar_degree_bound(d, M)
    power = d ** (M * (M - 1))
    return ComplexityReport(
        shape=shape, r=r, symmetric=symmetric, variables=M, equations=K,
        kollar_bound=kollar,
        monomials_per_cofactor=math.comb(M + kollar, M),
        monomial_bound=_ceil(E_UPPER * power),
        linear_variable_bound=_ceil(E_UPPER * K * power),
        flop_exponent=3 * M * (M - 1),
        reduced_variables=reduced,
        pattern_multiplier=multiplier,
        reduced_flop_exponent=3 * reduced * (reduced - 1),
        generator_bound=gen_bound,
    )
