from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trc.errors import DimensionMismatch, InvalidRank, SmallField, VariableMismatch
from trc.exact_arith import QQ, QQI, GaloisField, GaussianRational
from trc.poly_system import (
    Poly,
    apply_pattern,
    build_rank_system,
    build_sym_rank_system,
    build_sym_rank_system_ff,
    count_patterns,
    eval_system,
    extend_assignment,
    format_poly,
    normalization_patterns,
    parse_poly,
    sym_normalization_patterns,
)
from trc.tensor_core import Decomposition, DenseTensor, SymTensor, eval_decomposition


def e111(field=QQ):
    return DenseTensor.from_dict((2, 2, 2), field, {(0, 0, 0): 1})


def x(k, m=1):
    return Poly.variable(m, QQ, k)


def test_poly_arithmetic_examples():
    one = Poly.constant(1, QQ, 1)
    assert (x(0) + one) * (x(0) - one) == Poly(1, QQ, {(2,): 1, (0,): -1})
    assert (x(0) * Poly(1, QQ)).is_zero()
    with pytest.raises(VariableMismatch):
        x(0) + Poly.variable(2, QQ, 0)
    with pytest.raises(VariableMismatch):
        x(0) * Poly.variable(1, GaloisField(2), 0)


def dense_mul_oracle(a: dict, b: dict, m: int, deg: int):
    """Multiply via dense coefficient arrays indexed by every exponent vector."""
    box = list(itertools.product(range(deg + 1), repeat=m))
    A = {e: a.get(e, 0) for e in box}
    B = {e: b.get(e, 0) for e in box}
    out = {}
    for ea in box:
        for eb in box:
            if A[ea] and B[eb]:
                e = tuple(i + j for i, j in zip(ea, eb))
                out[e] = out.get(e, 0) + A[ea] * B[eb]
    return {e: c for e, c in out.items() if c}


sparse_poly = st.integers(1, 4).flatmap(lambda m: st.tuples(
    st.just(m),
    st.dictionaries(st.lists(st.integers(0, 2), min_size=m, max_size=m).map(tuple),
                    st.integers(-5, 5), max_size=6),
    st.dictionaries(st.lists(st.integers(0, 3), min_size=m, max_size=m).map(tuple),
                    st.integers(-5, 5), max_size=6)))


@settings(max_examples=60)
@given(sparse_poly)
def test_product_matches_dense_convolution(data):
    m, a, b = data
    a = {e: c for e, c in a.items() if sum(e) <= 5}
    b = {e: c for e, c in b.items() if sum(e) <= 5}
    got = Poly(m, QQ, a) * Poly(m, QQ, b)
    want = dense_mul_oracle({e: c for e, c in a.items() if c}, {e: c for e, c in b.items() if c}, m, 5)
    assert got.terms == want
    assert all(c != 0 for c in got.terms.values())


@settings(max_examples=40)
@given(sparse_poly)
def test_format_parse_round_trip(data):
    m, a, _ = data
    p = Poly(m, QQ, a)
    assert parse_poly(format_poly(p), m, QQ) == p


def test_format_parse_other_fields():
    q = Poly(2, QQI, {(1, 0): GaussianRational(Fraction(1, 2), -1), (0, 1): GaussianRational(0, 3),
                      (0, 0): GaussianRational(-2, 0)})
    assert parse_poly(format_poly(q), 2, QQI) == q
    F = GaloisField(2, 3)
    r = Poly(2, F, {(2, 1): F.element(5), (0, 0): F.element(3)})
    assert format_poly(r) == "[1,0,1]*v0^2*v1 + [1,1,0]"
    assert parse_poly(format_poly(r), 2, F) == r


def test_rank_system_examples():
    sys = build_rank_system(e111(), 1)
    assert (len(sys.gens), sys.nvars) == (8, 6)
    assert sys.gens[0] == Poly(6, QQ, {(1, 0, 1, 0, 1, 0): 1, (0,) * 6: -1})
    assert sys.names()[:3] == ["x1,1[1]", "x1,1[2]", "x2,1[1]"]
    assert build_rank_system(e111(), 2).nvars == 12
    with pytest.raises(InvalidRank):
        build_rank_system(e111(), 0)


def test_rank_system_structure():
    rng = random.Random(3)
    shape = (2, 3, 2)
    T = DenseTensor.from_entries(shape, QQ, [rng.randint(-2, 2) for _ in range(12)])
    for r in (1, 2, 3):
        sys = build_rank_system(T, r)
        assert len(sys.gens) == 12 and sys.nvars == r * 7
        for g in sys.gens:
            assert g.degree == 3
            for e in g.terms:
                if any(e):
                    per_mode = [sum(e[t * 7 + o: t * 7 + o + n]) for t in range(r)
                                for o, n in ((0, 2), (2, 3), (5, 2))]
                    assert set(per_mode) <= {0, 1} and sum(e) == 3


def _assignment(dec, shape):
    return [a for term in dec.terms for vec in term for a in vec]


def test_eval_system_examples():
    rng = random.Random(5)
    shape = (2, 2, 3)
    terms = [[[rng.randint(-3, 3) for _ in range(n)] for n in shape] for _ in range(2)]
    dec = Decomposition(terms)
    T = eval_decomposition(dec, shape, QQ)
    sys = build_rank_system(T, 2)
    assert eval_system(sys, _assignment(dec, shape)) == [0] * 12
    assert eval_system(sys, [0] * sys.nvars) == [-v for v in T.entries]
    swapped = Decomposition(terms[::-1])
    vals = [Fraction(rng.randint(-3, 3)) for _ in range(sys.nvars)]
    half = sys.nvars // 2
    assert eval_system(sys, vals) == eval_system(sys, vals[half:] + vals[:half])
    assert eval_system(sys, _assignment(swapped, shape)) == [0] * 12
    with pytest.raises(DimensionMismatch):
        eval_system(sys, [0])


def naive_eval(p: Poly, vals):
    total = Fraction(0)
    for e, c in p.terms.items():
        term = Fraction(c)
        for v, a in zip(vals, e):
            term *= Fraction(v) ** a
        total += term
    return total


def test_eval_matches_naive_evaluator():
    rng = random.Random(6)
    T = DenseTensor.from_entries((2, 2, 2), QQ, [rng.randint(-2, 2) for _ in range(8)])
    sys = build_rank_system(T, 2)
    for _ in range(10):
        vals = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(sys.nvars)]
        assert eval_system(sys, vals) == [naive_eval(g, vals) for g in sys.gens]


def test_sym_system_examples():
    S = SymTensor.from_dict(2, 3, QQ, {(3, 0): 1})
    sys = build_sym_rank_system(S, 1)
    assert (len(sys.gens), sys.nvars) == (4, 2)
    assert sys.gens[0] == Poly(2, QQ, {(3, 0): 1, (0, 0): -1})
    assert build_sym_rank_system(S, 3).nvars == 6
    for n in range(1, 5):
        for d in range(2, 5):
            Z = SymTensor.zeros(n, d, QQ)
            assert len(build_sym_rank_system(Z, 2).gens) == math.comb(n + d - 1, d)
    with pytest.raises(SmallField):
        build_sym_rank_system(SymTensor.zeros(2, 3, GaloisField(2)), 1)


def test_scaled_sym_system_examples():
    G2 = GaloisField(2)
    S = SymTensor.from_dict(2, 3, G2, {(3, 0): 1})
    sys = build_sym_rank_system_ff(S, 2)
    assert sys.nvars == 6 and sys.names()[:2] == ["t1", "t2"]
    assert eval_system(build_sym_rank_system_ff(S, 1), [1, 1, 0]) == [0] * 4
    zero_t = eval_system(sys, [0, 0, 1, 1, 1, 0])
    assert zero_t == [-v for v in S.ordered()]


def test_normalization_patterns():
    assert count_patterns((2, 2, 2), 1) == len(list(normalization_patterns((2, 2, 2), 1))) == 4
    assert len(list(normalization_patterns((2, 2, 2), 2))) == 16
    assert len(list(normalization_patterns((2, 3, 4), 2))) == 36
    T = e111()
    sys = build_rank_system(T, 2)
    for pat in normalization_patterns((2, 2, 2), 2):
        assert apply_pattern(sys, pat).nvars == 8
    assert len(list(sym_normalization_patterns(3, 2))) == 9


def test_pattern_solution_extends():
    T = e111()
    sys = build_rank_system(T, 1)
    pat = next(iter(normalization_patterns((2, 2, 2), 1)))
    sub = apply_pattern(sys, pat)
    values = [0, 0, 1, 0]  # x1[2], x2[2], x3[1], x3[2]
    assert eval_system(sub, values) == [0] * 8
    full = extend_assignment(sys, pat, values)
    assert full == [1, 0, 1, 0, 1, 0]
    assert eval_system(sys, full) == [0] * 8
