from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trc.errors import ModeOutOfRange, NonCubical, NotSymmetric, ShapeMismatch, SmallCharacteristic, ZeroTensor
from trc.exact_arith import QQ, GaloisField
from trc.ff_search import rank_over_Fq
from trc.io import parse_decomposition
from trc.poly_system import Poly
from trc.tensor_core import (
    Decomposition,
    DenseTensor,
    Shape,
    SymTensor,
    apply_bases,
    compress,
    eval_decomposition,
    exponent_vectors,
    fold,
    is_symmetric,
    matrix_multiplication_tensor,
    poly_of_sym,
    rank_bounds,
    sym_expand,
    sym_of_poly,
    sym_pack,
    unfold,
    unfolding_rank,
    unfolding_ranks,
)

DATA = Path(__file__).resolve().parent.parent / "data"


def W(field=QQ, n=2):
    return DenseTensor.from_dict((n, n, n), field, {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1})


def e111(field=QQ, n=2):
    return DenseTensor.from_dict((n, n, n), field, {(0, 0, 0): 1})


def det2(a, b, c, d):
    return a * d - b * c


def test_shape_quantities():
    s = Shape((2, 3, 4))
    assert (s.d, s.N, s.L) == (3, 24, 9)
    assert list(s.multi_indices())[:3] == [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
    assert s.linear((1, 2, 3)) == 1 + 2 * 2 + 3 * 6
    with pytest.raises(ShapeMismatch):
        Shape((3,))


def test_unfold_examples():
    assert unfold(e111(), 1).rows == ((1, 0, 0, 0), (0, 0, 0, 0))
    U = unfold(W(), 1)
    assert U.shape == (2, 4)
    minors = [det2(U[0, a], U[0, b], U[1, a], U[1, b]) for a, b in itertools.combinations(range(4), 2)]
    assert any(minors)
    with pytest.raises(ModeOutOfRange):
        unfold(W(), 4)
    with pytest.raises(ModeOutOfRange):
        unfold(W(), 0)


def random_tensor(rng, shape, field=QQ):
    n = math.prod(shape)
    return DenseTensor.from_entries(shape, field, [Fraction(rng.randint(-3, 3)) for _ in range(n)])


def test_fold_round_trip_and_rank_bound():
    rng = random.Random(1)
    for _ in range(20):
        shape = tuple(rng.randint(1, 3) for _ in range(rng.randint(2, 4)))
        T = random_tensor(rng, shape)
        for j in range(1, len(shape) + 1):
            assert fold(unfold(T, j), shape, j) == T
            nj = shape[j - 1]
            assert unfolding_rank(T, j) <= min(nj, math.prod(shape) // nj)


def test_unfolding_rank_examples():
    assert unfolding_ranks(DenseTensor.zeros((2, 2, 2), QQ)) == (0, 0, 0)
    assert unfolding_ranks(e111()) == (1, 1, 1)
    assert unfolding_ranks(W()) == (2, 2, 2)


def test_compress_examples():
    rng = random.Random(4)
    T = random_tensor(rng, (2, 2, 2))
    core, bases = compress(T)
    assert core.shape == (2, 2, 2) and apply_bases(core, bases) == T
    core, _ = compress(e111(n=3))
    assert core.shape == (1, 1, 1)
    core, bases = compress(W(n=3))
    assert core.shape == (2, 2, 2)
    assert unfolding_ranks(core) == (2, 2, 2)
    assert apply_bases(core, bases) == W(n=3)
    with pytest.raises(ZeroTensor):
        compress(DenseTensor.zeros((2, 2), QQ))


def test_compress_round_trip_random_low_rank():
    rng = random.Random(9)
    for _ in range(15):
        shape = (rng.randint(2, 4), rng.randint(2, 4), rng.randint(2, 3))
        terms = [[[rng.randint(-2, 2) for _ in range(n)] for n in shape] for _ in range(rng.randint(1, 2))]
        T = eval_decomposition(Decomposition(terms), shape, QQ)
        if T.is_zero():
            continue
        core, bases = compress(T)
        assert tuple(core.shape) == unfolding_ranks(T) == unfolding_ranks(core)
        assert apply_bases(core, bases) == T


def test_rank_bounds_examples():
    assert rank_bounds(W()) == (2, 4)
    assert rank_bounds(e111()) == (1, 1)
    T = DenseTensor.from_dict((2, 2, 3), QQ, {(0, 0, 0): 1, (1, 0, 1): 1, (0, 1, 2): 1, (1, 1, 0): 1})
    assert unfolding_ranks(T) == (2, 2, 3)
    assert rank_bounds(T) == (3, 4)
    with pytest.raises(ZeroTensor):
        rank_bounds(DenseTensor.zeros((2, 2, 2), QQ))


def test_decomposition_rank_dominates_unfoldings():
    rng = random.Random(2)
    for _ in range(20):
        r = rng.randint(1, 3)
        shape = (3, 3, 2)
        terms = [[[rng.randint(-2, 2) for _ in range(n)] for n in shape] for _ in range(r)]
        T = eval_decomposition(Decomposition(terms), shape, QQ)
        assert max(unfolding_ranks(T)) <= r


def test_compression_preserves_rank_over_gf2():
    G2 = GaloisField(2)
    for bits in range(1, 256, 7):
        values = {}
        for k, idx in enumerate(Shape((2, 2, 2)).multi_indices()):
            if bits >> k & 1:
                values[idx] = 1
        small = DenseTensor.from_dict((2, 2, 2), G2, values)
        big = DenseTensor.from_dict((3, 3, 3), G2, {tuple(2 - i for i in idx): 1 for idx in values})
        core, _ = compress(big)
        assert rank_over_Fq(core) == rank_over_Fq(big) == rank_over_Fq(small)


def test_symmetry_examples():
    assert is_symmetric(W())
    assert not is_symmetric(DenseTensor.from_dict((2, 2, 2), QQ, {(0, 0, 1): 1}))
    with pytest.raises(NonCubical):
        is_symmetric(DenseTensor.zeros((2, 3), QQ))
    with pytest.raises(NotSymmetric):
        sym_pack(DenseTensor.from_dict((2, 2, 2), QQ, {(0, 0, 1): 1}))


def test_sym_pack_expand_examples():
    Z = SymTensor.zeros(2, 3, QQ)
    assert sym_expand(Z).is_zero() and sym_pack(sym_expand(Z)) == Z
    S = SymTensor.from_dict(2, 3, QQ, {(3, 0): 1})
    assert sym_expand(S) == e111()
    assert sym_pack(W()) == SymTensor.from_dict(2, 3, QQ, {(2, 1): 1})


def random_sym(rng, n, d, field=QQ):
    return SymTensor.from_dict(n, d, field, {e: Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                                             for e in exponent_vectors(n, d)})


def test_sym_round_trips_random():
    rng = random.Random(8)
    for _ in range(30):
        n, d = rng.randint(1, 4), rng.randint(2, 4)
        S = random_sym(rng, n, d)
        assert is_symmetric(sym_expand(S))
        assert sym_pack(sym_expand(S)) == S
        assert sym_of_poly(poly_of_sym(S), n, d) == S


def test_poly_sym_examples():
    f = Poly(2, QQ, {(2, 0): 1, (1, 1): 2})
    S = sym_of_poly(f, 2, 2)
    M = sym_expand(S)
    assert [[M[(i, j)] for j in range(2)] for i in range(2)] == [[1, 1], [1, 0]]
    assert sym_expand(sym_of_poly(Poly(2, QQ, {(3, 0): 1}), 2, 3)) == e111()
    with pytest.raises(SmallCharacteristic):
        sym_of_poly(Poly(2, GaloisField(3), {(3, 0): 1}), 2, 3)
    with pytest.raises(ShapeMismatch):
        sym_of_poly(Poly(2, QQ, {(1, 0): 1}), 2, 3)


def test_sym_dim_count():
    for n in range(1, 9):
        for d in range(1, 9):
            assert len(exponent_vectors(n, d)) == math.comb(n + d - 1, d)


def test_eval_decomposition_examples():
    assert eval_decomposition(Decomposition(()), (2, 2, 2), QQ).is_zero()
    e1 = (1, 0)
    assert eval_decomposition(Decomposition([(e1, e1, e1)]), (2, 2, 2), QQ) == e111()
    with pytest.raises(ShapeMismatch):
        eval_decomposition(Decomposition([(e1, e1)]), (2, 2, 2), QQ)
    scaled = Decomposition([(e1, e1, e1)], scales=(3,))
    assert eval_decomposition(scaled, (2, 2, 2), QQ)[(0, 0, 0)] == 3


def test_matrix_multiplication_tensor_is_the_bilinear_map():
    T = matrix_multiplication_tensor(2, 3, 2, QQ)
    rng = random.Random(0)
    A = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(2)]
    B = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(3)]
    a = [A[i][j] for i in range(2) for j in range(3)]
    b = [B[j][k] for j in range(3) for k in range(2)]
    C = [sum(T[(x, y, z)] * a[x] * b[y] for x in range(6) for y in range(6)) for z in range(4)]
    assert C == [sum(A[i][j] * B[j][k] for j in range(3)) for i in range(2) for k in range(2)]


def test_strassen_decomposition():
    dec = parse_decomposition((DATA / "strassen.txt").read_text(), QQ, 3)
    assert dec.rank == 7
    assert eval_decomposition(dec, (4, 4, 4), QQ) == matrix_multiplication_tensor(2, 2, 2, QQ)


@settings(max_examples=30)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_tensor_addition_is_entrywise(vals):
    T = DenseTensor.from_entries((2, 2, 2), QQ, vals)
    assert (T - T).is_zero()
    assert (T + T).entries == tuple(2 * v for v in vals)
