import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from longknots import confalg
from longknots.confalg import (
    CohClass,
    GlobalConfig,
    IndexOutOfRange,
    basis,
    codegeneracy_pullback,
    coface_pullback,
    dimension,
    insertion_pullback,
    multiply,
    normalize,
    normalize_by_row_reduction,
    normalize_word,
    relation_quotient_dim,
    stirling_dims,
)
from longknots.linalg import SparseMatrix


def poly_coeffs(n):
    out = [1]
    for m in range(1, n):
        out = [a + m * b for a, b in itertools.zip_longest(out + [0], [0] + out, fillvalue=0)]
    return out


@pytest.mark.parametrize("n", range(0, 7))
def test_dimensions_are_stirling(n):
    dims = [dimension(n, k) for k in range(max(n, 1))]
    assert dims == poly_coeffs(max(n, 1)) or n == 0
    assert sum(stirling_dims(n)) == math.factorial(n)


def test_small_bases():
    assert basis(3, 2) == (((1, 2), (1, 3)), ((1, 2), (2, 3)))
    assert dimension(2, 1) == 1
    assert dimension(4, 0) == 1


def test_global_config():
    assert GlobalConfig(4).symmetry_sign == 1
    assert GlobalConfig(3).symmetry_sign == -1
    assert GlobalConfig(5).generator_degree == 4
    with pytest.raises(ValueError):
        GlobalConfig(2)


@pytest.mark.parametrize("d", [3, 4])
def test_arnold_relation_vanishes(d):
    terms = [[(1, 2), (2, 3)], [(2, 3), (3, 1)], [(3, 1), (1, 2)]]
    acc = normalize(3, [((1, 2), 1), ((2, 3), 1)], d)
    for w in terms[1:]:
        acc = acc + normalize(3, [(g, 1) for g in w], d)
    assert acc.is_zero()


@pytest.mark.parametrize("d", [3, 4])
def test_square_is_zero(d):
    assert normalize(2, [((1, 2), 1), ((1, 2), 1)], d).is_zero()


def test_symmetry_sign():
    assert normalize_word([(2, 1)], 3) == {((1, 2),): -1}
    assert normalize_word([(2, 1)], 4) == {((1, 2),): 1}


def test_index_errors():
    with pytest.raises(IndexOutOfRange):
        normalize(2, [((1, 3), 1)], 4)
    with pytest.raises(IndexOutOfRange):
        coface_pullback(5, 3, 4)
    with pytest.raises(IndexOutOfRange):
        insertion_pullback(0, 2, 2, 4)


def words(n, kmax):
    pair = st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda p: p[0] != p[1])
    return st.lists(pair, min_size=0, max_size=kmax)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), words(n, n - 1))), st.sampled_from([3, 4]))
def test_rewriting_agrees_with_row_reduction(nw, d):
    n, word = nw
    fast = normalize_word(word, d)
    slow = normalize_by_row_reduction(word, n, d)
    assert fast == slow


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("d", [3, 4])
def test_quotient_dimension_oracle(n, d):
    for k in range(n):
        assert relation_quotient_dim(n, k, d) == dimension(n, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(st.just(n), words(n, 2), words(n, 2), words(n, 2))), st.sampled_from([3, 4]))
def test_product_associative_and_graded_commutative(data, d):
    n, a, b, c = data
    A = normalize(n, [(g, 1) for g in a], d)
    B = normalize(n, [(g, 1) for g in b], d)
    C = normalize(n, [(g, 1) for g in c], d)
    assert multiply(multiply(A, B), C) == multiply(A, multiply(B, C))
    sign = -1 if (d % 2 == 0 and len(a) * len(b) % 2) else 1
    BA = multiply(B, A)
    assert multiply(A, B) == (BA if sign == 1 else -BA)


@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("n", range(0, 4))
def test_coface_pullbacks_are_algebra_maps(d, n):
    # the pullback of a product is the product of the pullbacks
    for i in range(n + 2):
        for k1 in range(n + 1):
            for k2 in range(n + 1 - k1):
                for m1 in basis(n + 1, k1):
                    for m2 in basis(n + 1, k2):
                        prod = normalize_word(m1 + m2, d)
                        lhs = coface_pullback(i, n, d, k=k1 + k2).apply({confalg.basis_index(n + 1, k1 + k2)[m]: c for m, c in prod.items()}) if k1 + k2 < max(n + 1, 1) else {}
                        a = coface_pullback(i, n, d, k=k1).apply({confalg.basis_index(n + 1, k1)[m1]: 1})
                        b = coface_pullback(i, n, d, k=k2).apply({confalg.basis_index(n + 1, k2)[m2]: 1})
                        A = CohClass(n, k1, d, {basis(n, k1)[t]: c for t, c in a.items()})
                        B = CohClass(n, k2, d, {basis(n, k2)[t]: c for t, c in b.items()})
                        rhs = multiply(A, B)
                        if k1 + k2 >= max(n, 1):
                            assert rhs.is_zero()
                        else:
                            assert {basis(n, k1 + k2)[t]: c for t, c in lhs.items()} == rhs.terms


@pytest.mark.parametrize("d", [3, 4])
def test_insertion_of_unit_is_forgetting(d):
    for p in range(1, 5):
        for j in range(1, p + 1):
            for k in range(p - 1):
                assert insertion_pullback(j, p, 0, d, k=k) == codegeneracy_pullback(j, p, d, k=k)


@pytest.mark.parametrize("d", [3, 4])
def test_insertion_weight_zero(d):
    # the unit class pulls back to unit (x) unit
    for p, q in [(2, 2), (3, 2), (2, 3)]:
        for i in range(1, p + 1):
            m = insertion_pullback(i, p, q, d, k=0)
            assert m.shape == (1, 1) and m.get(0, 0) == 1


def test_parity_caching_is_consistent():
    assert coface_pullback(1, 3, 4) == coface_pullback(1, 3, 6)
    assert coface_pullback(1, 3, 3) == coface_pullback(1, 3, 5)
