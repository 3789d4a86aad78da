import pytest
from hypothesis import given, strategies as st

from longknots import hochschild as H
from longknots.cosimp import conormalize
from longknots.linalg import homology_dims


@pytest.mark.parametrize("d", [3, 4, 5])
def test_e1_is_a_complex(d):
    # construction asserts delta^2 = 0
    cx = H.e1_complex(d, 6)
    assert set(cx) == {k * (d - 1) for k in range(6)}


def test_weight_one_strand():
    cx = H.e1_complex(4, 4, weights=[1])[3]
    assert list(cx.spaces) == [0, 0, 1, 3, 6]
    assert homology_dims(cx)[1:4] == [0, 1, 0]


@pytest.mark.parametrize("d", [4, 5])
def test_low_columns(d):
    page = H.e2_page(d, 4)
    assert page.get(0, 0) == 1
    assert not [c for c in page.cells() if c[0] == 1]
    assert [(q, v) for p, q, v in page.cells() if p == 2] == [(d - 1, 1)]


def test_provisional_column_flagged():
    page = H.e2_page(4, 3)
    assert all(p == 3 for p, q in page.provisional)
    assert (2, 3) not in page.provisional


def test_two_prime_provenance():
    page = H.e2_page(4, 7, prime_policy="two-prime", weights=[2, 3])
    assert page.provenance[(7, 6)] == "modular"
    assert page.provenance[(6, 9)] == "modular"   # touched by the 6 -> 7 differential
    assert page.provenance[(5, 6)] == "exact"
    assert not page.disagreements
    exact = H.e2_page(4, 7, weights=[2, 3])
    assert exact.entries == page.entries


def test_reverse_basis_order_invariant():
    for q, cx in H.e1_complex(4, 5).items():
        rev = H.e1_complex(4, 5, reverse=True)[q]
        assert homology_dims(cx) == homology_dims(rev)


@pytest.mark.parametrize("d", [4, 5])
def test_above_diagonal(d):
    rep = H.check_above_diagonal(d, 5)
    assert rep.passed, rep.failures


def test_normalized_dims_match_conormalization():
    table = H.normalized_e1_dims(4, 3)
    for k in range(3):
        N = conormalize(H.homology_cosimplicial(4, 3, k))
        for p in range(4):
            assert N.spaces[p] == table.weight(p, k)


@pytest.mark.parametrize("d", [3, 4])
def test_normalization_theorem(d):
    for k in range(4):
        X = H.homology_cosimplicial(d, 4, k)
        assert homology_dims(conormalize(X))[:4] == homology_dims(H.e1_complex(d, 4, weights=[k])[k * (d - 1)])[:4]


def test_series_division():
    a = H.PoincareSeries({0: 1, 1: 1, 2: 1}, 2)
    b = H.PoincareSeries({0: 1, 1: 1}, 2)
    assert a.divide(b).as_list() == [1, 0, 1]
    with pytest.raises(H.SeriesDivisionFailure):
        H.PoincareSeries({0: 1}, 2).divide(b)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=6), st.lists(st.integers(0, 5), min_size=1, max_size=6))
def test_series_division_inverts_product(a, b):
    a[0] = max(a[0], 1)
    b[0] = 1
    top = min(len(a), len(b)) - 1
    A = H.PoincareSeries(dict(enumerate(a)), top)
    B = H.PoincareSeries(dict(enumerate(b)), top)
    assert (A * B).divide(B).as_list() == A.as_list()[: top + 1]


def test_loop_sphere_series():
    assert H.loop_sphere_series(4, 4).as_list() == [1, 1, 0, 0, 0]
    assert H.loop_sphere_series(5, 7).as_list() == [1, 0, 1, 0, 1, 1, 1, 1]


def test_knot_tables():
    bar, emb = H.knot_betti_table(4, 2)
    assert bar.as_list() == [1, 1, 1]
    assert emb.as_list() == [1, 0, 1]
    with pytest.raises(ValueError):
        H.knot_betti_table(3, 2)
    with pytest.raises(H.RangeExceeded):
        H.knot_betti_table(4, 3, p_max=5)


def test_range_ceiling():
    with pytest.raises(H.RangeExceeded):
        H.e2_page(4, H.P_CEILING + 1)
    with pytest.raises(ValueError):
        H.e2_page(2, 3)


@pytest.mark.parametrize("pair", [(4, 6), (3, 5)])
def test_parity(pair):
    assert H.parity_compare(*pair, 4).passed
