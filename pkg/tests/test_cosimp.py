import random

import pytest
from hypothesis import given, settings, strategies as st

from longknots import cosimp as C
from longknots.fanic import ass_to_poisson, build_fanic, phi_functor
from longknots.hochschild import homology_cosimplicial
from longknots.linalg import ChainComplexDims, SparseMatrix, homology_dims


def test_categories_validate():
    for n in range(3):
        C.delta_category(n).validate()
    C.p0_category(2).validate()
    assert C.delta_category(2).is_poset is False
    assert C.p0_category(2).is_poset


def test_constant_conormalization():
    N = C.conormalize(C.CosimplicialVS.constant(3))
    assert list(N.spaces) == [1, 0, 0, 0]
    assert homology_dims(C.truncate_cochain(N, 0)) == [1]


def test_truncation_trivial_cases():
    cx = ChainComplexDims([1, 1, 0], [SparseMatrix.identity(1), SparseMatrix.zero(0, 1)])
    assert C.truncate_cochain(cx, 5) is cx
    t = C.truncate_cochain(cx, 0)
    assert list(t.spaces) == [1] and homology_dims(t) == [1]
    with pytest.raises(ValueError):
        C.truncate_cochain(cx, -1)


def test_identity_violation_rejected():
    X = C.CosimplicialVS.constant(2)
    bad = [list(r) for r in X.cofaces]
    bad[1][0] = SparseMatrix.zero(1, 1)
    with pytest.raises(C.IdentityViolation):
        C.CosimplicialVS(X.spaces, bad, X.codegeneracies)


def test_functoriality_violation_rejected():
    shape = C.poset_category([0, 1, 2], lambda a, b: a <= b)
    one = SparseMatrix.identity(1)
    maps = {m: one for m in shape.morphisms}
    maps[(0, 2)] = SparseMatrix.zero(1, 1)
    with pytest.raises(C.FunctorialityViolation):
        C.FiniteDiagram(shape, {0: 1, 1: 1, 2: 1}, maps)


def test_replacement_of_point_is_constant():
    F = C.FiniteDiagram.constant(C.point_category(), 2)
    X = C.cosimplicial_replacement(F, 3)
    assert X.spaces == [2, 2, 2, 2]
    assert all(m == SparseMatrix.identity(2) for row in X.cofaces for m in row)


def test_replacement_level_counts_delta1():
    X = homology_cosimplicial(4, 1, 0)
    F = X.restrict(1)
    R = C.cosimplicial_replacement(F, 2)
    for p in range(3):
        chains = C.nerve_chains(F.shape, p)
        assert R.spaces[p] == len(chains)   # every value is one-dimensional
    assert len(C.nerve_chains(F.shape, 1)) == 1 + 2 + 1 + 3


def test_replacement_identities_on_fanic_values():
    D = build_fanic(ass_to_poisson(4, 4), 2).diagram(weight=1)
    C.cosimplicial_replacement(D, 2)   # constructor checks every identity


def test_lim_delta1():
    F = homology_cosimplicial(4, 1, 0).restrict(1)
    for method in ("replacement", "nerve", "resolution"):
        assert C.lim_p(F, 2, method=method) == [1, 0, 0]


def test_methods_agree_on_delta2():
    for k in range(3):
        F = homology_cosimplicial(4, 2, k).restrict(2)
        assert C.lim_p(F, 2, "nerve") == C.lim_p(F, 2, "resolution") == C.lim_p(F, 2, "replacement")


def test_methods_agree_on_posets():
    D = build_fanic(ass_to_poisson(4, 4), 2)
    for w in range(2):
        F = D.diagram(w)
        assert C.lim_p(F, 3, "nerve") == C.lim_p(F, 3, "resolution")


def _random_chain_diagram(rnd, dims):
    shape = C.poset_category(list(range(len(dims))), lambda a, b: a <= b)
    step = [SparseMatrix(dims[i + 1], dims[i], {(r, c): rnd.randint(-2, 2) for r in range(dims[i + 1]) for c in range(dims[i])})
            for i in range(len(dims) - 1)]
    maps = {}
    for a, b in shape.morphisms:
        m = SparseMatrix.identity(dims[a])
        for i in range(a, b):
            m = step[i] @ m
        maps[(a, b)] = m
    return C.FiniteDiagram(shape, dict(enumerate(dims)), maps)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_initial_object_concentrates(dims, rnd):
    F = _random_chain_diagram(rnd, dims)
    assert C.lim_p(F, 2) == [dims[0], 0, 0]
    assert C.lim_zero_literal(F) == dims[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 3), st.randoms(use_true_random=False))
def test_lim_zero_is_literal_limit(k, rnd):
    F = homology_cosimplicial(4, 2, k).restrict(2)
    assert C.lim_p(F, 0)[0] == C.lim_zero_literal(F)
    D = build_fanic(ass_to_poisson(4, 4), 2).diagram(min(k, 1))
    assert C.lim_p(D, 0)[0] == C.lim_zero_literal(D)


def test_lim_invariant_under_relabelling():
    F = homology_cosimplicial(4, 2, 1).restrict(2)
    G = F.relabel({0: "a", 1: "b", 2: "c"})
    assert C.lim_p(F, 3) == C.lim_p(G, 3)
    D = build_fanic(ass_to_poisson(4, 4), 2).diagram(1)
    rnd = random.Random(3)
    objs = list(D.shape.objects)
    names = objs[:]
    rnd.shuffle(names)
    assert C.lim_p(D, 3) == C.lim_p(D.relabel({o: ("x", n) for o, n in zip(objs, names)}), 3)


def test_constant_on_terminal_shape():
    F = C.FiniteDiagram.constant(C.p0_category(2))
    assert C.lim_p(F, 2) == [1, 0, 0]


@pytest.mark.parametrize("n", range(4))
def test_truncation_lemma(n):
    for k in range(n + 1):
        X = homology_cosimplicial(4, n, k)
        lim = C.lim_p(X.restrict(n), n + 1)
        trunc = homology_dims(C.truncate_cochain(C.conormalize(X), n))
        assert lim == trunc + [0] * (len(lim) - len(trunc))


@pytest.mark.parametrize("n", range(3))
def test_cofinal_compare(n):
    diags = {k: homology_cosimplicial(4, n, k).restrict(n) for k in range(n + 2)}
    rep = C.cofinal_compare(diags, phi_functor(n), n + 1, n)
    assert rep.passed, rep.as_dict()


def test_functor_validation():
    for n in range(3):
        phi_functor(n).validate()
