"""Operads in graded vector spaces and their fanic diagrams.

Only nonsymmetric operads with finite-dimensional components are modelled.
Insertion matrices act on Kronecker-ordered tensor products: basis element
(a, b) of P(p) (x) P(q) has index a * dim P(q) + b.

The Poisson operad POISS_{d-1} is realised as the linear dual of the
configuration-space cohomology algebras: its basis in arity n is dual to
:func:`confalg.full_basis`, and its insertions are transposed insertion
pullbacks.  The associative operad has one basis element in every arity.

A fanic diagram assigns to a fan the tensor product of M(|v|) over its
unlabelled vertices v in preorder, where M is the target at the bead and the
source elsewhere (|v| = number of children).  Contracting the edge from x to
its child y in slot s is x o_s y, with the source factor pushed through the
operad morphism when it meets the bead.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import confalg
from .cosimp import (
    CosimplicialVS,
    FiniteDiagram,
    Functor,
    delta_category,
    lim_p,
    poset_category,
)
from .fans import Fan, FanPoset, enumerate_fans, phi, phi_object, theta
from .linalg import SparseMatrix

__all__ = [
    "FanicError",
    "ObjectMismatch",
    "MorphismMismatch",
    "OperadData",
    "OperadMorphismData",
    "FanicDiagram",
    "FanicReport",
    "associative_operad",
    "poisson_operad",
    "ass_to_poisson",
    "identity_morphism",
    "build_fanic",
    "verify_functoriality",
    "multiplicative_cosimplicial",
    "verify_fanic_vs_truncation",
    "holim_fanic_dims",
    "fan_category",
    "phi_functor",
]

# operad axioms are checked for arity triples with p + q + r <= this
AXIOM_ARITY = 6


class FanicError(Exception):
    pass


class ObjectMismatch(FanicError):
    pass


class MorphismMismatch(FanicError):
    pass


@dataclass
class OperadData:
    """Finite part of a nonsymmetric operad, arities 0..max_arity.

    ``weights[n][t]`` is the internal weight of basis element t of P(n) and
    ``degrees[n][t]`` its homological degree (only the parity matters for
    Koszul signs).
    """

    name: str
    max_arity: int
    dims: List[int]
    weights: List[List[int]]
    degrees: List[List[int]]
    insertion_fn: object  # (i, p, q) -> SparseMatrix
    unit: Dict[int, int]
    _cache: Dict[Tuple[int, int, int], SparseMatrix] = field(default_factory=dict, repr=False)

    def insertion(self, i: int, p: int, q: int) -> SparseMatrix:
        """o_i: P(p) (x) P(q) -> P(p+q-1), 1 <= i <= p."""
        if not (1 <= i <= p) or q < 0 or p + q - 1 > self.max_arity:
            raise FanicError(f"insertion o_{i} on arities ({p}, {q}) out of range")
        key = (i, p, q)
        if key not in self._cache:
            m = self.insertion_fn(i, p, q)
            if m.shape != (self.dims[p + q - 1], self.dims[p] * self.dims[q]):
                raise FanicError(f"insertion {key} has shape {m.shape}")
            self._cache[key] = m
        return self._cache[key]

    def unit_vector(self) -> SparseMatrix:
        return SparseMatrix(self.dims[1], 1, {(t, 0): c for t, c in self.unit.items()})

    def element(self, n: int, coords: Dict[int, int]) -> SparseMatrix:
        return SparseMatrix(self.dims[n], 1, {(t, 0): c for t, c in coords.items() if c})

    def compose_elements(self, i: int, p: int, x: SparseMatrix, q: int, y: SparseMatrix) -> SparseMatrix:
        return self.insertion(i, p, q) @ x.kron(y)

    def check_axioms(self, bound: int = AXIOM_ARITY) -> List[str]:
        """Sequential/parallel associativity and unit laws on small arities.

        Returns a list of failure descriptions (empty when all hold).  The
        Koszul sign for parallel composition uses ``degrees``.
        """
        bad = []
        top = self.max_arity
        ident1 = SparseMatrix.identity
        for p in range(1, top + 1):
            e = self.unit_vector()
            for i in range(1, p + 1):
                if self.insertion(i, p, 1) @ ident1(self.dims[p]).kron(e) != ident1(self.dims[p]):
                    bad.append(f"right unit fails at o_{i}, arity {p}")
        for q in range(0, top + 1):
            if self.insertion(1, 1, q) @ self.unit_vector().kron(ident1(self.dims[q])) != ident1(self.dims[q]):
                bad.append(f"left unit fails at arity {q}")
        for p, q, r in itertools.product(range(1, top + 1), range(0, top + 1), range(0, top + 1)):
            if p + q + r > bound or max(p + q + r - 2, p + q - 1, p + r - 1, q + r - 1) > top:
                continue
            # sequential: (x o_i y) o_{i+j-1} z = x o_i (y o_j z)
            for i in range(1, p + 1):
                for j in range(1, q + 1):
                    lhs = self.insertion(i + j - 1, p + q - 1, r) @ self.insertion(i, p, q).kron(ident1(self.dims[r]))
                    rhs = self.insertion(i, p, q + r - 1) @ ident1(self.dims[p]).kron(self.insertion(j, q, r))
                    if lhs != rhs:
                        bad.append(f"sequential associativity fails at ({p},{q},{r}), i={i}, j={j}")
            # parallel: (x o_i y) o_{j+q-1} z = (-1)^{|y||z|} (x o_j z) o_i y, i < j
            if p >= 2:
                swap = self._swap(q, r)
                for i in range(1, p + 1):
                    for j in range(i + 1, p + 1):
                        lhs = self.insertion(j + q - 1, p + q - 1, r) @ self.insertion(i, p, q).kron(ident1(self.dims[r]))
                        rhs = self.insertion(i, p + r - 1, q) @ self.insertion(j, p, r).kron(ident1(self.dims[q])) @ ident1(self.dims[p]).kron(swap)
                        if lhs != rhs:
                            bad.append(f"parallel associativity fails at ({p},{q},{r}), i={i}, j={j}")
        return bad

    def _swap(self, q: int, r: int) -> SparseMatrix:
        """P(q) (x) P(r) -> P(r) (x) P(q) with the Koszul sign."""
        dq, dr = self.dims[q], self.dims[r]
        entries = {}
        for a in range(dq):
            for b in range(dr):
                s = -1 if (self.degrees[q][a] * self.degrees[r][b]) % 2 else 1
                entries[(b * dq + a, a * dr + b)] = s
        return SparseMatrix(dr * dq, dq * dr, entries)


@dataclass
class OperadMorphismData:
    source: OperadData
    target: OperadData
    maps: List[SparseMatrix]   # maps[n]: source(n) -> target(n)

    def __post_init__(self):
        for n, m in enumerate(self.maps):
            if m.shape != (self.target.dims[n], self.source.dims[n]):
                raise FanicError(f"component {n} of the morphism has shape {m.shape}")

    def check(self, bound: int = AXIOM_ARITY) -> List[str]:
        bad = []
        top = min(self.source.max_arity, self.target.max_arity)
        if self.maps[1] @ self.source.unit_vector() != self.target.unit_vector():
            bad.append("unit not preserved")
        for p in range(1, top + 1):
            for q in range(0, top + 1):
                if p + q > bound or p + q - 1 > top or q > top:
                    continue
                for i in range(1, p + 1):
                    lhs = self.maps[p + q - 1] @ self.source.insertion(i, p, q)
                    rhs = self.target.insertion(i, p, q) @ self.maps[p].kron(self.maps[q])
                    if lhs != rhs:
                        bad.append(f"morphism does not commute with o_{i} at ({p},{q})")
        return bad

    def multiplicative_elements(self) -> Tuple[SparseMatrix, SparseMatrix]:
        """Images of the associative generators: m in arity 2, e in arity 0."""
        if self.source.dims[2] != 1 or self.source.dims[0] != 1:
            raise FanicError("source is not the associative operad")
        return self.maps[2] @ SparseMatrix.identity(1), self.maps[0] @ SparseMatrix.identity(1)

    def check_multiplicative(self) -> List[str]:
        """m o_1 m = m o_2 m and m o_1 e = m o_2 e = id in the target."""
        T = self.target
        m, e = self.multiplicative_elements()
        bad = []
        if T.compose_elements(1, 2, m, 2, m) != T.compose_elements(2, 2, m, 2, m):
            bad.append("m o_1 m != m o_2 m")
        for i in (1, 2):
            if T.compose_elements(i, 2, m, 0, e) != T.unit_vector():
                bad.append(f"m o_{i} e is not the unit")
        return bad


# ---------------------------------------------------------------------------
# concrete operads


def associative_operad(max_arity: int) -> OperadData:
    def ins(i, p, q):
        return SparseMatrix(1, 1, {(0, 0): 1})
    return OperadData("ASS", max_arity, [1] * (max_arity + 1), [[0]] * (max_arity + 1), [[0]] * (max_arity + 1), ins, {0: 1})


def _kron_rows(p: int, q: int, k: int) -> List[int]:
    """Kronecker index of each element of confalg.tensor_basis(p, q, k)."""
    pos_p = {m: t for t, m in enumerate(confalg.full_basis(p))}
    pos_q = {m: t for t, m in enumerate(confalg.full_basis(q))}
    dq = len(pos_q)
    return [pos_p[a] * dq + pos_q[b] for a, b in confalg.tensor_basis(p, q, k)]


@lru_cache(maxsize=None)
def _poisson_insertion(i: int, p: int, q: int, parity: int) -> SparseMatrix:
    n = p + q - 1
    offsets, off = {}, 0
    for k in range(max(n, 1)):
        offsets[k] = off
        off += confalg.dimension(n, k)
    entries = {}
    dp, dq = len(confalg.full_basis(p)), len(confalg.full_basis(q))
    for k in range(max(n, 1)):
        rows = _kron_rows(p, q, k)
        pb = confalg.insertion_pullback(i, p, q, parity + 4, k=k)
        # pullback: H*(Conf(n))_k -> tensor; the dual map goes the other way
        for (r, c), v in pb.items():
            entries[(offsets[k] + c, rows[r])] = v
    return SparseMatrix(off, dp * dq, entries)


def poisson_operad(d: int, max_arity: int) -> OperadData:
    """POISS_{d-1} in arities 0..max_arity, dual to configuration cohomology."""
    if d < 2:
        raise ValueError("d must be at least 2")
    parity = d % 2
    bases = [confalg.full_basis(n) for n in range(max_arity + 1)]
    dims = [len(b) for b in bases]
    weights = [[len(m) for m in b] for b in bases]
    degrees = [[len(m) * (d - 1) for m in b] for b in bases]
    return OperadData(
        f"POISS_{d - 1}", max_arity, dims, weights, degrees,
        lambda i, p, q: _poisson_insertion(i, p, q, parity), {0: 1},
    )


def ass_to_poisson(d: int, max_arity: int) -> OperadMorphismData:
    """ASS -> POISS_{d-1}: the arity-n generator goes to the point class."""
    src = associative_operad(max_arity)
    tgt = poisson_operad(d, max_arity)
    maps = [SparseMatrix(tgt.dims[n], 1, {(0, 0): 1}) for n in range(max_arity + 1)]
    return OperadMorphismData(src, tgt, maps)


def identity_morphism(P: OperadData) -> OperadMorphismData:
    return OperadMorphismData(P, P, [SparseMatrix.identity(x) for x in P.dims])


# ---------------------------------------------------------------------------
# fanic diagrams


def _factors(T: Fan) -> List[Tuple[int, int, bool]]:
    """(vertex index, arity, is_bead) for the unlabelled vertices in preorder."""
    return [(v.index, len(v.node[1]), v.node[0]) for v in T.unlabelled()]


@dataclass
class FanicDiagram:
    """Values and cover maps of the fanic diagram on Phi[n]."""

    mu: OperadMorphismData
    n: int
    poset: FanPoset
    factor_dims: List[List[int]]
    values: List[int]
    weights: List[List[int]]
    cover_maps: Dict[Tuple[int, int], SparseMatrix]
    _maps: Dict[Tuple[int, int], SparseMatrix] = field(default_factory=dict, repr=False)

    def map(self, a: int, b: int) -> SparseMatrix:
        """The matrix of a <= b, composed along any chain of covers."""
        if (a, b) in self._maps:
            return self._maps[(a, b)]
        P = self.poset
        if not P.leq(a, b):
            raise FanicError(f"{P.objects[a]} is not below {P.objects[b]}")
        if a == b:
            m = SparseMatrix.identity(self.values[a])
        else:
            for (s, t), cm in sorted(self.cover_maps.items()):
                if s == a and P.leq(t, b):
                    m = self.map(t, b) @ cm
                    break
        self._maps[(a, b)] = m
        return m

    def diagram(self, weight: Optional[int] = None) -> FiniteDiagram:
        """As a diagram on the fan poset; restricted to one weight if given."""
        P = self.poset
        C = fan_category(self.n)
        if weight is None:
            vals = {a: self.values[a] for a in range(len(P))}
            maps = {(a, b): self.map(a, b) for a, b in C.morphisms}
        else:
            sel = [[t for t, w in enumerate(ws) if w == weight] for ws in self.weights]
            vals = {a: len(sel[a]) for a in range(len(P))}
            maps = {(a, b): self.map(a, b).submatrix(sel[b], sel[a]) for a, b in C.morphisms}
        return FiniteDiagram(C, vals, maps)


def _tensor_weights(dims_list, weight_lists) -> List[int]:
    out = [0]
    for dim, ws in zip(dims_list, weight_lists):
        out = [w + ws[t] for w in out for t in range(dim)]
    return out


def _cover_map(mu: OperadMorphismData, T: Fan, e: int) -> SparseMatrix:
    S, Tg = mu.source, mu.target
    facs = _factors(T)
    vs = T.vertices
    y = vs[e]
    pos = {idx: t for t, (idx, _, _) in enumerate(facs)}
    a, b = pos[y.parent], pos[e]
    (_, px, bx), (_, qy, by) = facs[a], facs[b]
    op = lambda bead: Tg if bead else S
    dims = [op(bd).dims[ar] for _, ar, bd in facs]
    degs = [op(bd).degrees[ar] for _, ar, bd in facs]
    # the merged factor
    if not bx and not by:
        ins = S.insertion(y.slot, px, qy)
    elif bx:
        ins = Tg.insertion(y.slot, px, qy) @ SparseMatrix.identity(dims[a]).kron(mu.maps[qy])
    else:
        ins = Tg.insertion(y.slot, px, qy) @ mu.maps[px].kron(SparseMatrix.identity(dims[b]))
    new_dims = dims[:a] + [ins.rows] + dims[a + 1:b] + dims[b + 1:]
    stride_old = _strides(dims)
    stride_new = _strides(new_dims)
    ins_cols = ins.column_dicts()
    entries: Dict[Tuple[int, int], int] = {}
    for idx in itertools.product(*[range(x) for x in dims]):
        col = sum(i * s for i, s in zip(idx, stride_old))
        # Koszul sign for moving factor b left past the factors strictly between
        between = sum(degs[t][idx[t]] for t in range(a + 1, b))
        sign = -1 if (degs[b][idx[b]] * between) % 2 else 1
        src_col = idx[a] * dims[b] + idx[b]
        rest = list(idx[:a]) + [0] + list(idx[a + 1:b]) + list(idx[b + 1:])
        for r, v in ins_cols[src_col].items():
            rest[a] = r
            row = sum(i * s for i, s in zip(rest, stride_new))
            entries[(row, col)] = entries.get((row, col), 0) + sign * v
    return SparseMatrix(_prod(new_dims), _prod(dims), {k: v for k, v in entries.items() if v})


def _strides(dims: Sequence[int]) -> List[int]:
    out, acc = [], 1
    for x in reversed(dims):
        out.append(acc)
        acc *= x
    return out[::-1]


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def build_fanic(mu: OperadMorphismData, n: int) -> FanicDiagram:
    P = enumerate_fans(n)
    need = max(len(v.node[1]) for T in P.objects for v in T.unlabelled())
    if need > min(mu.source.max_arity, mu.target.max_arity):
        raise FanicError(f"operads must be given up to arity {need} for n = {n}")
    factor_dims, values, weights = [], [], []
    for T in P.objects:
        facs = _factors(T)
        ops = [(mu.target if bd else mu.source, ar) for _, ar, bd in facs]
        dims = [op.dims[ar] for op, ar in ops]
        factor_dims.append(dims)
        values.append(_prod(dims))
        weights.append(_tensor_weights(dims, [op.weights[ar] for op, ar in ops]))
    covers = {}
    for s, t, e in P.covers:
        covers[(s, t)] = _cover_map(mu, P.objects[s], e)
    return FanicDiagram(mu, n, P, factor_dims, values, weights, covers)


@dataclass
class FanicReport:
    name: str
    n: int
    passed: bool
    checked: int
    failures: List[str]

    def as_dict(self):
        return {"name": self.name, "n": self.n, "passed": self.passed, "checked": self.checked, "failures": self.failures}


def verify_functoriality(D: FanicDiagram) -> FanicReport:
    """Contracting two distinct edges in either order gives the same matrix."""
    P = D.poset
    fails, checked = [], 0
    for s, T in enumerate(P.objects):
        edges = T.contractible_edges()
        for e1, e2 in itertools.combinations(edges, 2):
            T1, T2 = T.contract(e1), T.contract(e2)
            T12 = T1.contract(e2 if e2 < e1 else e2 - 1)
            T21 = T2.contract(e1 if e1 < e2 else e1 - 1)
            if T12 != T21:
                fails.append(f"{T}: contractions of {e1}, {e2} reach different fans")
                continue
            a1, a2, b = P.index[T1], P.index[T2], P.index[T12]
            lhs = D.cover_maps[(a1, b)] @ D.cover_maps[(s, a1)]
            rhs = D.cover_maps[(a2, b)] @ D.cover_maps[(s, a2)]
            checked += 1
            if lhs != rhs:
                fails.append(f"{T}: edges {e1}, {e2} do not commute")
    return FanicReport("functoriality", D.n, not fails, checked, fails)


def multiplicative_cosimplicial(mu: OperadMorphismData, top: int, weight: Optional[int] = None) -> CosimplicialVS:
    """M^p = target(p) with d^0 = m o_2 x, d^i = x o_i m, d^{p+1} = m o_1 x and
    s^j = x o_{j+1} e, levels 0..top."""
    T = mu.target
    m, e = mu.multiplicative_elements()
    spaces = [T.dims[p] for p in range(top + 1)]
    cof, cod = [], []
    for p in range(top):
        ident = SparseMatrix.identity(T.dims[p])
        row = [T.insertion(2, 2, p) @ m.kron(ident)]
        row += [T.insertion(i, p, 2) @ ident.kron(m) for i in range(1, p + 1)]
        row.append(T.insertion(1, 2, p) @ m.kron(ident))
        cof.append(row)
        ident_hi = SparseMatrix.identity(T.dims[p + 1])
        cod.append([T.insertion(j + 1, p + 1, 0) @ ident_hi.kron(e) for j in range(p + 1)])
    X = CosimplicialVS(spaces, cof, cod)
    if weight is None:
        return X
    sel = [[t for t, w in enumerate(T.weights[p]) if w == weight] for p in range(top + 1)]
    return CosimplicialVS(
        [len(s) for s in sel],
        [[mat.submatrix(sel[p + 1], sel[p]) for mat in row] for p, row in enumerate(X.cofaces)],
        [[mat.submatrix(sel[p], sel[p + 1]) for mat in row] for p, row in enumerate(X.codegeneracies)],
    )


def verify_fanic_vs_truncation(mu: OperadMorphismData, n: int) -> FanicReport:
    """Fanic values and maps against M_[n] o phi_n (source must be ASS)."""
    if any(x != 1 for x in mu.source.dims):
        raise FanicError("the comparison needs the associative operad as source")
    bad = mu.check_multiplicative()
    if bad:
        return FanicReport("fanic-vs-truncation", n, False, 0, bad)
    D = build_fanic(mu, n)
    X = multiplicative_cosimplicial(mu, n)
    P = D.poset
    fails, checked = [], 0
    for a, T in enumerate(P.objects):
        checked += 1
        m = phi_object(T)
        if T.bead_arity() != m or D.values[a] != X.spaces[m]:
            fails.append(f"ObjectMismatch at {T}: bead arity {T.bead_arity()}, phi gives [{m}]")
    for a, b in P.relations():
        checked += 1
        m, m2, f = phi(P.objects[a], P.objects[b])
        if D.values[a] != X.spaces[m] or D.values[b] != X.spaces[m2]:
            continue  # already reported as an object mismatch
        if D.map(a, b) != X.apply(m, m2, f):
            fails.append(f"MorphismMismatch at {P.objects[a]} <= {P.objects[b]}")
    return FanicReport("fanic-vs-truncation", n, not fails, checked, fails)


@lru_cache(maxsize=None)
def fan_category(n: int):
    P = enumerate_fans(n)
    return poset_category(list(range(len(P))), P.leq, f"Phi[{n}]")


@lru_cache(maxsize=None)
def phi_functor(n: int) -> Functor:
    """phi_n: Phi[n] -> Delta[n] on fan indices."""
    P = enumerate_fans(n)
    objs = [phi_object(T) for T in P.objects]
    mors = {(a, b): phi(P.objects[a], P.objects[b]) for a, b in P.relations()}
    return Functor(fan_category(n), delta_category(n), objs.__getitem__, mors.__getitem__)


def holim_fanic_dims(mu: OperadMorphismData, n: int, p_max: Optional[int] = None) -> Dict[int, Tuple[List[int], List[int]]]:
    """Per weight: (lim^p of the fanic diagram, lim^p of M_[n] over Delta[n])."""
    p_max = n + 1 if p_max is None else p_max
    D = build_fanic(mu, n)
    out = {}
    ws = sorted({w for p in range(n + 1) for w in mu.target.weights[p]})
    for w in ws:
        fanic = lim_p(D.diagram(w), p_max, method="nerve")
        trunc = lim_p(multiplicative_cosimplicial(mu, n, weight=w).restrict(n), p_max, method="resolution")
        out[w] = (fanic, trunc)
    return out
