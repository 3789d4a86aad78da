"""Cosimplicial vector spaces, finite diagrams and derived limits.

Three routes to lim^p of a diagram F on a finite category C are provided:

``replacement``
    cohomology of the cosimplicial replacement, all nerve chains;
``nerve``
    the same cochains restricted to nondegenerate chains (the normalised
    complex);
``resolution``
    Ext^p(Q, F) in the functor category, from a projective resolution of the
    constant functor by representables Q[Hom(c, -)].  Hom(Q[Hom(c, -)], F)
    is F(c) by Yoneda, so the resulting complex is much smaller than the
    nerve complex when hom sets are large (e.g. Delta[3]).

A chain a_0 -> a_1 -> ... -> a_p carries a value in F(a_p); the last coface
applies F to the final arrow.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .linalg import ChainComplexDims, SparseMatrix, homology_dims, kernel_basis, rank

__all__ = [
    "CosimpError",
    "IdentityViolation",
    "FunctorialityViolation",
    "FiniteCategory",
    "FiniteDiagram",
    "CosimplicialVS",
    "delta_category",
    "poset_category",
    "p0_category",
    "point_category",
    "monotone_maps",
    "conormalize",
    "moore_complex",
    "truncate_cochain",
    "cosimplicial_replacement",
    "nerve_chains",
    "lim_p",
    "lim_zero_literal",
    "cofinal_compare",
    "CofinalCompareReport",
    "Functor",
]


class CosimpError(Exception):
    pass


class IdentityViolation(CosimpError):
    pass


class FunctorialityViolation(CosimpError):
    pass


# ---------------------------------------------------------------------------
# finite categories


@dataclass
class FiniteCategory:
    """Objects, morphisms (with source/target), composition and identities."""

    objects: List[Hashable]
    morphisms: List[Hashable]
    source: Dict[Hashable, Hashable]
    target: Dict[Hashable, Hashable]
    compose_fn: Callable[[Hashable, Hashable], Hashable]   # compose(g, f) = g o f
    identity: Dict[Hashable, Hashable]
    name: str = "C"
    _hom: Dict[Tuple[Hashable, Hashable], List[Hashable]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        hom: Dict[Tuple[Hashable, Hashable], List[Hashable]] = {(a, b): [] for a in self.objects for b in self.objects}
        for m in self.morphisms:
            hom[(self.source[m], self.target[m])].append(m)
        self._hom = hom

    def hom(self, a, b) -> List[Hashable]:
        return self._hom[(a, b)]

    def compose(self, g, f):
        if self.target[f] != self.source[g]:
            raise CosimpError(f"cannot compose {g} after {f}")
        return self.compose_fn(g, f)

    def is_identity(self, m) -> bool:
        return self.identity[self.source[m]] == m

    @property
    def is_poset(self) -> bool:
        return all(len(v) <= 1 for v in self._hom.values())

    def validate(self) -> None:
        for a in self.objects:
            i = self.identity[a]
            if self.source[i] != a or self.target[i] != a:
                raise CosimpError(f"bad identity at {a}")
        for f in self.morphisms:
            if self.compose(self.identity[self.target[f]], f) != f or self.compose(f, self.identity[self.source[f]]) != f:
                raise CosimpError(f"identity law fails at {f}")
        for f in self.morphisms:
            for g in self.hom_from(self.target[f]):
                for h in self.hom_from(self.target[g]):
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        raise CosimpError("composition is not associative")

    def hom_from(self, a) -> List[Hashable]:
        return [m for b in self.objects for m in self._hom[(a, b)]]

    def relabel(self, mapping: Dict[Hashable, Hashable]) -> "FiniteCategory":
        """Rename objects (morphism keys are wrapped so that they stay distinct)."""
        inv = {v: k for k, v in mapping.items()}
        return FiniteCategory(
            [mapping[o] for o in self.objects],
            [("m", m) for m in self.morphisms],
            {("m", m): mapping[self.source[m]] for m in self.morphisms},
            {("m", m): mapping[self.target[m]] for m in self.morphisms},
            lambda g, f: ("m", self.compose_fn(g[1], f[1])),
            {mapping[o]: ("m", self.identity[o]) for o in self.objects},
            self.name + "'",
        )


def monotone_maps(a: int, b: int) -> List[Tuple[int, ...]]:
    """Order-preserving maps [a] -> [b] as value tuples."""
    return list(itertools.combinations_with_replacement(range(b + 1), a + 1))


@lru_cache(maxsize=None)
def delta_category(n: int) -> FiniteCategory:
    """Delta[n]: objects [0], ..., [n] and all monotone maps."""
    objs = list(range(n + 1))
    mors, src, tgt = [], {}, {}
    for a in objs:
        for b in objs:
            for f in monotone_maps(a, b):
                key = (a, b, f)
                mors.append(key)
                src[key], tgt[key] = a, b

    def comp(g, f):
        return (f[0], g[1], tuple(g[2][x] for x in f[2]))

    ident = {a: (a, a, tuple(range(a + 1))) for a in objs}
    return FiniteCategory(objs, mors, src, tgt, comp, ident, f"Delta[{n}]")


def poset_category(elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], name: str = "P") -> FiniteCategory:
    objs = list(elements)
    mors = [(a, b) for a in objs for b in objs if leq(a, b)]
    src = {m: m[0] for m in mors}
    tgt = {m: m[1] for m in mors}
    return FiniteCategory(objs, mors, src, tgt, lambda g, f: (f[0], g[1]), {a: (a, a) for a in objs}, name)


def p0_category(n: int) -> FiniteCategory:
    subsets = [frozenset(s) for r in range(1, n + 2) for s in itertools.combinations(range(n + 1), r)]
    return poset_category(subsets, lambda a, b: a <= b, f"P0([{n}])")


def point_category() -> FiniteCategory:
    return poset_category([0], lambda a, b: True, "*")


# ---------------------------------------------------------------------------
# diagrams


@dataclass
class FiniteDiagram:
    """A functor from a finite category to finite-dimensional vector spaces."""

    shape: FiniteCategory
    values: Dict[Hashable, int]
    maps: Dict[Hashable, SparseMatrix]
    check: bool = True

    def __post_init__(self):
        if self.check:
            self.validate()

    def validate(self) -> None:
        C = self.shape
        for m in C.morphisms:
            mat = self.maps[m]
            if mat.shape != (self.values[C.target[m]], self.values[C.source[m]]):
                raise FunctorialityViolation(f"map of {m} has shape {mat.shape}")
        for a in C.objects:
            if self.maps[C.identity[a]] != SparseMatrix.identity(self.values[a]):
                raise FunctorialityViolation(f"identity at {a} is not sent to the identity")
        for f in C.morphisms:
            for g in C.hom_from(C.target[f]):
                if self.maps[C.compose(g, f)] != self.maps[g] @ self.maps[f]:
                    raise FunctorialityViolation(f"F({g} o {f}) != F({g}) F({f})")

    def pullback(self, shape: FiniteCategory, on_objects: Callable, on_morphisms: Callable) -> "FiniteDiagram":
        """Precompose with a functor ``shape -> self.shape``."""
        vals = {o: self.values[on_objects(o)] for o in shape.objects}
        maps = {m: self.maps[on_morphisms(m)] for m in shape.morphisms}
        return FiniteDiagram(shape, vals, maps, self.check)

    def relabel(self, mapping: Dict[Hashable, Hashable]) -> "FiniteDiagram":
        C = self.shape.relabel(mapping)
        return FiniteDiagram(C, {mapping[o]: v for o, v in self.values.items()}, {("m", m): mat for m, mat in self.maps.items()}, self.check)

    @classmethod
    def constant(cls, shape: FiniteCategory, dim: int = 1) -> "FiniteDiagram":
        ident = SparseMatrix.identity(dim)
        return cls(shape, {o: dim for o in shape.objects}, {m: ident for m in shape.morphisms})


# ---------------------------------------------------------------------------
# cosimplicial vector spaces


def _eq(a: SparseMatrix, b: SparseMatrix) -> bool:
    return a.shape == b.shape and a == b


@dataclass
class CosimplicialVS:
    """Levels 0..top with cofaces d^i: X^p -> X^{p+1} (0 <= i <= p+1) and
    codegeneracies s^j: X^{p+1} -> X^p (0 <= j <= p).

    ``cofaces[p][i]`` and ``codegeneracies[p][j]`` hold the matrices.  All
    cosimplicial identities among the given levels are checked on
    construction.
    """

    spaces: List[int]
    cofaces: List[List[SparseMatrix]]
    codegeneracies: List[List[SparseMatrix]]
    check: bool = True

    def __post_init__(self):
        top = len(self.spaces) - 1
        if len(self.cofaces) != top or len(self.codegeneracies) != top:
            raise CosimpError("need cofaces and codegeneracies for every level below the top")
        for p in range(top):
            if len(self.cofaces[p]) != p + 2 or len(self.codegeneracies[p]) != p + 1:
                raise CosimpError(f"wrong number of structure maps at level {p}")
            for m in self.cofaces[p]:
                if m.shape != (self.spaces[p + 1], self.spaces[p]):
                    raise CosimpError(f"coface at level {p} has shape {m.shape}")
            for m in self.codegeneracies[p]:
                if m.shape != (self.spaces[p], self.spaces[p + 1]):
                    raise CosimpError(f"codegeneracy at level {p} has shape {m.shape}")
        if self.check:
            self.validate()

    @property
    def top(self) -> int:
        return len(self.spaces) - 1

    def d(self, p: int, i: int) -> SparseMatrix:
        return self.cofaces[p][i]

    def s(self, p: int, j: int) -> SparseMatrix:
        """s^j: X^{p+1} -> X^p."""
        return self.codegeneracies[p][j]

    def validate(self) -> None:
        top = self.top
        # d^j d^i = d^i d^{j-1}, i < j, X^p -> X^{p+2}
        for p in range(top - 1):
            for j in range(p + 3):
                for i in range(j):
                    if not _eq(self.d(p + 1, j) @ self.d(p, i), self.d(p + 1, i) @ self.d(p, j - 1)):
                        raise IdentityViolation(f"d^{j} d^{i} != d^{i} d^{j - 1} at level {p}")
        # s^j s^i = s^i s^{j+1}, i <= j, X^{p+2} -> X^p
        for p in range(top - 1):
            for j in range(p + 1):
                for i in range(j + 1):
                    if not _eq(self.s(p, j) @ self.s(p + 1, i), self.s(p, i) @ self.s(p + 1, j + 1)):
                        raise IdentityViolation(f"s^{j} s^{i} != s^{i} s^{j + 1} at level {p}")
        # mixed identities, s^j: X^{p+1} -> X^p after d^i: X^p -> X^{p+1}
        for p in range(1, top):
            for j in range(p):
                for i in range(p + 1):
                    lhs = self.s(p, j) @ self.d(p, i)
                    if i < j:
                        rhs = self.d(p - 1, i) @ self.s(p - 1, j - 1)
                    elif i in (j, j + 1):
                        rhs = SparseMatrix.identity(self.spaces[p])
                    else:
                        rhs = self.d(p - 1, i - 1) @ self.s(p - 1, j)
                    if not _eq(lhs, rhs):
                        raise IdentityViolation(f"s^{j} d^{i} identity fails at level {p}")
        # the top level's extra mixed identities s^j d^i = id at level 0
        if top >= 1:
            for i in (0, 1):
                if not _eq(self.s(0, 0) @ self.d(0, i), SparseMatrix.identity(self.spaces[0])):
                    raise IdentityViolation("s^0 d^i != id at level 0")

    def apply(self, a: int, b: int, f: Sequence[int]) -> SparseMatrix:
        """X(f): X^a -> X^b for a monotone map f: [a] -> [b]."""
        f = tuple(f)
        if len(f) != a + 1 or any(x < 0 or x > b for x in f) or any(f[t] > f[t + 1] for t in range(a)):
            raise CosimpError(f"{f} is not a monotone map [{a}] -> [{b}]")
        return self._apply(a, b, f)

    def _apply(self, a: int, b: int, f: Tuple[int, ...]) -> SparseMatrix:
        for j in range(a):
            if f[j] == f[j + 1]:
                # f = f' s^j with s^j: [a] -> [a-1] merging j and j+1
                rest = f[: j + 1] + f[j + 2:]
                return self._apply(a - 1, b, rest) @ self.s(a - 1, j)
        image = set(f)
        for i in range(b + 1):
            if i not in image:
                # f = d^i f'' with d^i: [b-1] -> [b] skipping i
                rest = tuple(x if x < i else x - 1 for x in f)
                return self.d(b - 1, i) @ self._apply(a, b - 1, rest)
        return SparseMatrix.identity(self.spaces[a])

    def restrict(self, n: int) -> FiniteDiagram:
        """The diagram on Delta[n] obtained by restriction."""
        if n > self.top:
            raise CosimpError(f"level {n} not available (top {self.top})")
        C = delta_category(n)
        maps = {m: self.apply(m[0], m[1], m[2]) for m in C.morphisms}
        return FiniteDiagram(C, {a: self.spaces[a] for a in C.objects}, maps)

    @classmethod
    def constant(cls, top: int, dim: int = 1) -> "CosimplicialVS":
        ident = SparseMatrix.identity(dim)
        return cls([dim] * (top + 1), [[ident] * (p + 2) for p in range(top)], [[ident] * (p + 1) for p in range(top)])


def moore_complex(X: CosimplicialVS) -> ChainComplexDims:
    """Unnormalised cochain complex with the alternating coface sum."""
    diffs = []
    for p in range(X.top):
        acc = SparseMatrix.zero(X.spaces[p + 1], X.spaces[p])
        for i in range(p + 2):
            m = X.d(p, i)
            acc = acc - m if i % 2 else acc + m
        diffs.append(acc)
    return ChainComplexDims(X.spaces, diffs)


def conormalize(X: CosimplicialVS) -> ChainComplexDims:
    """N^p = common kernel of all codegeneracies out of X^p, with the
    restricted alternating coface differential."""
    bases, frees = [], []
    for p in range(X.top + 1):
        if p == 0:
            K, free = SparseMatrix.identity(X.spaces[0]), list(range(X.spaces[0]))
        else:
            stacked = SparseMatrix.vstack([X.s(p - 1, j) for j in range(p)])
            K, free = kernel_basis(stacked)
        bases.append(K)
        frees.append(free)
    moore = moore_complex(X)
    diffs = []
    for p in range(X.top):
        img = moore.differentials[p] @ bases[p]
        # kernel vectors are determined by their free coordinates
        coords = img.submatrix(frees[p + 1])
        if coords.rows and bases[p + 1] @ coords != img:
            raise CosimpError("differential does not preserve the normalised subcomplex")
        diffs.append(coords)
    return ChainComplexDims([b.cols for b in bases], diffs)


def truncate_cochain(C: ChainComplexDims, n: int) -> ChainComplexDims:
    """tau^n: keep levels <= n and the differentials into them."""
    if n < 0:
        raise ValueError("truncation level must be nonnegative")
    if n >= len(C.spaces) - 1:
        return C
    return ChainComplexDims(C.spaces[: n + 1], C.differentials[:n], check=False)


# ---------------------------------------------------------------------------
# nerves and cosimplicial replacement


def nerve_chains(C: FiniteCategory, p: int, degenerate: bool = True) -> List[Tuple[Hashable, ...]]:
    """Composable strings (u_1, ..., u_p); p = 0 gives objects as 1-tuples ("obj", a)."""
    if p == 0:
        return [(("obj", a),) for a in C.objects]
    level = [(m,) for m in C.morphisms if degenerate or not C.is_identity(m)]
    for _ in range(p - 1):
        nxt = []
        for chain in level:
            for m in C.hom_from(C.target[chain[-1]]):
                if degenerate or not C.is_identity(m):
                    nxt.append(chain + (m,))
        level = nxt
    return level


def _chain_end(C: FiniteCategory, chain) -> Hashable:
    if chain[0][0] == "obj" and len(chain) == 1 and chain[0] not in C.source:
        return chain[0][1]
    return C.target[chain[-1]]


def _chain_start(C: FiniteCategory, chain) -> Hashable:
    if chain[0][0] == "obj" and len(chain) == 1 and chain[0] not in C.source:
        return chain[0][1]
    return C.source[chain[0]]


def _face(C: FiniteCategory, chain, i: int, p: int):
    """i-th face of a p-chain (p >= 1), as a (p-1)-chain."""
    if p == 1:
        u = chain[0]
        return ((("obj", C.target[u] if i == 0 else C.source[u])),)
    if i == 0:
        return chain[1:]
    if i == p:
        return chain[:-1]
    return chain[: i - 1] + (C.compose(chain[i], chain[i - 1]),) + chain[i + 1:]


def _degeneracy(C: FiniteCategory, chain, j: int, p: int):
    """Insert an identity at object a_j of a p-chain."""
    if p == 0:
        a = chain[0][1]
        return (C.identity[a],)
    objs = [C.source[chain[0]]] + [C.target[u] for u in chain]
    return chain[:j] + (C.identity[objs[j]],) + chain[j:]


def _cochain_layout(F: FiniteDiagram, chains) -> Tuple[List[int], int]:
    offsets, total = [], 0
    for ch in chains:
        offsets.append(total)
        total += F.values[_chain_end(F.shape, ch)]
    return offsets, total


def cosimplicial_replacement(F: FiniteDiagram, top: int) -> CosimplicialVS:
    """Levels 0..top of the cosimplicial replacement, degenerate chains included."""
    C = F.shape
    chains = [nerve_chains(C, p) for p in range(top + 1)]
    index = [{ch: t for t, ch in enumerate(lv)} for lv in chains]
    layout = [_cochain_layout(F, lv) for lv in chains]
    cofaces, codegs = [], []
    for p in range(top):
        off_lo, dim_lo = layout[p]
        off_hi, dim_hi = layout[p + 1]
        row = []
        for i in range(p + 2):
            entries = {}
            for t, ch in enumerate(chains[p + 1]):
                face = _face(C, ch, i, p + 1)
                s = index[p][face]
                if i == p + 1:
                    mat = F.maps[ch[-1]]
                    for (r, c), v in mat.items():
                        entries[(off_hi[t] + r, off_lo[s] + c)] = v
                else:
                    for r in range(F.values[_chain_end(C, ch)]):
                        entries[(off_hi[t] + r, off_lo[s] + r)] = 1
            row.append(SparseMatrix(dim_hi, dim_lo, entries))
        cofaces.append(row)
        row = []
        for j in range(p + 1):
            entries = {}
            for t, ch in enumerate(chains[p]):
                up = index[p + 1][_degeneracy(C, ch, j, p)]
                for r in range(F.values[_chain_end(C, ch)]):
                    entries[(off_lo[t] + r, off_hi[up] + r)] = 1
            row.append(SparseMatrix(dim_lo, dim_hi, entries))
        codegs.append(row)
    return CosimplicialVS([layout[p][1] for p in range(top + 1)], cofaces, codegs)


def _nerve_complex(F: FiniteDiagram, top: int) -> ChainComplexDims:
    """Normalised cochains: functions on nondegenerate chains only."""
    C = F.shape
    chains = [nerve_chains(C, p, degenerate=False) for p in range(top + 1)]
    index = [{ch: t for t, ch in enumerate(lv)} for lv in chains]
    layout = [_cochain_layout(F, lv) for lv in chains]
    diffs = []
    for p in range(top):
        off_lo, dim_lo = layout[p]
        off_hi, dim_hi = layout[p + 1]
        entries: Dict[Tuple[int, int], int] = {}
        for t, ch in enumerate(chains[p + 1]):
            for i in range(p + 2):
                face = _face(C, ch, i, p + 1)
                s = index[p].get(face)
                if s is None:
                    continue  # degenerate face: normalised cochains vanish there
                sign = -1 if i % 2 else 1
                if i == p + 1:
                    for (r, c), v in F.maps[ch[-1]].items():
                        key = (off_hi[t] + r, off_lo[s] + c)
                        entries[key] = entries.get(key, 0) + sign * v
                else:
                    for r in range(F.values[_chain_end(C, ch)]):
                        key = (off_hi[t] + r, off_lo[s] + r)
                        entries[key] = entries.get(key, 0) + sign
        diffs.append(SparseMatrix(dim_hi, dim_lo, entries))
    return ChainComplexDims([layout[p][1] for p in range(top + 1)], diffs)


# ---------------------------------------------------------------------------
# projective resolution route


class _Span:
    """Incrementally grown subspace of Q^dim with membership tests."""

    def __init__(self):
        self.rows: Dict[int, Dict[int, object]] = {}  # pivot -> reduced row

    def reduce(self, vec: Dict[int, object]) -> Dict[int, object]:
        from fractions import Fraction
        v = {k: Fraction(x) for k, x in vec.items() if x}
        for piv in sorted(self.rows):
            if piv in v:
                f = v[piv]
                for k, x in self.rows[piv].items():
                    nv = v.get(k, 0) - f * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def add(self, vec: Dict[int, object]) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = 1 / v[piv]
        v = {k: x * inv for k, x in v.items()}
        for other in self.rows.values():
            f = other.get(piv)
            if f:
                for k, x in v.items():
                    nv = other.get(k, 0) - f * x
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        self.rows[piv] = v
        return True


class _FreeModule:
    """Direct sum of representables Q[Hom(c_g, -)] over generators g."""

    def __init__(self, C: FiniteCategory, gens: List[Hashable]):
        self.C = C
        self.gens = gens
        self.basis: Dict[Hashable, List[Tuple[int, Hashable]]] = {}
        self.pos: Dict[Hashable, Dict[Tuple[int, Hashable], int]] = {}
        for x in C.objects:
            b = [(g, v) for g, c in enumerate(gens) for v in C.hom(c, x)]
            self.basis[x] = b
            self.pos[x] = {bv: t for t, bv in enumerate(b)}

    def dim(self, x) -> int:
        return len(self.basis[x])

    def act(self, u, vec: Dict[int, object]) -> Dict[int, object]:
        """Apply the morphism u: x -> y to a vector of self(x)."""
        x, y = self.C.source[u], self.C.target[u]
        out: Dict[int, object] = {}
        for t, c in vec.items():
            g, v = self.basis[x][t]
            key = self.pos[y][(g, self.C.compose(u, v))]
            out[key] = out.get(key, 0) + c
        return {k: c for k, c in out.items() if c}


def _generators(C: FiniteCategory, P: Optional[_FreeModule], kernels: Dict[Hashable, List[Dict[int, object]]]):
    """Pick module generators of the subfunctor spanned by ``kernels``.

    ``P`` is the ambient free module (None for the constant functor case
    handled by the caller).  Returns a list of (object, vector) pairs.
    """
    spans = {x: _Span() for x in C.objects}
    gens = []
    for x in C.objects:
        for vec in kernels[x]:
            if not spans[x].reduce(vec):
                continue
            gens.append((x, vec))
            for u in C.hom_from(x):
                spans[C.target[u]].add(P.act(u, vec))
    return gens


def _resolution_complex(F: FiniteDiagram, top: int) -> ChainComplexDims:
    """Hom(P_*, F) for a projective resolution P_* -> Q of the constant functor."""
    C = F.shape
    # P_0: one generator per object not reached from earlier generators
    objs_order = list(C.objects)
    gens0: List[Hashable] = []
    reached = set()
    for x in objs_order:
        if x not in reached:
            gens0.append(x)
            for u in C.hom_from(x):
                reached.add(C.target[u])
    levels = [gens0]
    boundaries: List[List[Dict[int, object]]] = []  # boundary of each generator of P_{p+1}
    P = _FreeModule(C, gens0)
    # kernel of the augmentation P_0 -> Q
    def aug_kernel(x):
        n = P.dim(x)
        if n == 0:
            return []
        ones = SparseMatrix(1, n, {(0, t): 1 for t in range(n)})
        K, _ = kernel_basis(ones)
        return [dict((r, v) for (r, c), v in K.items() if c == col) for col in range(K.cols)]

    kernels = {x: aug_kernel(x) for x in C.objects}
    mods = [P]
    for p in range(top):
        gens = _generators(C, P, kernels)
        levels.append([x for x, _ in gens])
        boundaries.append([vec for _, vec in gens])
        Q = _FreeModule(C, [x for x, _ in gens])
        mods.append(Q)
        # boundary map Q(x) -> P(x): (h, v) -> P(v)(k_h)
        new_kernels = {}
        for x in C.objects:
            entries = {}
            for t, (h, v) in enumerate(Q.basis[x]):
                for r, c in P.act(v, gens[h][1]).items():
                    entries[(r, t)] = c
            M = SparseMatrix(P.dim(x), Q.dim(x), entries)
            K, _ = kernel_basis(M)
            new_kernels[x] = [dict((r, v) for (r, c), v in K.items() if c == col) for col in range(K.cols)]
        P, kernels = Q, new_kernels
    # Hom(P_p, F) = sum over generators g of F(c_g)
    layout = []
    for gens in levels:
        offs, tot = [], 0
        for c in gens:
            offs.append(tot)
            tot += F.values[c]
        layout.append((offs, tot))
    diffs = []
    for p in range(top):
        lower, upper = mods[p], levels[p + 1]
        off_lo, dim_lo = layout[p]
        off_hi, dim_hi = layout[p + 1]
        entries: Dict[Tuple[int, int], object] = {}
        for h, c_h in enumerate(upper):
            for t, coef in boundaries[p][h].items():
                g, v = lower.basis[c_h][t]
                for (r, c), val in F.maps[v].items():
                    key = (off_hi[h] + r, off_lo[g] + c)
                    entries[key] = entries.get(key, 0) + coef * val
        diffs.append(SparseMatrix(dim_hi, dim_lo, entries))
    return ChainComplexDims([l[1] for l in layout], diffs)


def lim_p(F: FiniteDiagram, p_max: int, method: str = "auto") -> List[int]:
    """dim lim^p F for p = 0..p_max."""
    if p_max < 0:
        raise ValueError("p_max must be nonnegative")
    if method == "auto":
        method = "nerve" if F.shape.is_poset else "resolution"
    if method == "replacement":
        cx = moore_complex(cosimplicial_replacement(F, p_max + 1))
    elif method == "nerve":
        cx = _nerve_complex(F, p_max + 1)
    elif method == "resolution":
        cx = _resolution_complex(F, p_max + 1)
    else:
        raise ValueError(f"unknown method {method!r}")
    return homology_dims(cx)[: p_max + 1]


def lim_zero_literal(F: FiniteDiagram) -> int:
    """dim of the space of compatible families (x_a) with F(u) x_a = x_b."""
    C = F.shape
    offs, tot = {}, 0
    for a in C.objects:
        offs[a] = tot
        tot += F.values[a]
    entries = {}
    row = 0
    for u in C.morphisms:
        a, b = C.source[u], C.target[u]
        for (r, c), v in F.maps[u].items():
            entries[(row + r, offs[a] + c)] = entries.get((row + r, offs[a] + c), 0) + v
        for r in range(F.values[b]):
            entries[(row + r, offs[b] + r)] = entries.get((row + r, offs[b] + r), 0) - 1
        row += F.values[b]
    return tot - rank(SparseMatrix(row, tot, {k: v for k, v in entries.items() if v}))


@dataclass
class Functor:
    """A functor between finite categories, given on objects and morphisms."""

    source: FiniteCategory
    target: FiniteCategory
    on_objects: Callable[[Hashable], Hashable]
    on_morphisms: Callable[[Hashable], Hashable]

    def validate(self) -> None:
        S, T = self.source, self.target
        for m in S.morphisms:
            img = self.on_morphisms(m)
            if T.source[img] != self.on_objects(S.source[m]) or T.target[img] != self.on_objects(S.target[m]):
                raise CosimpError(f"image of {m} has the wrong ends")
        for a in S.objects:
            if self.on_morphisms(S.identity[a]) != T.identity[self.on_objects(a)]:
                raise CosimpError(f"identity at {a} not preserved")
        for f in S.morphisms:
            for g in S.hom_from(S.target[f]):
                if self.on_morphisms(S.compose(g, f)) != T.compose(self.on_morphisms(g), self.on_morphisms(f)):
                    raise CosimpError("composition not preserved")

    def pull(self, F: FiniteDiagram) -> FiniteDiagram:
        if F.shape is not self.target:
            raise CosimpError("diagram is not indexed by the functor's target")
        return F.pullback(self.source, self.on_objects, self.on_morphisms)


@dataclass
class CofinalCompareReport:
    n: int
    grades: Dict[object, Tuple[List[int], List[int]]]
    passed: bool

    def as_dict(self):
        return {
            "n": self.n,
            "passed": self.passed,
            "grades": [{"grade": k, "base": a, "pulled_back": b} for k, (a, b) in sorted(self.grades.items())],
        }


def cofinal_compare(diagrams: Dict[object, FiniteDiagram], change: Functor, p_max: int, n: int = -1) -> CofinalCompareReport:
    """lim^p of each graded piece versus lim^p of its pullback along ``change``."""
    grades = {}
    for k, F in sorted(diagrams.items()):
        grades[k] = (lim_p(F, p_max), lim_p(change.pull(F), p_max))
    return CofinalCompareReport(n, grades, all(a == b for a, b in grades.values()))
