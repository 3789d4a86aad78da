"""Fan categories Phi[n] and the functors theta_n, G_n, phi_n.

An n-fan is a planar tree with n+1 labelled leaves 0..n in clockwise order
and a distinguished vertex, the bead; every vertex other than the bead has
valence different from 2.  We root the tree at leaf 0, which has a single
child called the top.  A node of the rooted tree is encoded as

* ``int``            a labelled leaf (labels 1..n, in depth-first order),
* ``(is_bead, kids)`` an unlabelled vertex with its children left to right.

The bead leaf is ``(True, ())``.  Two fans are equal iff their encodings are
equal, so the encoding is canonical.

Edges are named by the preorder index of their lower vertex (the top has
index 0).  An edge is contractible when both ends are unlabelled; contracting
it splices the children of the lower vertex into the upper one, and the
merged vertex is the bead if either end was.  T <= T' iff T' is obtained from
T by contractions.

Text form (see docs/grammars.md): labelled leaf ``3``, vertex ``(a b ...)``,
bead vertex ``*(a b ...)``, bead leaf ``*``; the root leaf 0 is implicit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .linalg import ChainComplexDims, SparseMatrix, homology_dims

__all__ = [
    "FanError",
    "ResourceBound",
    "EmptySeparationSet",
    "NotASubset",
    "Fan",
    "FanPoset",
    "enumerate_fans",
    "separated",
    "theta",
    "g_functor",
    "phi",
    "phi_object",
    "CofinalityReport",
    "check_cofinality",
    "order_complex_homology",
    "cyclohedron_f_vector",
    "FAN_CEILING",
]

FAN_CEILING = 4

Node = Union[int, Tuple[bool, tuple]]
BEAD_LEAF: Node = (True, ())


class FanError(Exception):
    pass


class ResourceBound(FanError):
    pass


class EmptySeparationSet(FanError):
    pass


class NotASubset(FanError, ValueError):
    pass


# ---------------------------------------------------------------------------
# the Fan value type


@dataclass(frozen=True)
class _Vertex:
    index: int          # preorder index among non-root vertices
    node: Node
    parent: int         # -1 for the root leaf 0
    slot: int           # 1-based position among the parent's children
    ancestors: Tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    n: int
    top: Node

    def __post_init__(self):
        labels = [x for x in _leaves(self.top) if isinstance(x, int)]
        if labels != list(range(1, self.n + 1)):
            raise FanError(f"leaf labels {labels} are not 1..{self.n} in depth-first order")
        beads = sum(1 for v in _walk(self.top) if not isinstance(v, int) and v[0])
        if beads != 1:
            raise FanError(f"expected exactly one bead, found {beads}")
        for v in _walk(self.top):
            if not isinstance(v, int) and not v[0] and len(v[1]) < 2:
                raise FanError("a non-bead vertex must have at least two children")

    # -- structure ----------------------------------------------------------

    @property
    def vertices(self) -> Tuple[_Vertex, ...]:
        return _vertices(self.top)

    def bead(self) -> _Vertex:
        for v in self.vertices:
            if not isinstance(v.node, int) and v.node[0]:
                return v
        raise FanError("no bead")  # unreachable after validation

    def bead_arity(self) -> int:
        """Number of children of the bead, i.e. its valence minus one."""
        return len(self.bead().node[1])

    def unlabelled(self) -> List[_Vertex]:
        return [v for v in self.vertices if not isinstance(v.node, int)]

    def contractible_edges(self) -> List[int]:
        vs = self.vertices
        return [v.index for v in vs if not isinstance(v.node, int) and v.parent >= 0]

    def contract(self, edge: int) -> "Fan":
        vs = self.vertices
        if edge not in self.contractible_edges():
            raise FanError(f"edge {edge} is not contractible")
        y = vs[edge]
        return Fan(self.n, _contract(self.top, vs, y.parent, y.slot))

    def to_string(self) -> str:
        return _render(self.top)

    __str__ = to_string

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "Fan":
        top, rest = _parse(text.strip(), 0)
        if text.strip()[rest:].strip():
            raise FanError(f"trailing characters in {text!r}")
        labels = [x for x in _leaves(top) if isinstance(x, int)]
        return cls(len(labels) if n is None else n, top)

    def sort_key(self):
        return (-len(self.contractible_edges()), self.to_string())


def _walk(node: Node) -> Iterator[Node]:
    yield node
    if not isinstance(node, int):
        for c in node[1]:
            yield from _walk(c)


def _leaves(node: Node) -> List[Node]:
    if isinstance(node, int) or not node[1]:
        return [node]
    out = []
    for c in node[1]:
        out.extend(_leaves(c))
    return out


@lru_cache(maxsize=None)
def _vertices(top: Node) -> Tuple[_Vertex, ...]:
    out: List[_Vertex] = []

    def rec(node, parent, slot, anc):
        idx = len(out)
        out.append(_Vertex(idx, node, parent, slot, anc))
        if not isinstance(node, int):
            for s, c in enumerate(node[1], 1):
                rec(c, idx, s, anc + (idx,))

    rec(top, -1, 1, ())
    return tuple(out)


def _contract(top: Node, vs, parent_idx: int, slot: int) -> Node:
    counter = itertools.count()

    def rec(node):
        idx = next(counter)
        if isinstance(node, int):
            return node
        kids = [rec(c) for c in node[1]]
        if idx == parent_idx:
            y = kids[slot - 1]
            merged = kids[: slot - 1] + list(y[1]) + kids[slot:]
            return (node[0] or y[0], tuple(merged))
        return (node[0], tuple(kids))

    return rec(top)


def _render(node: Node) -> str:
    if isinstance(node, int):
        return str(node)
    bead, kids = node
    if bead and not kids:
        return "*"
    inner = "(" + " ".join(_render(c) for c in kids) + ")"
    return ("*" if bead else "") + inner


def _parse(s: str, i: int) -> Tuple[Node, int]:
    while i < len(s) and s[i] == " ":
        i += 1
    if i >= len(s):
        raise FanError("unexpected end of fan string")
    if s[i].isdigit():
        j = i
        while j < len(s) and s[j].isdigit():
            j += 1
        return int(s[i:j]), j
    bead = False
    if s[i] == "*":
        bead = True
        i += 1
        if i >= len(s) or s[i] != "(":
            return BEAD_LEAF, i
    if s[i] != "(":
        raise FanError(f"unexpected character {s[i]!r} at {i}")
    i += 1
    kids = []
    while True:
        while i < len(s) and s[i] == " ":
            i += 1
        if i >= len(s):
            raise FanError("unbalanced parentheses")
        if s[i] == ")":
            return (bead, tuple(kids)), i + 1
        child, i = _parse(s, i)
        kids.append(child)


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def _subtrees(m: int, b: int) -> Tuple[Node, ...]:
    """Unlabelled shapes with m labelled leaves (as 0 placeholders) and b beads."""
    out: List[Node] = []
    if m == 1 and b == 0:
        out.append(0)
    if m == 0 and b == 1:
        out.append(BEAD_LEAF)
    if b == 1:
        for kids in _sequences(m, 0, 1):
            out.append((True, kids))
    for kids in _sequences(m, b, 2):
        out.append((False, kids))
    return tuple(out)


@lru_cache(maxsize=None)
def _sequences(m: int, b: int, min_len: int) -> Tuple[tuple, ...]:
    """Ordered child lists with total m leaves, b beads and >= min_len entries."""
    out = []
    if min_len <= 0 and m == 0 and b == 0:
        out.append(())
    for m1 in range(m + 1):
        for b1 in range(b + 1):
            if m1 == 0 and b1 == 0:
                continue
            if (m1, b1) == (m, b) and min_len > 1:
                # remaining sequence must be nonempty but has nothing to hold
                continue
            for head in _subtrees(m1, b1):
                for tail in _sequences(m - m1, b - b1, max(min_len - 1, 0)):
                    out.append((head,) + tail)
    return tuple(out)


def _label(node: Node, counter) -> Node:
    if isinstance(node, int):
        return next(counter)
    return (node[0], tuple(_label(c, counter) for c in node[1]))


@dataclass
class FanPoset:
    """All n-fans with the contraction order."""

    n: int
    objects: List[Fan]
    covers: List[Tuple[int, int, int]]  # (source, target, edge)
    index: Dict[Fan, int] = field(default_factory=dict)
    _up: List[FrozenSet[int]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.index = {f: t for t, f in enumerate(self.objects)}
        succ: Dict[int, List[int]] = {t: [] for t in range(len(self.objects))}
        for a, b, _ in self.covers:
            succ[a].append(b)
        # upsets via reverse topological order (contraction lowers edge count)
        order = sorted(range(len(self.objects)), key=lambda t: len(self.objects[t].contractible_edges()))
        up: Dict[int, FrozenSet[int]] = {}
        for t in order:
            acc = {t}
            for s in succ[t]:
                acc |= up[s]
            up[t] = frozenset(acc)
        self._up = [up[t] for t in range(len(self.objects))]

    def __len__(self) -> int:
        return len(self.objects)

    def leq(self, a: int, b: int) -> bool:
        return b in self._up[a]

    def upset(self, a: int) -> FrozenSet[int]:
        return self._up[a]

    def relations(self) -> List[Tuple[int, int]]:
        return [(a, b) for a in range(len(self.objects)) for b in sorted(self._up[a])]

    def maximal(self) -> List[int]:
        return [a for a in range(len(self)) if len(self._up[a]) == 1]

    def minimal(self) -> List[int]:
        below = {b for a in range(len(self)) for b in self._up[a] if b != a}
        return [a for a in range(len(self)) if a not in below]

    def full_star(self) -> int:
        return self.index[Fan(self.n, (True, tuple(range(1, self.n + 1))))]

    def serialize(self) -> List[str]:
        return [f.to_string() for f in self.objects]


def enumerate_fans(n: int, ceiling: int = FAN_CEILING) -> FanPoset:
    """All n-fans with their covering relations, in a fixed order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > ceiling:
        raise ResourceBound(f"n = {n} exceeds fan ceiling {ceiling}")
    return _enumerate(n)


@lru_cache(maxsize=None)
def _enumerate(n: int) -> FanPoset:
    fans = {Fan(n, _label(shape, itertools.count(1))) for shape in _subtrees(n, 1)}
    objects = sorted(fans, key=Fan.sort_key)
    index = {f: t for t, f in enumerate(objects)}
    covers = []
    for t, f in enumerate(objects):
        for e in f.contractible_edges():
            covers.append((t, index[f.contract(e)], e))
    return FanPoset(n, objects, covers)


def cyclohedron_f_vector(n: int) -> List[int]:
    """Faces of the n-dimensional cyclohedron by dimension: C(n,k) C(2n-k, n)."""
    return [comb(n, k) * comb(2 * n - k, n) for k in range(n + 1)]


# ---------------------------------------------------------------------------
# separation and theta


def _check_index(T: Fan, i: int) -> None:
    if not (0 <= i <= T.n):
        raise ValueError(f"index {i} outside [0, {T.n}]")


def separated(T: Fan, i: int) -> bool:
    """Does the bead separate leaves i and i+1 (mod n+1)?"""
    _check_index(T, i)
    vs = T.vertices
    bead = T.bead()
    if not bead.node[1]:
        before = 0
        for v in vs:
            if v.index == bead.index:
                break
            if isinstance(v.node, int):
                before += 1
        return before == i
    leaf_of = {v.node: v for v in vs if isinstance(v.node, int)}
    j = (i + 1) % (T.n + 1)
    # the root leaf 0 has no ancestors below the root
    anc_i = set(leaf_of[i].ancestors) if i else set()
    anc_j = set(leaf_of[j].ancestors) if j else set()
    b = bead.index
    if (b in anc_i) != (b in anc_j):
        return True
    if b in anc_i and b in anc_j:
        common = anc_i & anc_j
        return max(common, key=lambda x: len(vs[x].ancestors)) == b
    return False


def theta(T: Fan) -> FrozenSet[int]:
    out = frozenset(i for i in range(T.n + 1) if separated(T, i))
    if not out:
        raise EmptySeparationSet(f"fan {T} separates no pair of leaves")
    return out


def g_functor(S: FrozenSet[int], S2: FrozenSet[int]) -> Tuple[int, ...]:
    """The order-preserving map [|S|-1] -> [|S2|-1] induced by S in S2."""
    S, S2 = sorted(S), sorted(S2)
    if not S or not set(S) <= set(S2):
        raise NotASubset(f"{S} is not a nonempty subset of {S2}")
    pos = {x: t for t, x in enumerate(S2)}
    return tuple(pos[x] for x in S)


def phi_object(T: Fan) -> int:
    """phi_n(T) = [m] with m = |theta(T)| - 1."""
    return len(theta(T)) - 1


def phi(T: Fan, T2: Fan) -> Tuple[int, int, Tuple[int, ...]]:
    """phi_n on the morphism T <= T2: returns (m, m2, monotone map)."""
    a, b = theta(T), theta(T2)
    return len(a) - 1, len(b) - 1, g_functor(a, b)


# ---------------------------------------------------------------------------
# cofinality


def order_complex_homology(elements: Sequence, leq) -> List[int]:
    """Betti numbers of the order complex of a finite poset."""
    m = len(elements)
    up = [[b for b in range(m) if b != a and leq(elements[a], elements[b])] for a in range(m)]
    chains: List[List[Tuple[int, ...]]] = [[(a,) for a in range(m)]]
    while True:
        nxt = [c + (b,) for c in chains[-1] for b in up[c[-1]]]
        if not nxt:
            break
        chains.append(nxt)
    index = [{c: t for t, c in enumerate(level)} for level in chains]
    diffs = []
    for k in range(len(chains) - 1):
        # coboundary C^k -> C^{k+1} as the transpose of the simplicial boundary
        entries = {}
        for t, c in enumerate(chains[k + 1]):
            for i in range(len(c)):
                face = c[:i] + c[i + 1:]
                entries[(t, index[k][face])] = -1 if i % 2 else 1
        diffs.append(SparseMatrix(len(chains[k + 1]), len(chains[k]), entries))
    return homology_dims(ChainComplexDims([len(l) for l in chains], diffs))


@dataclass
class CofinalityReport:
    functor: str
    n: int
    passed: bool
    targets: List[Dict[str, object]]

    def failing(self) -> List[Dict[str, object]]:
        return [t for t in self.targets if not t["ok"]]

    @property
    def all_terminal(self) -> Optional[bool]:
        """For theta: does every overcategory have a terminal object?"""
        if self.functor != "theta":
            return None
        return all(t["terminal"] is not None for t in self.targets)


def _monotone_maps(a: int, b: int) -> List[Tuple[int, ...]]:
    return [c for c in itertools.combinations_with_replacement(range(b + 1), a + 1)]


def check_cofinality(functor: str, n: int, ceiling: int = FAN_CEILING) -> CofinalityReport:
    """Check that every overcategory F|x of theta_n or phi_n has an acyclic nerve.

    The overcategory over x has objects (T, F(T) -> x), the comma category
    relevant for limits.  For theta the report also records, per target,
    a terminal object when one exists; from n = 2 on some overcategories
    have none although their nerves are still acyclic.
    """
    P = enumerate_fans(n, ceiling)
    th = [theta(T) for T in P.objects]
    targets = []
    if functor == "theta":
        for r in range(1, n + 2):
            for S in itertools.combinations(range(n + 1), r):
                S = frozenset(S)
                over = [t for t in range(len(P)) if th[t] <= S]
                term = [t for t in over if all(P.leq(s, t) for s in over)]
                betti = order_complex_homology(over, P.leq)
                ok = bool(over) and betti[0] == 1 and all(v == 0 for v in betti[1:])
                targets.append({
                    "target": sorted(S),
                    "size": len(over),
                    "terminal": P.objects[term[0]].to_string() if term else None,
                    "betti": betti,
                    "ok": ok,
                })
    elif functor == "phi":
        for m in range(n + 1):
            elems = []
            for t in range(len(P)):
                for f in _monotone_maps(len(th[t]) - 1, m):
                    elems.append((t, f))

            def leq(x, y):
                (t, f), (t2, f2) = x, y
                if not P.leq(t, t2):
                    return False
                g = g_functor(th[t], th[t2])
                return tuple(f2[g[a]] for a in range(len(g))) == f

            betti = order_complex_homology(elems, leq)
            ok = bool(elems) and betti[0] == 1 and all(v == 0 for v in betti[1:])
            targets.append({"target": m, "size": len(elems), "betti": betti, "ok": ok})
    else:
        raise ValueError(f"unknown functor {functor!r}; expected 'theta' or 'phi'")
    return CofinalityReport(functor, n, all(t["ok"] for t in targets), targets)
