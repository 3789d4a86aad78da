"""Admissible graph complexes D_d(n).

A graph has external vertices 1..n and internal vertices n+1..n+q.  It is
admissible when it has no loops or double edges, every internal vertex has
valence >= 3 and every internal vertex is joined by a path to an external
one.  Its degree is e(d-1) - qd.

Orientation data (the sign regime depends only on the parity of d):

* d even: an ordering of the edges; swapping two edges flips the sign.
* d odd: an ordering of the internal vertices (their label order) and a
  direction on every edge; reversing an edge or swapping two internal
  vertices flips the sign.

The canonical representative of a graph orients it in the standard way
(edges sorted, each directed from smaller to larger label) after the
relabelling of internal vertices that minimises the sorted edge list.

The differential contracts every edge with at least one internal end:

* d even: the edge at position t contributes (-1)^t.
* d odd: contracting edge u -> v and deleting the internal vertex w in
  {u, v} contributes (-1)^pos(w), times -1 when the edge points from w to
  the surviving vertex.  For two internal ends either choice gives the same
  term.

A contraction that creates a double edge gives zero.  Each contraction
preserves the loop order b1 = e - V + c, so the complex splits into finite
loop-order sectors.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import confalg
from .linalg import ChainComplexDims, SparseMatrix, homology_dims, rank

__all__ = [
    "GraphError",
    "ResourceBound",
    "WindowNotClosed",
    "AdmissibleGraph",
    "GraphClass",
    "canonicalize",
    "enumerate_graphs",
    "graphs_with",
    "differential",
    "i_bar",
    "glue",
    "graph_cohomology",
    "closed_window",
    "sector_q_bound",
    "check_degree_bound",
    "loop_order",
    "tripod",
    "single_edge",
    "serialize",
    "parse",
    "ENUMERATION_CEILING",
]

# Largest number of candidate edge sets a single (n, q, e) cell may scan.
ENUMERATION_CEILING = 3_000_000

Edge = Tuple[int, int]


class GraphError(Exception):
    pass


class ResourceBound(GraphError):
    pass


class WindowNotClosed(GraphError):
    pass


def _sign_of(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    s = 1
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                s = -s
    return s


@dataclass(frozen=True, order=True)
class AdmissibleGraph:
    """Canonical representative; ``edges`` sorted, each as (smaller, larger)."""

    n: int
    q: int
    edges: Tuple[Edge, ...]
    parity: int

    @property
    def e(self) -> int:
        return len(self.edges)

    def degree(self, d: int) -> int:
        if d % 2 != self.parity:
            raise ValueError("graph was built for the other parity of d")
        return self.e * (d - 1) - self.q * d

    def valence(self, v: int) -> int:
        return sum(1 for a, b in self.edges if v in (a, b))

    def components(self) -> int:
        return _components(self.n + self.q, self.edges)

    def loop_order(self) -> int:
        return self.e - (self.n + self.q) + self.components()


def _components(nv: int, edges: Iterable[Edge]) -> int:
    parent = list(range(nv + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(v) for v in range(1, nv + 1)})


def loop_order(g: AdmissibleGraph) -> int:
    return g.loop_order()


def is_admissible(n: int, q: int, edges: Sequence[Edge]) -> bool:
    nv = n + q
    seen = set()
    val = [0] * (nv + 1)
    for a, b in edges:
        if a == b or not (1 <= a <= nv and 1 <= b <= nv):
            return False
        key = (min(a, b), max(a, b))
        if key in seen:
            return False
        seen.add(key)
        val[a] += 1
        val[b] += 1
    if any(val[v] < 3 for v in range(n + 1, nv + 1)):
        return False
    if q:
        # every internal vertex reaches an external one
        adj: Dict[int, List[int]] = {v: [] for v in range(1, nv + 1)}
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        reach = set(range(1, n + 1))
        stack = list(reach)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in reach:
                    reach.add(y)
                    stack.append(y)
        if len(reach) != nv:
            return False
    return True


# ---------------------------------------------------------------------------
# canonical forms


def _colour_blocks(n: int, q: int, edges: Sequence[Edge]) -> List[List[int]]:
    """Internal vertices grouped by an isomorphism invariant, blocks sorted."""
    info = {}
    for v in range(n + 1, n + q + 1):
        nbrs = [b if a == v else a for a, b in edges if v in (a, b)]
        ext = tuple(sorted(x for x in nbrs if x <= n))
        info[v] = (len(nbrs), ext)
    keys = sorted(set(info.values()))
    return [[v for v in range(n + 1, n + q + 1) if info[v] == k] for k in keys]


def _oriented_key(n: int, q: int, edges: Sequence[Edge], parity: int, relabel: Dict[int, int]):
    """Relabel, then return (sorted undirected edges, sign to the standard orientation)."""
    new = [(relabel.get(a, a), relabel.get(b, b)) for a, b in edges]
    sign = 1
    if parity:
        # vertex order is label order: relabelling internals permutes it
        perm = [relabel[v] - n - 1 for v in range(n + 1, n + q + 1)]
        sign = _sign_of(perm)
        flat = []
        for a, b in new:
            if a > b:
                a, b = b, a
                sign = -sign
            flat.append((a, b))
        return tuple(sorted(flat)), sign
    flat = [(min(a, b), max(a, b)) for a, b in new]
    order = sorted(range(len(flat)), key=lambda t: flat[t])
    return tuple(flat[t] for t in order), _sign_of(order)


def canonicalize(n: int, q: int, edges: Sequence[Edge], d) -> Tuple[Optional[AdmissibleGraph], int]:
    """Return (canonical graph, sign) with given oriented graph = sign * canonical.

    ``edges`` carries the orientation: its order for d even, the directions
    for d odd.  A graph with an orientation-reversing automorphism returns
    ``(None, 0)``.
    """
    parity = d % 2
    if not is_admissible(n, q, edges):
        raise GraphError(f"not an admissible graph: n={n} q={q} edges={list(edges)}")
    blocks = _colour_blocks(n, q, edges)
    best = None
    signs = set()
    targets = []
    start = n + 1
    for blk in blocks:
        targets.append(list(range(start, start + len(blk))))
        start += len(blk)
    for choice in itertools.product(*(itertools.permutations(t) for t in targets)):
        relabel = {}
        for blk, img in zip(blocks, choice):
            relabel.update(zip(blk, img))
        key, sign = _oriented_key(n, q, edges, parity, relabel)
        if best is None or key < best:
            best, signs = key, {sign}
        elif key == best:
            signs.add(sign)
    if len(signs) > 1:
        return None, 0
    return AdmissibleGraph(n, q, best, parity), signs.pop()


@dataclass
class GraphClass:
    """Linear combination of canonical graphs."""

    n: int
    d: int
    terms: Dict[AdmissibleGraph, object] = field(default_factory=dict)

    def add(self, n_q_edges: Tuple[int, Sequence[Edge]], coef=1) -> None:
        q, edges = n_q_edges
        g, s = canonicalize(self.n, q, edges, self.d)
        if g is None or not coef:
            return
        v = self.terms.get(g, 0) + s * coef
        if v:
            self.terms[g] = v
        else:
            self.terms.pop(g, None)

    @classmethod
    def of(cls, g: AdmissibleGraph, d: int, coef=1) -> "GraphClass":
        if g.parity != d % 2:
            raise ValueError("parity mismatch")
        return cls(g.n, d, {g: coef} if coef else {})

    @classmethod
    def from_edges(cls, n: int, q: int, edges: Sequence[Edge], d: int, coef=1) -> "GraphClass":
        out = cls(n, d)
        out.add((q, edges), coef)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GraphClass") -> "GraphClass":
        out = GraphClass(self.n, self.d, dict(self.terms))
        for g, c in other.terms.items():
            v = out.terms.get(g, 0) + c
            if v:
                out.terms[g] = v
            else:
                out.terms.pop(g, None)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, GraphClass) and (self.n, self.d % 2, self.terms) == (other.n, other.d % 2, other.terms)


def single_edge(d: int, a: int = 1, b: int = 2, n: int = 2) -> AdmissibleGraph:
    g, _ = canonicalize(n, 0, [(a, b)], d)
    return g


def tripod(d: int) -> AdmissibleGraph:
    g, _ = canonicalize(3, 1, [(1, 4), (2, 4), (3, 4)], d)
    return g


# ---------------------------------------------------------------------------
# differential


def _contract_terms(g: AdmissibleGraph) -> List[Tuple[int, int, List[Edge]]]:
    """Signed contractions of the standard orientation of ``g``.

    Returns (sign, q-1, oriented edge list) triples; double edges dropped.
    """
    n, q = g.n, g.q
    out = []
    for t, (a, b) in enumerate(g.edges):
        if b <= n:
            continue  # both ends external
        # remove the larger label: b is internal since a < b and b > n
        removed, kept = b, a
        if g.parity:
            pos = removed - n - 1
            # standard orientation directs a -> b, i.e. kept -> removed
            sign = -1 if pos % 2 else 1
        else:
            sign = -1 if t % 2 else 1
        new_edges = []
        for s, (x, y) in enumerate(g.edges):
            if s == t:
                continue
            x = kept if x == removed else x
            y = kept if y == removed else y
            x = x - 1 if x > removed else x
            y = y - 1 if y > removed else y
            new_edges.append((x, y))
        undirected = [(min(x, y), max(x, y)) for x, y in new_edges]
        if len(set(undirected)) != len(undirected):
            continue
        out.append((sign, q - 1, new_edges))
    return out


@lru_cache(maxsize=None)
def _differential_of(g: AdmissibleGraph) -> Tuple[Tuple[AdmissibleGraph, int], ...]:
    acc: Dict[AdmissibleGraph, int] = {}
    for sign, q, edges in _contract_terms(g):
        h, s = canonicalize(g.n, q, edges, g.parity + 4)
        if h is None:
            continue
        acc[h] = acc.get(h, 0) + sign * s
    return tuple((h, c) for h, c in sorted(acc.items()) if c)


def differential(x: GraphClass) -> GraphClass:
    """Degree +1 contraction differential, extended linearly."""
    out: Dict[AdmissibleGraph, object] = {}
    for g, c in x.terms.items():
        for h, s in _differential_of(g):
            out[h] = out.get(h, 0) + c * s
    return GraphClass(x.n, x.d, {h: v for h, v in out.items() if v})


def i_bar(x: GraphClass) -> confalg.CohClass:
    """Projection to H*(Conf(n)): graphs with internal vertices die; a graph
    without them maps to the ordered product of its edge generators."""
    weights = {g.e for g in x.terms if g.q == 0}
    if len(weights) > 1:
        raise GraphError("i_bar of an inhomogeneous class")
    k = weights.pop() if weights else 0
    acc: Dict = {}
    for g, c in x.terms.items():
        if g.q:
            continue
        for m, v in confalg.normalize_word(g.edges, x.d).items():
            acc[m] = acc.get(m, 0) + c * v
    return confalg.CohClass(x.n, k, x.d, acc)


def glue(g1: AdmissibleGraph, g2: AdmissibleGraph, d: int) -> GraphClass:
    """Product: union along the common external vertices (zero on double edges)."""
    if g1.n != g2.n or g1.parity != g2.parity:
        raise GraphError("can only glue graphs on the same external vertices")
    n = g1.n
    shift = g1.q
    e2 = [(a if a <= n else a + shift, b if b <= n else b + shift) for a, b in g2.edges]
    edges = list(g1.edges) + e2
    und = [(min(a, b), max(a, b)) for a, b in edges]
    if len(set(und)) != len(und):
        return GraphClass(n, d)
    return GraphClass.from_edges(n, g1.q + g2.q, edges, d)


# ---------------------------------------------------------------------------
# enumeration


def _edge_count(degree: int, q: int, d: int) -> Optional[int]:
    num = degree + q * d
    if num < 0 or num % (d - 1):
        return None
    return num // (d - 1)


@lru_cache(maxsize=None)
def graphs_with(n: int, q: int, e: int, parity: int) -> Tuple[AdmissibleGraph, ...]:
    """All nonzero canonical admissible graphs with the given counts."""
    nv = n + q
    pairs = list(itertools.combinations(range(1, nv + 1), 2))
    if e > len(pairs) or 2 * e < 3 * q:
        return ()
    found = set()
    for count, sub in enumerate(_edge_subsets(n, q, e, pairs)):
        if count >= ENUMERATION_CEILING:
            raise ResourceBound(f"cell n={n} q={q} e={e} exceeds {ENUMERATION_CEILING} candidate edge sets")
        # internal valences nonincreasing in label: every graph has such a labelling
        val = [0] * (nv + 1)
        for a, b in sub:
            val[a] += 1
            val[b] += 1
        if any(val[v] < val[v + 1] for v in range(n + 1, nv)):
            continue
        if not is_admissible(n, q, sub):
            continue
        g, s = canonicalize(n, q, sub, parity + 4)
        if g is not None:
            found.add(g)
    return tuple(sorted(found))


def _edge_subsets(n: int, q: int, e: int, pairs: Sequence[Edge]):
    """e-subsets of ``pairs`` in which every internal vertex can reach valence 3.

    Backtracking over the pairs in order, pruning when some internal vertex
    can no longer collect three edges or the total deficit exceeds what the
    remaining edges can cover.
    """
    nv = n + q
    avail = [0] * (nv + 1)
    for a, b in pairs:
        avail[a] += 1
        avail[b] += 1
    val = [0] * (nv + 1)
    chosen: List[Edge] = []
    internal = range(n + 1, nv + 1)

    def rec(t: int):
        left = e - len(chosen)
        if left == 0:
            if all(val[v] >= 3 for v in internal):
                yield tuple(chosen)
            return
        if len(pairs) - t < left:
            return
        deficit = sum(max(0, 3 - val[v]) for v in internal)
        if deficit > 2 * left:
            return
        a, b = pairs[t]
        avail[a] -= 1
        avail[b] -= 1
        # take the pair
        val[a] += 1
        val[b] += 1
        chosen.append((a, b))
        yield from rec(t + 1)
        chosen.pop()
        val[a] -= 1
        val[b] -= 1
        # skip it, if both ends can still reach valence 3
        if all(v <= n or val[v] + avail[v] >= 3 for v in (a, b)):
            yield from rec(t + 1)
        avail[a] += 1
        avail[b] += 1

    yield from rec(0)


def enumerate_graphs(n: int, d: int, degree: int, q_max: int, loop_order: Optional[int] = None) -> List[AdmissibleGraph]:
    """Canonical admissible graphs of the given degree with q <= q_max."""
    if d < 3:
        raise ValueError("d >= 3 required")
    out = []
    for q in range(q_max + 1):
        e = _edge_count(degree, q, d)
        if e is None:
            continue
        for g in graphs_with(n, q, e, d % 2):
            if loop_order is None or g.loop_order() == loop_order:
                out.append(g)
    return out


def _may_exist(n: int, q: int, e: int, loop: Optional[int] = None) -> bool:
    """Necessary conditions for an admissible graph with these counts."""
    if q == 0:
        return e <= math.comb(n, 2) and (loop is None or any(e - n + c == loop for c in range(1, n + 1)))
    if e > math.comb(n + q, 2) or 2 * e < 3 * q + 1:
        return False
    # each component meets an external vertex, so 1 <= c <= n
    cs = range(1, n + 1)
    if loop is not None:
        return any(e - n - q + c == loop for c in cs)
    return any(e - n - q + c >= 0 for c in cs)


def _q_limit(degree: int, d: int) -> int:
    # 2e >= 3q forces q(d-3) <= 2 * degree
    return (2 * degree) // (d - 3) if d > 3 else -1


def closed_window(n: int, d: int, q_max: int) -> int:
    """Largest D such that every degree 0..D is computable with q <= q_max.

    Degree D is closed when no admissible graph with q > q_max has degree
    D - 1 or D; the differential lowers q, so those two degrees suffice.
    Returns -1 if even degree 0 is open; d = 3 never closes.
    """
    if d <= 3:
        return -1

    def open_at(D: int) -> bool:
        if D < 0:
            return False
        for q in range(q_max + 1, _q_limit(D, d) + 1):
            e = _edge_count(D, q, d)
            if e is not None and _may_exist(n, q, e):
                return True
        return False

    D = 0
    while not (open_at(D - 1) or open_at(D)):
        D += 1
        if D > 200:
            break
    return D - 1


def sector_q_bound(n: int, loop: int) -> int:
    """Largest q that a loop-order ``loop`` admissible graph on n externals can have."""
    # e = n + q - c + loop and 2e >= 3q + 1 give q <= 2(n - c + loop) - 1, c >= 1
    return max(2 * (n - 1 + loop) - 1, 0)


def _differential_matrix(src: Sequence[AdmissibleGraph], tgt: Sequence[AdmissibleGraph]) -> SparseMatrix:
    pos = {g: t for t, g in enumerate(tgt)}
    entries = {}
    for col, g in enumerate(src):
        for h, c in _differential_of(g):
            if h not in pos:
                raise GraphError(f"differential leaves the enumerated window: {h}")
            entries[(pos[h], col)] = c
    return SparseMatrix(len(tgt), len(src), entries)


def graph_cohomology(n: int, d: int, degree_max: int, q_max: int, loop_order: Optional[int] = None) -> Dict[int, int]:
    """Cohomology dims of D_d(n) in degrees 0..degree_max.

    Without ``loop_order`` the window must be closed for ``q_max`` (see
    :func:`closed_window`).  With ``loop_order`` only that sector is used; a
    sector is finite and is complete once ``q_max >= sector_q_bound``.
    """
    if d < 3:
        raise ValueError("d >= 3 required")
    if loop_order is None:
        top = closed_window(n, d, q_max)
        if degree_max > top:
            raise WindowNotClosed(f"degrees up to {degree_max} need more than q_max = {q_max} (closed through {top})")
    elif q_max < sector_q_bound(n, loop_order):
        raise WindowNotClosed(f"loop order {loop_order} sector needs q_max >= {sector_q_bound(n, loop_order)}")
    cells = {D: enumerate_graphs(n, d, D, q_max, loop_order) for D in range(-1, degree_max + 2)}
    diffs = [_differential_matrix(cells[D], cells[D + 1]) for D in range(-1, degree_max + 1)]
    cx = ChainComplexDims([len(cells[D]) for D in range(-1, degree_max + 2)], diffs)
    h = homology_dims(cx)
    # positions 1..degree_max+1 are degrees 0..degree_max; the last is
    # computed against the full next degree, the first has nothing below
    return {D: h[D + 1] for D in range(0, degree_max + 1)}


# ---------------------------------------------------------------------------
# degree bound


@dataclass
class DegreeBoundReport:
    passed: bool
    checked: int
    failures: List[str]


def check_degree_bound(n: int, d: int, q_max: int) -> DegreeBoundReport:
    """deg >= q(d-3)/2 + n(d-1)/2 and, for n >= 2, deg > n - 2, over all
    admissible graphs with q <= q_max and no isolated external vertex."""
    fails, checked = [], 0
    for q in range(q_max + 1):
        for e in range(math.comb(n + q, 2) + 1):
            for g in graphs_with(n, q, e, d % 2):
                if any(g.valence(v) == 0 for v in range(1, n + 1)):
                    continue
                checked += 1
                deg = g.degree(d)
                if 2 * deg < q * (d - 3) + n * (d - 1):
                    fails.append(f"{serialize(g, d)!r}: degree {deg} below bound")
                if n >= 2 and not deg > n - 2:
                    fails.append(f"{serialize(g, d)!r}: degree {deg} <= n - 2")
    return DegreeBoundReport(not fails, checked, fails)


# ---------------------------------------------------------------------------
# serialization


def serialize(g: AdmissibleGraph, d: int, sign: int = 1) -> str:
    """Header ``n q d sign`` then one ``u v`` line per edge in orientation order."""
    if d % 2 != g.parity:
        raise ValueError("parity mismatch")
    lines = [f"{g.n} {g.q} {d} {sign:+d}"]
    lines += [f"{a} {b}" for a, b in g.edges]
    return "\n".join(lines) + "\n"


def parse(text: str) -> Tuple[Optional[AdmissibleGraph], int, int]:
    """Inverse of :func:`serialize`: returns (canonical graph, sign, d)."""
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 4:
        raise GraphError("missing header 'n q d sign'")
    n, q, d, sign = (int(x) for x in rows[0])
    edges = []
    for r in rows[1:]:
        if len(r) != 2:
            raise GraphError(f"bad edge line {' '.join(r)!r}")
        edges.append((int(r[0]), int(r[1])))
    g, s = canonicalize(n, q, edges, d)
    return g, sign * s, d
