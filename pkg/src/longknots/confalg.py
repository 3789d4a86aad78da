"""Rational cohomology of ordered configuration spaces Conf(n, R^d).

The algebra is generated by classes g_ij (1 <= i < j <= n) of degree d - 1
subject to

* g_ji = (-1)^d g_ij,
* graded commutativity for generators of degree d - 1, and g_ij^2 = 0,
* the three-term relation g_ij g_jk + g_jk g_ki + g_ki g_ij = 0.

Normal form.  A monomial g_{i1 j1} ... g_{ik jk} is admissible when
j1 < j2 < ... < jk.  Products are normalised by sorting the factors on
``(j, i)`` (with a Koszul sign when d is even) and repeatedly rewriting two
factors that share their larger index with the consequence

    g_aj g_bj = g_ab g_bj - g_ab g_aj        (a < b < j)

of the three-term relation, valid for both parities of d.  Each rewrite
lowers the multiset of second indices, so the process terminates.  An
independent row-reduction oracle (:func:`normalize_by_row_reduction`)
quotients the squarefree monomials by the full relation span and is used in
the tests.

All structure maps depend on d only through its parity, so matrices are
cached per parity.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linalg import SparseMatrix, rank, rref

__all__ = [
    "ConfalgError",
    "IndexOutOfRange",
    "ArityMismatch",
    "GlobalConfig",
    "CohClass",
    "basis",
    "full_basis",
    "basis_index",
    "dimension",
    "stirling_dims",
    "normalize",
    "normalize_word",
    "multiply",
    "coface_pullback",
    "codegeneracy_pullback",
    "insertion_pullback",
    "tensor_basis",
    "relation_quotient_dim",
    "normalize_by_row_reduction",
    "format_monomial",
]

Gen = Tuple[int, int]
Monomial = Tuple[Gen, ...]


class ConfalgError(Exception):
    pass


class IndexOutOfRange(ConfalgError, IndexError):
    pass


class ArityMismatch(ConfalgError, ValueError):
    pass


@dataclass(frozen=True)
class GlobalConfig:
    """Ambient dimension d >= 3; only its parity affects the algebra."""

    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 3:
            raise ValueError(f"ambient dimension must be an integer >= 3, got {self.d!r}")

    @property
    def parity(self) -> int:
        return self.d % 2

    @property
    def generator_degree(self) -> int:
        return self.d - 1

    @property
    def symmetry_sign(self) -> int:
        # g_ji = symmetry_sign * g_ij
        return -1 if self.parity else 1


def _parity(d) -> int:
    if isinstance(d, GlobalConfig):
        return d.parity
    return GlobalConfig(d).parity


# ---------------------------------------------------------------------------
# bases


@lru_cache(maxsize=None)
def basis(n: int, k: int) -> Tuple[Monomial, ...]:
    """Admissible monomials of weight k on n points, in lexicographic order.

    >>> basis(3, 2)
    (((1, 2), (1, 3)), ((1, 2), (2, 3)))
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    out = []
    for js in itertools.combinations(range(2, n + 1), k):
        for is_ in itertools.product(*(range(1, j) for j in js)):
            out.append(tuple(zip(is_, js)))
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> Dict[Monomial, int]:
    return {m: t for t, m in enumerate(basis(n, k))}


def full_basis(n: int) -> Tuple[Monomial, ...]:
    """Concatenation of the weight-k bases for k = 0 .. n-1."""
    return tuple(m for k in range(max(n, 1)) for m in basis(n, k))


def dimension(n: int, k: int) -> int:
    return len(basis(n, k))


def stirling_dims(n: int) -> List[int]:
    """Coefficients of prod_{m=1}^{n-1} (1 + m t), the closed-form oracle."""
    coeffs = [1]
    for m in range(1, n):
        nxt = coeffs + [0]
        for t in range(len(coeffs)):
            nxt[t + 1] += m * coeffs[t]
        coeffs = nxt
    return coeffs


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(f"g{i},{j}" if max(i, j) > 9 else f"g{i}{j}" for i, j in m)


# ---------------------------------------------------------------------------
# normal form by rewriting


def _sort_with_sign(word: Sequence[Gen], parity: int) -> Tuple[Monomial, int]:
    """Sort factors by (j, i); the sign is a permutation sign only for d even."""
    order = sorted(range(len(word)), key=lambda t: (word[t][1], word[t][0]))
    sign = 1
    if parity == 0:
        inv = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
        if inv % 2:
            sign = -1
    return tuple(word[t] for t in order), sign


@lru_cache(maxsize=None)
def _normal_sorted(word: Monomial, parity: int) -> Tuple[Tuple[Monomial, int], ...]:
    # word is sorted by (j, i); duplicates already excluded
    for t in range(len(word) - 1, 0, -1):
        (a, j), (b, j2) = word[t - 1], word[t]
        if j == j2:
            acc: Dict[Monomial, int] = {}
            head, tail = word[: t - 1], word[t + 1:]
            for pair, coef in ((((a, b), (b, j)), 1), (((a, b), (a, j)), -1)):
                for mono, c in _normal_word(head + pair + tail, parity).items():
                    acc[mono] = acc.get(mono, 0) + coef * c
            return tuple((m, c) for m, c in sorted(acc.items()) if c)
    return ((word, 1),)


def _normal_word(word: Sequence[Gen], parity: int) -> Dict[Monomial, int]:
    if len(set(word)) != len(word):
        return {}
    srt, sign = _sort_with_sign(word, parity)
    return {m: sign * c for m, c in _normal_sorted(srt, parity)}


def normalize_word(word: Iterable[Tuple[int, int]], d) -> Dict[Monomial, int]:
    """Normal form of an arbitrary product of generators g_ab (a != b).

    Returns ``{admissible monomial: integer coefficient}``.
    """
    parity = _parity(d)
    canon = []
    sign = 1
    for a, b in word:
        if a == b:
            raise ValueError(f"g_{a}{b} is not a generator")
        if a > b:
            a, b = b, a
            if parity:
                sign = -sign
        canon.append((a, b))
    return {m: sign * c for m, c in _normal_word(tuple(canon), parity).items()}


# ---------------------------------------------------------------------------
# classes


@dataclass(frozen=True)
class CohClass:
    """Element of the weight-k part of H*(Conf(n)) in the admissible basis."""

    arity: int
    weight: int
    d: int
    terms: Dict[Monomial, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            if len(m) != self.weight or any(not (1 <= i < j <= self.arity) for i, j in m):
                raise ValueError(f"monomial {m} does not live in weight {self.weight} on {self.arity} points")
            if any(m[t][1] >= m[t + 1][1] for t in range(len(m) - 1)):
                raise ValueError(f"monomial {m} is not admissible; use normalize")
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def one(cls, n: int, d: int) -> "CohClass":
        return cls(n, 0, d, {(): 1})

    @classmethod
    def generator(cls, a: int, b: int, n: int, d: int) -> "CohClass":
        return normalize(n, [((a, b), 1)], d)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CohClass") -> "CohClass":
        if (self.arity, self.weight) != (other.arity, other.weight):
            raise ArityMismatch("can only add classes of equal arity and weight")
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return CohClass(self.arity, self.weight, self.d, acc)

    def __neg__(self) -> "CohClass":
        return CohClass(self.arity, self.weight, self.d, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.arity == other.arity
        return (self.arity, self.weight, self.d % 2, self.terms) == (other.arity, other.weight, other.d % 2, other.terms)

    def __hash__(self):
        return hash((self.arity, self.weight, frozenset(self.terms.items())))

    def vector(self) -> Dict[int, object]:
        idx = basis_index(self.arity, self.weight)
        return {idx[m]: c for m, c in self.terms.items()}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            parts.append(f"{c:+}*{format_monomial(m)}" if c != 1 else f"+{format_monomial(m)}")
        return " ".join(parts)


def normalize(arity: int, formal_product: Sequence[Tuple[Gen, int]], d) -> CohClass:
    """Express a signed product of generators in the admissible basis.

    ``formal_product`` lists ``((a, b), sign)`` factors; the signs multiply.
    """
    coef = 1
    word = []
    for (a, b), s in formal_product:
        if not (1 <= a <= arity and 1 <= b <= arity):
            raise IndexOutOfRange(f"g_{a}{b} outside arity {arity}")
        coef *= s
        word.append((a, b))
    terms = {m: coef * c for m, c in normalize_word(word, d).items()}
    dd = d.d if isinstance(d, GlobalConfig) else d
    return CohClass(arity, len(word), dd, terms)


def multiply(a: CohClass, b: CohClass) -> CohClass:
    if a.arity != b.arity:
        raise ArityMismatch(f"arities {a.arity} and {b.arity} differ")
    parity = a.d % 2
    acc: Dict[Monomial, object] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for m, c in _normal_word(m1 + m2, parity).items():
                acc[m] = acc.get(m, 0) + c1 * c2 * c
    return CohClass(a.arity, a.weight + b.weight, a.d, acc)


# ---------------------------------------------------------------------------
# structure maps


def _graded(n_rows: int, n_cols: int, block, k: Optional[int]) -> SparseMatrix:
    if k is not None:
        return block(k)
    blocks = [block(kk) for kk in range(max(n_rows, n_cols, 1))]
    return SparseMatrix.block_diag(blocks)


def _pullback_matrix(src_n: int, tgt_n: int, k: int, parity: int, genmap) -> SparseMatrix:
    """Matrix of the algebra map induced by ``genmap`` on weight k.

    Columns index ``basis(src_n, k)``, rows ``basis(tgt_n, k)``; ``genmap``
    returns the image generator (a, b) with a < b, or None for zero.
    """
    idx = basis_index(tgt_n, k)
    entries = {}
    for col, mono in enumerate(basis(src_n, k)):
        word = []
        for g in mono:
            img = genmap(g)
            if img is None:
                break
            word.append(img)
        else:
            for m, c in _normal_word(tuple(word), parity).items():
                entries[(idx[m], col)] = c
    return SparseMatrix(len(idx), len(basis(src_n, k)), entries)


@lru_cache(maxsize=None)
def _coface_block(i: int, n: int, k: int, parity: int) -> SparseMatrix:
    if i == 0:
        def genmap(g):
            a, b = g
            return None if a == 1 else (a - 1, b - 1)
    elif i == n + 1:
        def genmap(g):
            a, b = g
            return None if b == n + 1 else g
    else:
        def genmap(g):
            a, b = g
            if (a, b) == (i, i + 1):
                return None
            return (a if a <= i else a - 1, b if b <= i else b - 1)
    return _pullback_matrix(n + 1, n, k, parity, genmap)


def coface_pullback(i: int, n: int, d, k: Optional[int] = None) -> SparseMatrix:
    """Pullback along the coface d^i: K(n) -> K(n+1), i in 0..n+1.

    Maps H*(Conf(n+1)) to H*(Conf(n)); restricted to weight k when given,
    otherwise block diagonal over all weights in :func:`full_basis` order.
    For 1 <= i <= n point i is doubled, so g_{i,i+1} dies and the remaining
    indices collapse; i = 0 and i = n+1 add a far-away point at either end,
    killing every generator that involves it.
    """
    if n < 0 or not (0 <= i <= n + 1):
        raise IndexOutOfRange(f"coface index {i} outside 0..{n + 1}")
    parity = _parity(d)
    return _graded(n, n + 1, lambda kk: _coface_block(i, n, kk, parity), k)


@lru_cache(maxsize=None)
def _codegeneracy_block(j: int, n: int, k: int, parity: int) -> SparseMatrix:
    def genmap(g):
        a, b = g
        return (a if a < j else a + 1, b if b < j else b + 1)
    return _pullback_matrix(n - 1, n, k, parity, genmap)


def codegeneracy_pullback(j: int, n: int, d, k: Optional[int] = None) -> SparseMatrix:
    """Pullback along forgetting point j (1-based): H*(Conf(n-1)) -> H*(Conf(n)).

    This is the codegeneracy s^{j-1}: K(n) -> K(n-1) in 0-based cosimplicial
    indexing, i.e. x o_j e.
    """
    if n < 1 or not (1 <= j <= n):
        raise IndexOutOfRange(f"codegeneracy index {j} outside 1..{n}")
    parity = _parity(d)
    return _graded(n, n - 1, lambda kk: _codegeneracy_block(j, n, kk, parity), k)


@lru_cache(maxsize=None)
def tensor_basis(p: int, q: int, k: int) -> Tuple[Tuple[Monomial, Monomial], ...]:
    """Basis of weight k in H*(Conf(p)) (x) H*(Conf(q)), ordered by (k1, m1, m2)."""
    out = []
    for k1 in range(k + 1):
        for m1 in basis(p, k1):
            for m2 in basis(q, k - k1):
                out.append((m1, m2))
    return tuple(out)


@lru_cache(maxsize=None)
def _tensor_index(p: int, q: int, k: int) -> Dict[Tuple[Monomial, Monomial], int]:
    return {b: t for t, b in enumerate(tensor_basis(p, q, k))}


@lru_cache(maxsize=None)
def _insertion_block(i: int, p: int, q: int, k: int, parity: int) -> SparseMatrix:
    n = p + q - 1
    idx = _tensor_index(p, q, k)
    entries = {}
    cols = basis(n, k)
    for col, mono in enumerate(cols):
        if q == 0:
            # o_i e forgets point i of the outer configuration
            left = [(a if a < i else a + 1, b if b < i else b + 1) for a, b in mono]
            right: List[Gen] = []
            sign = 1
        else:
            lo, hi = i, i + q - 1

            def c(x):
                return x if x < lo else (i if x <= hi else x - q + 1)

            left, right = [], []
            swaps = 0
            for a, b in mono:
                if lo <= a and b <= hi:
                    right.append((a - i + 1, b - i + 1))
                else:
                    left.append((c(a), c(b)))
                    swaps += len(right)
            sign = -1 if (parity == 0 and swaps % 2) else 1
        lnf = _normal_word(tuple(left), parity)
        if not lnf:
            continue
        rnf = _normal_word(tuple(right), parity)
        for m1, c1 in lnf.items():
            for m2, c2 in rnf.items():
                entries[(idx[(m1, m2)], col)] = sign * c1 * c2
    return SparseMatrix(len(idx), len(cols), entries)


def insertion_pullback(i: int, p: int, q: int, d, k: Optional[int] = None) -> SparseMatrix:
    """Pullback along o_i: K(p) x K(q) -> K(p+q-1).

    Maps H*(Conf(p+q-1)) to H*(Conf(p)) (x) H*(Conf(q)).  Generators with
    both ends in the block {i, ..., i+q-1} go to the inner factor, all others
    to the outer factor with the block collapsed to i.  Moving inner factors
    to the right past outer ones costs the Koszul sign (-1)^{(d-1)^2}.
    """
    if p < 1 or q < 0 or not (1 <= i <= p):
        raise IndexOutOfRange(f"slot {i} outside 1..{p}")
    parity = _parity(d)
    if k is not None:
        return _insertion_block(i, p, q, k, parity)
    n = p + q - 1
    return SparseMatrix.block_diag([_insertion_block(i, p, q, kk, parity) for kk in range(max(n, p, q, 1))])


# ---------------------------------------------------------------------------
# row-reduction oracle


def _ambient(n: int, k: int) -> List[Monomial]:
    gens = sorted(itertools.combinations(range(1, n + 1), 2), key=lambda g: (g[1], g[0]))
    return [tuple(c) for c in itertools.combinations(gens, k)]


def _ambient_vector(word: Sequence[Gen], parity: int) -> Dict[Monomial, int]:
    # product in the free graded-commutative algebra modulo squares
    canon, sign = [], 1
    for a, b in word:
        if a > b:
            a, b = b, a
            if parity:
                sign = -sign
        canon.append((a, b))
    if len(set(canon)) != len(canon):
        return {}
    srt, s = _sort_with_sign(canon, parity)
    return {srt: sign * s}


def _relation_rows(n: int, k: int, parity: int) -> List[Dict[Monomial, int]]:
    rows = []
    if k < 2:
        return rows
    for i, j, l in itertools.combinations(range(1, n + 1), 3):
        arnold = [((i, j), (j, l)), ((j, l), (l, i)), ((l, i), (i, j))]
        for rest in _ambient(n, k - 2):
            vec: Dict[Monomial, int] = {}
            for pair in arnold:
                for m, c in _ambient_vector(pair + rest, parity).items():
                    vec[m] = vec.get(m, 0) + c
            vec = {m: c for m, c in vec.items() if c}
            if vec:
                rows.append(vec)
    return rows


def _is_admissible(m: Monomial) -> bool:
    return all(m[t][1] < m[t + 1][1] for t in range(len(m) - 1))


@lru_cache(maxsize=None)
def _relation_rref(n: int, k: int, parity: int):
    amb = _ambient(n, k)
    # non-admissible monomials first so that they become pivots
    order = sorted(amb, key=lambda m: (_is_admissible(m), m))
    pos = {m: t for t, m in enumerate(order)}
    rows = _relation_rows(n, k, parity)
    mat = SparseMatrix(len(rows), len(order), {(r, pos[m]): c for r, row in enumerate(rows) for m, c in row.items()})
    pivots, red = rref(mat)
    return order, pos, pivots, red


def relation_quotient_dim(n: int, k: int, d) -> int:
    """dim of the weight-k quotient of squarefree monomials by the relation span."""
    parity = _parity(d)
    amb = _ambient(n, k)
    pos = {m: t for t, m in enumerate(amb)}
    rows = _relation_rows(n, k, parity)
    mat = SparseMatrix(len(rows), len(amb), {(r, pos[m]): c for r, row in enumerate(rows) for m, c in row.items()})
    return len(amb) - rank(mat)


def normalize_by_row_reduction(word: Sequence[Gen], n: int, d) -> Dict[Monomial, object]:
    """Oracle normal form: reduce ``word`` modulo the full relation span.

    Raises ``ConfalgError`` if an admissible monomial ever becomes a pivot,
    which would mean the admissible monomials are linearly dependent.
    """
    parity = _parity(d)
    k = len(word)
    order, pos, pivots, red = _relation_rref(n, k, parity)
    by_pivot = dict(zip(pivots, red))
    for p in pivots:
        if _is_admissible(order[p]):
            raise ConfalgError("admissible monomials are dependent modulo relations")
    vec = {pos[m]: c for m, c in _ambient_vector(word, parity).items()}
    out: Dict[Monomial, object] = {}
    for col, c in vec.items():
        if col in by_pivot:
            for cc, v in by_pivot[col].items():
                if cc != col:
                    out[order[cc]] = out.get(order[cc], 0) - c * v
        else:
            out[order[col]] = out.get(order[col], 0) + c
    return {m: (int(c) if getattr(c, "denominator", 1) == 1 else c) for m, c in out.items() if c}
