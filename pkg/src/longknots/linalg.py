"""Exact sparse linear algebra over the rationals.

Matrices store only their nonzero entries.  Ranks are computed by
fraction-free elimination: every row is first scaled to a primitive integer
vector (this does not change the rank), then rows are combined with integer
multipliers and divided by their content after each step.  Pivots are chosen
Markowitz-style, preferring short rows, sparse columns and unit entries.

A modular rank is provided as an independent cross-check.  By
semicontinuity ``rank_modular(m, p) <= rank(m)`` for every prime ``p``.
"""
from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import sympy

__all__ = [
    "LinalgError",
    "DenominatorCollision",
    "NotAComplex",
    "SparseMatrix",
    "ChainComplexDims",
    "rank",
    "rank_modular",
    "two_prime_rank",
    "choose_primes",
    "rref",
    "kernel_basis",
    "homology_dims",
]

Entry = Tuple[int, int]


class LinalgError(Exception):
    pass


class DenominatorCollision(LinalgError):
    """A stored denominator vanishes modulo the chosen prime."""


class NotAComplex(LinalgError):
    """Two consecutive differentials do not compose to zero."""


def _as_rational(v):
    if isinstance(v, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, Rational):
        f = Fraction(v.numerator, v.denominator)
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"matrix entries must be exact rationals, got {type(v).__name__}")


class SparseMatrix:
    """Immutable rows x cols matrix over Q holding only nonzero entries.

    Entries are Python ints where integral and ``Fraction`` otherwise.
    Iteration order over entries is sorted, so everything derived from a
    matrix is reproducible.
    """

    __slots__ = ("rows", "cols", "_entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[Entry, object]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        clean: Dict[Entry, object] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = _as_rational(v)
            if v:
                clean[(r, c)] = v
        self.rows = rows
        self.cols = cols
        self._entries = clean
        self._hash = None

    @classmethod
    def _trusted(cls, rows, cols, entries):
        # entries already validated, nonzero and normalised
        m = cls.__new__(cls)
        m.rows, m.cols, m._entries, m._hash = rows, cols, entries, None
        return m

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls._trusted(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls._trusted(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[object]]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        entries = {}
        for r, row in enumerate(rows):
            if len(row) != nc:
                raise ValueError("ragged dense matrix")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = v
        return cls(nr, nc, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "SparseMatrix":
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                entries[(r, c)] = v
        return cls(rows, len(columns), entries)

    # -- basic access -------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def items(self) -> Iterator[Tuple[Entry, object]]:
        for key in sorted(self._entries):
            yield key, self._entries[key]

    def get(self, r: int, c: int):
        return self._entries.get((r, c), 0)

    def is_zero(self) -> bool:
        return not self._entries

    def row_dicts(self) -> List[Dict[int, object]]:
        out: List[Dict[int, object]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def column_dicts(self) -> List[Dict[int, object]]:
        out: List[Dict[int, object]] = [dict() for _ in range(self.cols)]
        for (r, c), v in self._entries.items():
            out[c][r] = v
        return out

    def to_dense(self) -> List[List[object]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    # -- algebra ------------------------------------------------------------

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix._trusted(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    T = property(transpose)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: Dict[int, List[Tuple[int, object]]] = defaultdict(list)
        for (k, j), b in other._entries.items():
            by_row[k].append((j, b))
        acc: Dict[Entry, object] = defaultdict(int)
        for (i, k), a in self._entries.items():
            for j, b in by_row.get(k, ()):
                acc[(i, j)] += a * b
        return SparseMatrix(self.rows, other.cols, {key: v for key, v in acc.items() if v})

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        acc = dict(self._entries)
        for key, v in other._entries.items():
            acc[key] = acc.get(key, 0) + v
        return SparseMatrix(self.rows, self.cols, {k: v for k, v in acc.items() if v})

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix._trusted(self.rows, self.cols, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c) -> "SparseMatrix":
        c = _as_rational(c)
        if not c:
            return SparseMatrix.zero(self.rows, self.cols)
        return SparseMatrix(self.rows, self.cols, {k: v * c for k, v in self._entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        """Kronecker product; row (a, b) has index ``a * other.rows + b``."""
        entries = {}
        for (r1, c1), v1 in self._entries.items():
            for (r2, c2), v2 in other._entries.items():
                entries[(r1 * other.rows + r2, c1 * other.cols + c2)] = v1 * v2
        return SparseMatrix._trusted(self.rows * other.rows, self.cols * other.cols, entries)

    def permute(self, row_perm: Optional[Sequence[int]] = None, col_perm: Optional[Sequence[int]] = None) -> "SparseMatrix":
        """Send row r to ``row_perm[r]`` and column c to ``col_perm[c]``."""
        rp = row_perm if row_perm is not None else range(self.rows)
        cp = col_perm if col_perm is not None else range(self.cols)
        return SparseMatrix._trusted(self.rows, self.cols, {(rp[r], cp[c]): v for (r, c), v in self._entries.items()})

    def submatrix(self, rows: Sequence[int], cols: Optional[Sequence[int]] = None) -> "SparseMatrix":
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: i for i, c in enumerate(cols)} if cols is not None else None
        entries = {}
        for (r, c), v in self._entries.items():
            if r in rpos and (cpos is None or c in cpos):
                entries[(rpos[r], cpos[c] if cpos is not None else c)] = v
        return SparseMatrix._trusted(len(rows), len(cols) if cols is not None else self.cols, entries)

    @staticmethod
    def hstack(blocks: Sequence["SparseMatrix"], rows: Optional[int] = None) -> "SparseMatrix":
        if not blocks:
            return SparseMatrix.zero(rows or 0, 0)
        nr = blocks[0].rows
        entries = {}
        off = 0
        for b in blocks:
            if b.rows != nr:
                raise ValueError("hstack row mismatch")
            for (r, c), v in b._entries.items():
                entries[(r, c + off)] = v
            off += b.cols
        return SparseMatrix._trusted(nr, off, entries)

    @staticmethod
    def vstack(blocks: Sequence["SparseMatrix"], cols: Optional[int] = None) -> "SparseMatrix":
        if not blocks:
            return SparseMatrix.zero(0, cols or 0)
        nc = blocks[0].cols
        entries = {}
        off = 0
        for b in blocks:
            if b.cols != nc:
                raise ValueError("vstack column mismatch")
            for (r, c), v in b._entries.items():
                entries[(r + off, c)] = v
            off += b.rows
        return SparseMatrix._trusted(off, nc, entries)

    @staticmethod
    def block_diag(blocks: Sequence["SparseMatrix"]) -> "SparseMatrix":
        entries = {}
        ro = co = 0
        for b in blocks:
            for (r, c), v in b._entries.items():
                entries[(r + ro, c + co)] = v
            ro += b.rows
            co += b.cols
        return SparseMatrix._trusted(ro, co, entries)

    def apply(self, vec: Mapping[int, object]) -> Dict[int, object]:
        """Multiply by a sparse column vector given as ``{index: value}``."""
        out: Dict[int, object] = defaultdict(int)
        for (r, c), v in self._entries.items():
            x = vec.get(c)
            if x:
                out[r] += v * x
        return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# ranks


def _primitive_integer_row(row: Mapping[int, object]) -> Dict[int, int]:
    dens = [v.denominator for v in row.values() if isinstance(v, Fraction)]
    scale = math.lcm(*dens) if dens else 1
    ints = {c: int(v * scale) for c, v in row.items()}
    g = math.gcd(*ints.values()) if ints else 1
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def _eliminate(rows: List[Dict[int, int]], prime: Optional[int] = None) -> int:
    """Destructive sparse elimination; returns the rank.

    Integer mode (``prime is None``) keeps rows primitive, modular mode works
    in GF(prime).  Pivot choice: shortest remaining row, then the column with
    the fewest remaining occurrences, preferring entries of absolute value 1.
    """
    active: Dict[int, Dict[int, int]] = {i: r for i, r in enumerate(rows) if r}
    col_rows: Dict[int, set] = defaultdict(set)
    for i, r in active.items():
        for c in r:
            col_rows[c].add(i)
    rk = 0
    while active:
        i = min(active, key=lambda k: (len(active[k]), k))
        prow = active.pop(i)
        for c in prow:
            col_rows[c].discard(i)
        if prime is None:
            c = min(prow, key=lambda c: (abs(prow[c]) != 1, len(col_rows[c]), c))
        else:
            c = min(prow, key=lambda c: (len(col_rows[c]), c))
        a = prow[c]
        inv = pow(a, -1, prime) if prime is not None else None
        for j in sorted(col_rows[c]):
            r = active[j]
            b = r[c]
            if prime is None:
                g = math.gcd(a, b)
                fa, fb = a // g, b // g
                if fa != 1:
                    for k in r:
                        r[k] *= fa
                for k, v in prow.items():
                    nv = r.get(k, 0) - fb * v
                    if nv:
                        if k not in r:
                            col_rows[k].add(j)
                        r[k] = nv
                    elif k in r:
                        del r[k]
                        col_rows[k].discard(j)
                if r:
                    g = math.gcd(*r.values())
                    if g > 1:
                        for k in r:
                            r[k] //= g
            else:
                f = (b * inv) % prime
                for k, v in prow.items():
                    nv = (r.get(k, 0) - f * v) % prime
                    if nv:
                        if k not in r:
                            col_rows[k].add(j)
                        r[k] = nv
                    elif k in r:
                        del r[k]
                        col_rows[k].discard(j)
            if not r:
                del active[j]
        rk += 1
    return rk


def _oriented_rows(m: SparseMatrix) -> List[Dict[int, object]]:
    # eliminate along the shorter dimension
    return m.row_dicts() if m.rows <= m.cols else m.column_dicts()


def rank(m: SparseMatrix) -> int:
    """Exact rank over Q."""
    if m.is_zero():
        return 0
    rows = [_primitive_integer_row(r) for r in _oriented_rows(m) if r]
    return _eliminate(rows)


def rank_modular(m: SparseMatrix, prime: int) -> int:
    """Rank of the reduction of ``m`` modulo ``prime``.

    Raises ``DenominatorCollision`` when some entry's denominator is divisible
    by ``prime``; callers retry with another prime.
    """
    if prime <= 2 ** 20 or not sympy.isprime(prime):
        raise ValueError(f"expected a prime above 2**20, got {prime}")
    rows = []
    for row in _oriented_rows(m):
        red = {}
        for c, v in row.items():
            if isinstance(v, Fraction):
                if v.denominator % prime == 0:
                    raise DenominatorCollision(f"denominator {v.denominator} divisible by {prime}")
                x = v.numerator * pow(v.denominator, -1, prime) % prime
            else:
                x = v % prime
            if x:
                red[c] = x
        if red:
            rows.append(red)
    return _eliminate(rows, prime)


def choose_primes(seed: int, count: int = 2) -> List[int]:
    """Deterministically pick ``count`` distinct 31-bit primes from ``seed``."""
    rng = random.Random(seed)
    out: List[int] = []
    while len(out) < count:
        p = sympy.nextprime(rng.randrange(2 ** 30, 2 ** 31 - 2 ** 20))
        if p not in out:
            out.append(p)
    return out


@dataclass(frozen=True)
class ModularRank:
    rank: int
    ranks: Tuple[int, ...]
    primes: Tuple[int, ...]

    @property
    def agree(self) -> bool:
        return len(set(self.ranks)) == 1


def two_prime_rank(m: SparseMatrix, seed: int = 0, attempts: int = 8) -> ModularRank:
    """Rank modulo two seeded primes; the larger value is reported.

    Disagreement is exposed through ``ModularRank.agree`` rather than raised.
    """
    rng = random.Random(seed)
    ranks, primes = [], []
    tries = 0
    while len(ranks) < 2:
        if tries >= attempts:
            raise DenominatorCollision("could not find primes avoiding all denominators")
        tries += 1
        p = choose_primes(rng.randrange(2 ** 62), 1)[0]
        if p in primes:
            continue
        try:
            ranks.append(rank_modular(m, p))
        except DenominatorCollision:
            continue
        primes.append(p)
    return ModularRank(max(ranks), tuple(ranks), tuple(primes))


# ---------------------------------------------------------------------------
# reduced row echelon form and kernels


def rref(m: SparseMatrix) -> Tuple[List[int], List[Dict[int, Fraction]]]:
    """Gauss-Jordan elimination over Q in column order.

    Returns ``(pivot_columns, rows)`` where ``rows[t]`` is the reduced row
    whose leading 1 sits in ``pivot_columns[t]``.
    """
    work = [{c: Fraction(v) for c, v in r.items()} for r in m.row_dicts() if r]
    pivots: List[int] = []
    reduced: List[Dict[int, Fraction]] = []
    by_col: Dict[int, Dict[int, Fraction]] = {}
    for row in work:
        # reduce against existing pivots
        changed = True
        while changed and row:
            changed = False
            for c in sorted(row):
                if c in by_col:
                    f = row[c]
                    for k, v in by_col[c].items():
                        nv = row.get(k, 0) - f * v
                        if nv:
                            row[k] = nv
                        else:
                            row.pop(k, None)
                    changed = True
                    break
        if not row:
            continue
        c0 = min(row)
        inv = 1 / row[c0]
        row = {k: v * inv for k, v in row.items()}
        # back-substitute into existing rows
        for other in reduced:
            f = other.get(c0)
            if f:
                for k, v in row.items():
                    nv = other.get(k, 0) - f * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        by_col[c0] = row
        reduced.append(row)
        pivots.append(c0)
    order = sorted(range(len(pivots)), key=lambda t: pivots[t])
    return [pivots[t] for t in order], [reduced[t] for t in order]


def kernel_basis(m: SparseMatrix) -> Tuple[SparseMatrix, List[int]]:
    """Basis of the right kernel as the columns of a matrix ``K``.

    ``K`` restricted to the returned free-column indices is the identity, so
    the coordinates of any kernel vector ``v`` in this basis are simply
    ``[v[f] for f in free]``.
    """
    pivots, rows = rref(m)
    pivset = set(pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    fpos = {f: t for t, f in enumerate(free)}
    entries = {}
    for f, t in fpos.items():
        entries[(f, t)] = 1
    for p, row in zip(pivots, rows):
        for c, v in row.items():
            if c != p:
                entries[(p, fpos[c])] = -v
    return SparseMatrix(m.cols, len(free), entries), free


# ---------------------------------------------------------------------------
# chain complexes


@dataclass(frozen=True)
class ChainComplexDims:
    """Finite complex ``V_0 -> V_1 -> ... -> V_top`` given by dimensions.

    ``differentials[p]`` maps ``V_p`` to ``V_{p+1}`` and has shape
    ``(spaces[p+1], spaces[p])``.  Consecutive composites are checked to be
    zero on construction unless ``check=False``.
    """

    spaces: Tuple[int, ...]
    differentials: Tuple[SparseMatrix, ...]
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "spaces", tuple(self.spaces))
        object.__setattr__(self, "differentials", tuple(self.differentials))
        if len(self.differentials) != max(len(self.spaces) - 1, 0):
            raise ValueError("need exactly one differential between consecutive spaces")
        for p, dm in enumerate(self.differentials):
            if dm.shape != (self.spaces[p + 1], self.spaces[p]):
                raise ValueError(f"differential {p} has shape {dm.shape}, expected {(self.spaces[p + 1], self.spaces[p])}")
        if self.check:
            self.assert_complex()

    def assert_complex(self) -> None:
        for p in range(len(self.differentials) - 1):
            comp = self.differentials[p + 1] @ self.differentials[p]
            if not comp.is_zero():
                raise NotAComplex(f"d[{p + 1}] o d[{p}] has {comp.nnz} nonzero entries")

    def transpose(self) -> "ChainComplexDims":
        """The dual complex, reindexed so that it again increases in position."""
        top = len(self.spaces) - 1
        return ChainComplexDims(
            tuple(reversed(self.spaces)),
            tuple(self.differentials[top - 1 - p].transpose() for p in range(top)),
            check=False,
        )


def homology_dims(c: ChainComplexDims, prime: Optional[int] = None) -> List[int]:
    """dim V_p - rank(d into p) - rank(d out of p), exact unless ``prime`` given."""
    rk = [rank(dm) if prime is None else rank_modular(dm, prime) for dm in c.differentials]
    out = []
    for p, dim in enumerate(c.spaces):
        into = rk[p - 1] if p > 0 else 0
        outof = rk[p] if p < len(rk) else 0
        out.append(dim - into - outof)
    return out
