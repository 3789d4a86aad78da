"""E1 and E2 pages of the homology spectral sequence for long knots.

Column p of E1 is H_*(K_d(p)) = dual of H*(Conf(p, R^d)), split by weight
k into internal degree q = k(d - 1).  The d1 differential is the alternating
sum of coface pushforwards; we build it as the transpose of the alternating
sum of coface pullbacks from :mod:`confalg`.  The homology of this complex is
the Hochschild homology of the Poisson operad.

Since everything depends on d only through its parity, matrices and ranks
are cached per parity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from . import confalg
from .cosimp import CosimplicialVS
from .linalg import (
    ChainComplexDims,
    SparseMatrix,
    homology_dims,
    rank,
    two_prime_rank,
)

__all__ = [
    "HochschildError",
    "SeriesDivisionFailure",
    "RangeExceeded",
    "BigradedDims",
    "PoincareSeries",
    "Report",
    "coface_alternating_sum",
    "e1_complex",
    "e2_page",
    "normalized_e1_dims",
    "check_above_diagonal",
    "loop_sphere_series",
    "knot_betti_table",
    "certifying_pmax",
    "parity_compare",
    "homology_cosimplicial",
    "P_CEILING",
    "EXACT_PMAX",
]

# Largest cosimplicial level any pipeline will build.
P_CEILING = 9
# Under the two-prime policy, differentials landing in levels above this are
# ranked modulo two primes; at and below it ranks are always exact.
EXACT_PMAX = 6


class HochschildError(Exception):
    pass


class SeriesDivisionFailure(HochschildError, ArithmeticError):
    """A quotient coefficient came out negative or non-integral."""


class RangeExceeded(HochschildError, ValueError):
    """The requested degree range is not certified by the available columns."""


@dataclass
class BigradedDims:
    """Table (p, q) -> dimension for one page; absent keys are zero."""

    d: int
    page_label: str
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)
    p_max: int = 0
    provisional: FrozenSet[Tuple[int, int]] = frozenset()
    provenance: Dict[Tuple[int, int], str] = field(default_factory=dict)
    # (p, q) cells whose two modular ranks disagreed
    disagreements: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        for (p, q), v in self.entries.items():
            if p < 0 or q < 0 or v < 0:
                raise ValueError(f"bad entry ({p}, {q}) -> {v}")
            if q % (self.d - 1):
                raise ValueError(f"internal degree {q} is not a multiple of d-1 = {self.d - 1}")

    def get(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def weight(self, p: int, k: int) -> int:
        return self.get(p, k * (self.d - 1))

    def cells(self) -> List[Tuple[int, int, int]]:
        return [(p, q, v) for (p, q), v in sorted(self.entries.items())]

    def total_degree(self, p: int, q: int) -> int:
        return q - p


@dataclass
class PoincareSeries:
    coefficients: Dict[int, int]
    truncation_degree: int

    def coefficient(self, i: int) -> int:
        if i > self.truncation_degree:
            raise RangeExceeded(f"degree {i} beyond truncation {self.truncation_degree}")
        return self.coefficients.get(i, 0)

    def as_list(self) -> List[int]:
        return [self.coefficient(i) for i in range(self.truncation_degree + 1)]

    def __mul__(self, other: "PoincareSeries") -> "PoincareSeries":
        top = min(self.truncation_degree, other.truncation_degree)
        a, b = self.as_list()[: top + 1], other.as_list()[: top + 1]
        out = {i: sum(a[j] * b[i - j] for j in range(i + 1)) for i in range(top + 1)}
        return PoincareSeries({i: v for i, v in out.items() if v}, top)

    def divide(self, other: "PoincareSeries") -> "PoincareSeries":
        """Power-series quotient, every coefficient checked to be a nonnegative integer."""
        top = min(self.truncation_degree, other.truncation_degree)
        a, b = self.as_list()[: top + 1], other.as_list()[: top + 1]
        if b[0] == 0:
            raise SeriesDivisionFailure("divisor has zero constant term")
        q: List[int] = []
        for i in range(top + 1):
            num = Fraction(a[i] - sum(q[j] * b[i - j] for j in range(i)), b[0])
            if num.denominator != 1 or num < 0:
                raise SeriesDivisionFailure(f"quotient coefficient {num} at degree {i}")
            q.append(int(num))
        return PoincareSeries({i: v for i, v in enumerate(q) if v}, top)


@dataclass
class Report:
    name: str
    passed: bool
    details: Dict[str, object] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict[str, object]:
        return {"name": self.name, "passed": self.passed, "details": self.details, "failures": self.failures}


def _check_d(d: int, minimum: int = 3) -> None:
    if not isinstance(d, int) or d < minimum:
        raise ValueError(f"ambient dimension d must be >= {minimum}, got {d!r}")


# ---------------------------------------------------------------------------
# E1


@lru_cache(maxsize=None)
def coface_alternating_sum(p: int, k: int, parity: int) -> SparseMatrix:
    """sum_{i=0}^{p+1} (-1)^i (d^i)^*: weight k of H*(Conf(p+1)) -> H*(Conf(p))."""
    acc: Dict[Tuple[int, int], int] = {}
    for i in range(p + 2):
        s = -1 if i % 2 else 1
        for key, v in confalg.coface_pullback(i, p, parity + 4, k=k).items():
            acc[key] = acc.get(key, 0) + s * v
    return SparseMatrix(confalg.dimension(p, k), confalg.dimension(p + 1, k), acc)


def _reversal(n: int) -> List[int]:
    return list(range(n - 1, -1, -1))


def _homology_differential(p: int, k: int, parity: int, reverse: bool) -> SparseMatrix:
    m = coface_alternating_sum(p, k, parity).transpose()
    if reverse:
        m = m.permute(_reversal(m.rows), _reversal(m.cols))
    return m


def e1_complex(d: int, p_max: int, reverse: bool = False, weights: Optional[Iterable[int]] = None, check: bool = True) -> Dict[int, ChainComplexDims]:
    """The E1 page as one cochain complex per internal degree q = k(d-1).

    Position p holds the weight-k part of H_*(K_d(p)); the differential
    p -> p+1 is the transposed alternating coface pullback.  ``reverse``
    enumerates every basis in reverse order (a pure relabelling).
    """
    _check_d(d)
    if p_max < 0:
        raise ValueError("p_max must be nonnegative")
    if p_max > P_CEILING:
        raise RangeExceeded(f"p_max {p_max} above ceiling {P_CEILING}")
    parity = d % 2
    ks = range(max(p_max, 1)) if weights is None else weights
    out = {}
    for k in ks:
        spaces = [confalg.dimension(p, k) for p in range(p_max + 1)]
        diffs = [_homology_differential(p, k, parity, reverse) for p in range(p_max)]
        out[k * (d - 1)] = ChainComplexDims(spaces, diffs, check=check)
    return out


@lru_cache(maxsize=None)
def _exact_rank(p: int, k: int, parity: int) -> int:
    return rank(coface_alternating_sum(p, k, parity))


@lru_cache(maxsize=None)
def _modular_rank(p: int, k: int, parity: int, seed: int):
    return two_prime_rank(coface_alternating_sum(p, k, parity), seed=seed)


def e2_page(d: int, p_max: int, prime_policy: str = "exact", seed: int = 0, weights: Optional[Iterable[int]] = None) -> BigradedDims:
    """E2 = homology of each E1 strand, columns 0..p_max.

    Column p_max lacks its outgoing differential and is flagged provisional.
    With ``prime_policy="two-prime"`` the differentials between levels p and
    p+1 with p+1 > EXACT_PMAX are ranked modulo two seeded primes; affected
    cells carry provenance ``"modular"``.
    """
    _check_d(d)
    if prime_policy not in ("exact", "two-prime"):
        raise ValueError(f"unknown prime policy {prime_policy!r}")
    if p_max < 0:
        raise ValueError("p_max must be nonnegative")
    if p_max > P_CEILING:
        raise RangeExceeded(f"p_max {p_max} above ceiling {P_CEILING}")
    parity = d % 2
    ks = list(range(max(p_max, 1))) if weights is None else sorted(set(weights))
    entries: Dict[Tuple[int, int], int] = {}
    prov: Dict[Tuple[int, int], str] = {}
    provisional = set()
    bad = set()
    for k in ks:
        q = k * (d - 1)
        ranks, modular, disagree = [], [], []
        for p in range(p_max):
            if prime_policy == "two-prime" and p + 1 > EXACT_PMAX:
                mr = _modular_rank(p, k, parity, seed)
                ranks.append(mr.rank)
                modular.append(True)
                disagree.append(not mr.agree)
            else:
                ranks.append(_exact_rank(p, k, parity))
                modular.append(False)
                disagree.append(False)
        for p in range(p_max + 1):
            into = ranks[p - 1] if p > 0 else 0
            out = ranks[p] if p < p_max else 0
            v = confalg.dimension(p, k) - into - out
            if v:
                entries[(p, q)] = v
            touched = [t for t in (p - 1, p) if 0 <= t < p_max]
            prov[(p, q)] = "modular" if any(modular[t] for t in touched) else "exact"
            if any(disagree[t] for t in touched):
                bad.add((p, q))
            if p == p_max:
                provisional.add((p, q))
    return BigradedDims(d, "E2", entries, p_max, frozenset(provisional), prov, frozenset(bad))


# ---------------------------------------------------------------------------
# normalised columns


@lru_cache(maxsize=None)
def _degenerate_rank(p: int, k: int, parity: int) -> int:
    if p == 0:
        return 0
    blocks = [confalg.codegeneracy_pullback(j, p, parity + 4, k=k) for j in range(1, p + 1)]
    return rank(SparseMatrix.hstack(blocks))


def normalized_e1_dims(d: int, p_max: int) -> BigradedDims:
    """Dimensions of the conormalised E1 columns.

    Column p is H_*(K(p)) cut down to the common kernel of the codegeneracy
    pushforwards; dually, H*(Conf(p)) modulo the span of all codegeneracy
    pullback images.  Both have dimension dim C_p - rank[s_1^* ... s_p^*].
    """
    _check_d(d)
    if p_max > P_CEILING:
        raise RangeExceeded(f"p_max {p_max} above ceiling {P_CEILING}")
    parity = d % 2
    entries = {}
    for p in range(p_max + 1):
        for k in range(max(p, 1)):
            v = confalg.dimension(p, k) - _degenerate_rank(p, k, parity)
            if v:
                entries[(p, k * (d - 1))] = v
    return BigradedDims(d, "N-E1", entries, p_max)


def check_above_diagonal(d: int, p_max: int) -> Report:
    """Normalised E1 vanishes at every (p, q) with q <= p, p <= p_max.

    Reported, never raised; for d = 3 violations on the diagonal are
    expected and the report is informational.
    """
    _check_d(d)
    table = normalized_e1_dims(d, p_max)
    bad = [(p, q, v) for (p, q), v in sorted(table.entries.items()) if q <= p and (p, q) != (0, 0)]
    rep = Report("above-diagonal", not bad, {"d": d, "p_max": p_max, "informational": d < 4})
    rep.failures = [f"normalized E1 at (p={p}, q={q}) has dim {v}" for p, q, v in bad]
    return rep


# ---------------------------------------------------------------------------
# series


def loop_sphere_series(d: int, degree_max: int) -> PoincareSeries:
    """Poincare series of H_*(Omega^2 S^{d-1}; Q) through ``degree_max``.

    d even: exterior on one class of degree d-3.  d odd: polynomial on a
    class of degree d-3 tensor exterior on one of degree 2d-5.
    """
    _check_d(d, 4)
    a = d - 3
    coeffs: Dict[int, int] = {}
    if d % 2 == 0:
        for i in (0, a):
            if i <= degree_max:
                coeffs[i] = coeffs.get(i, 0) + 1
    else:
        for ext in (0, 2 * d - 5):
            i = ext
            while i <= degree_max:
                coeffs[i] = coeffs.get(i, 0) + 1
                i += a
    return PoincareSeries(coeffs, degree_max)


def _possible_cells(d: int, degree: int) -> List[Tuple[int, int]]:
    """(p, k) with total degree k(d-1) - p = degree where normalised E1 may be nonzero.

    A normalised class on p points uses every point, so ceil(p/2) <= k <= p-1
    (or p = k = 0).
    """
    cells = []
    if degree == 0:
        cells.append((0, 0))
    k = 1
    while k * (d - 3) <= degree:
        p = k * (d - 1) - degree
        if p >= 1 and -(-p // 2) <= k <= p - 1:
            cells.append((p, k))
        k += 1
    return cells


def certifying_pmax(d: int, degree_max: int) -> int:
    """Smallest p_max for which every cell of total degree <= degree_max is non-provisional."""
    _check_d(d, 4)
    top = 0
    for i in range(degree_max + 1):
        for p, _ in _possible_cells(d, i):
            top = max(top, p)
    return top + 1


def knot_betti_table(d: int, degree_max: int, p_max: Optional[int] = None, prime_policy: str = "exact", seed: int = 0) -> Tuple[PoincareSeries, PoincareSeries]:
    """Betti series of Emb-bar(R, R^d) and Emb(R, R^d) through ``degree_max``.

    Emb-bar is read off E2 along total degree q - p; Emb is the quotient by
    the series of Omega^2 S^{d-1}.
    """
    if d < 4:
        raise ValueError("d >= 4 required: convergence for d = 3 is not established")
    if degree_max < 0:
        raise ValueError("degree_max must be nonnegative")
    need = certifying_pmax(d, degree_max)
    if p_max is None:
        p_max = need
    if p_max < need:
        raise RangeExceeded(f"degree {degree_max} needs p_max >= {need}, got {p_max}")
    if p_max > P_CEILING:
        raise RangeExceeded(f"degree {degree_max} needs p_max = {p_max} above ceiling {P_CEILING}")
    ks = sorted({k for i in range(degree_max + 1) for _, k in _possible_cells(d, i)} | {0})
    page = e2_page(d, p_max, prime_policy=prime_policy, seed=seed, weights=ks)
    bar: Dict[int, int] = {}
    for (p, q), v in page.entries.items():
        i = q - p
        if 0 <= i <= degree_max:
            if (p, q) in page.provisional:
                # the last column lacks its outgoing differential; its cells
                # are only harmless where normalised E1 already vanishes
                if (p, q // (d - 1)) in _possible_cells(d, i):
                    raise RangeExceeded(f"cell (p={p}, q={q}) is provisional")
                continue
            bar[i] = bar.get(i, 0) + v
    bar_series = PoincareSeries(bar, degree_max)
    emb = bar_series.divide(loop_sphere_series(d, degree_max))
    return bar_series, emb


def parity_compare(d1: int, d2: int, p_max: int) -> Report:
    """E2 at (p, k(d1-1)) for d1 versus (p, k(d2-1)) for d2."""
    _check_d(d1)
    _check_d(d2)
    if (d1 - d2) % 2:
        raise ValueError("d1 and d2 must have the same parity")
    a, b = e2_page(d1, p_max), e2_page(d2, p_max)
    fails = []
    for p in range(p_max + 1):
        for k in range(max(p_max, 1)):
            x, y = a.weight(p, k), b.weight(p, k)
            if x != y:
                fails.append(f"p={p} k={k}: {x} vs {y}")
    return Report("parity", not fails, {"d1": d1, "d2": d2, "p_max": p_max}, fails)


# ---------------------------------------------------------------------------
# the cosimplicial object itself


def homology_cosimplicial(d: int, top: int, k: int) -> CosimplicialVS:
    """Weight-k part of H_*(K_d(p)), p = 0..top, as a cosimplicial vector space.

    Cofaces are transposed coface pullbacks; s^j: X^{p+1} -> X^p is the
    transposed pullback along forgetting point j+1.
    """
    _check_d(d)
    if top > P_CEILING:
        raise RangeExceeded(f"level {top} above ceiling {P_CEILING}")
    spaces = [confalg.dimension(p, k) for p in range(top + 1)]
    cof = [[confalg.coface_pullback(i, p, d, k=k).transpose() for i in range(p + 2)] for p in range(top)]
    cod = [[confalg.codegeneracy_pullback(j + 1, p + 1, d, k=k).transpose() for j in range(p + 1)] for p in range(top)]
    return CosimplicialVS(spaces, cof, cod)
