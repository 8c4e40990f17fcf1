"""Empirical subcopula of a bivariate sample and its monotone dependence."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .subcopula import (
    DependenceReport,
    GridDomain,
    GridPoint,
    Subcopula,
    _finish,
    bound_gaps,
)

# rows of the count matrix materialised at once while scanning for the suprema
_BLOCK_CELLS = 1 << 21


def _as_column(a) -> tuple[np.ndarray, np.ndarray]:
    """Column values and missing mask. NaN and None are missing."""
    arr = np.asarray(a)
    if arr.ndim != 1:
        raise ValueError("sample columns must be one-dimensional")
    if arr.dtype == object:
        missing = np.array([v is None or (isinstance(v, float) and v != v) for v in arr], dtype=bool)
        kept = [v for v, m in zip(arr.tolist(), missing) if not m]
        if all(isinstance(v, int) and not isinstance(v, bool) for v in kept):
            # ints beyond float64 precision keep their exact order
            return np.array([0 if m else v for v, m in zip(arr.tolist(), missing)], dtype=object), missing
        try:
            out = np.array([np.nan if m else float(v) for v, m in zip(arr.tolist(), missing)])
        except (TypeError, ValueError):
            raise ValueError("non-numeric values in sample column") from None
        return out, missing
    if arr.dtype == bool:
        return arr.astype(np.int64), np.zeros(arr.shape, dtype=bool)
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"non-numeric column of dtype {arr.dtype}")
    if np.issubdtype(arr.dtype, np.complexfloating):
        raise ValueError("complex values cannot be ordered")
    if np.issubdtype(arr.dtype, np.floating):
        return arr, np.isnan(arr)
    return arr, np.zeros(arr.shape, dtype=bool)


@dataclass(frozen=True, eq=False)
class BivariateSample:
    """Paired observations with incomplete pairs already removed.

    Build with :meth:`from_arrays`; ``NaN`` and ``None`` mark missing values and
    the whole pair is dropped. Infinities are kept as ordinary ordered values.
    """

    x: np.ndarray
    y: np.ndarray
    dropped: int = 0

    def __post_init__(self):
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have the same length")
        if self.x.size == 0:
            raise ValueError("empty sample: no complete pairs")

    @classmethod
    def from_arrays(cls, x, y) -> "BivariateSample":
        x, mx = _as_column(x)
        y, my = _as_column(y)
        if x.shape != y.shape:
            raise ValueError(f"x has {x.size} values, y has {y.size}")
        keep = ~(mx | my)
        return cls(x[keep], y[keep], int(keep.size - keep.sum()))

    @property
    def n(self) -> int:
        return int(self.x.size)

    def swapped(self) -> "BivariateSample":
        return BivariateSample(self.y, self.x, self.dropped)


@dataclass(frozen=True, eq=False)
class EmpiricalGrid:
    """Distinct sorted values, integer frequencies and integer-coded pairs."""

    distinct_x: np.ndarray
    distinct_y: np.ndarray
    counts_x: np.ndarray
    counts_y: np.ndarray
    codes_x: np.ndarray
    codes_y: np.ndarray
    n: int

    @property
    def m1(self) -> int:
        return int(self.distinct_x.size)

    @property
    def m2(self) -> int:
        return int(self.distinct_y.size)

    @property
    def p1(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.n) for c in self.counts_x)

    @property
    def p2(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.n) for c in self.counts_y)

    @property
    def cum_x(self) -> np.ndarray:
        """Numerators of q1 over n, leading 0 included."""
        return np.concatenate(([0], np.cumsum(self.counts_x)))

    @property
    def cum_y(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.counts_y)))

    @property
    def q1(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.n) for c in self.cum_x)

    @property
    def q2(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.n) for c in self.cum_y)

    def domains(self) -> tuple[GridDomain, GridDomain]:
        return GridDomain(self.cum_x, self.n), GridDomain(self.cum_y, self.n)

    @property
    def tie_free(self) -> bool:
        return self.m1 == self.n and self.m2 == self.n


def _codes(a: np.ndarray):
    if a.dtype == object:
        distinct = sorted(set(a.tolist()))
        index = {v: k for k, v in enumerate(distinct)}
        codes = np.array([index[v] for v in a.tolist()], dtype=np.int64)
        counts = np.bincount(codes, minlength=len(distinct))
        return np.array(distinct, dtype=object), codes, counts
    distinct, codes, counts = np.unique(a, return_inverse=True, return_counts=True)
    return distinct, codes.astype(np.int64).ravel(), counts


def build_grid(sample: BivariateSample) -> EmpiricalGrid:
    dx, cx, nx = _codes(sample.x)
    dy, cy, ny = _codes(sample.y)
    return EmpiricalGrid(dx, dy, nx, ny, cx, cy, sample.n)


def _count_blocks(grid: EmpiricalGrid):
    """Yield ``(i0, rows)`` where ``rows[k, j]`` counts pairs with
    x-code <= i0 + k and y-code <= j (cumulative joint counts, no zero row/col)."""
    m1, m2 = grid.m1, grid.m2
    order = np.argsort(grid.codes_x, kind="stable")
    xs = grid.codes_x[order]
    ys = grid.codes_y[order]
    step = max(1, _BLOCK_CELLS // m2)
    carry = np.zeros(m2, dtype=np.int64)
    for i0 in range(0, m1, step):
        i1 = min(m1, i0 + step)
        a, b = np.searchsorted(xs, [i0, i1])
        flat = (xs[a:b] - i0) * m2 + ys[a:b]
        block = np.bincount(flat, minlength=(i1 - i0) * m2).reshape(i1 - i0, m2)
        block = np.cumsum(np.cumsum(block, axis=1), axis=0) + carry
        carry = block[-1]
        yield i0, block


def empirical_subcopula(sample: BivariateSample) -> Subcopula:
    """Exact empirical subcopula: joint empirical CDF at the distinct values,
    indexed by cumulative marginal proportions, with counts over ``n``."""
    grid = build_grid(sample)
    vals = np.zeros((grid.m1 + 1, grid.m2 + 1), dtype=np.int64)
    for i0, rows in _count_blocks(grid):
        vals[1 + i0 : 1 + i0 + rows.shape[0], 1:] = rows
    d1, d2 = grid.domains()
    return Subcopula(d1, d2, vals)


def _scan_gaps(grid: EmpiricalGrid):
    """Row-major first maximisers of n*count - a*b and of its negation."""
    n = grid.n
    a = grid.cum_x
    b = grid.cum_y
    m2p = grid.m2 + 1
    best_pos, at_pos = 0, 0
    best_neg, at_neg = 0, 0
    for i0, rows in _count_blocks(grid):
        gap = np.zeros((rows.shape[0], m2p), dtype=np.int64)
        gap[:, 1:] = rows * n - np.multiply.outer(a[1 + i0 : 1 + i0 + rows.shape[0]], b[1:])
        flat = gap.ravel()
        k = int(np.argmax(flat))
        if flat[k] > best_pos:
            best_pos, at_pos = int(flat[k]), (1 + i0) * m2p + k
        k = int(np.argmin(flat))
        if -flat[k] > best_neg:
            best_neg, at_neg = int(-flat[k]), (1 + i0) * m2p + k
    return best_pos, at_pos, best_neg, at_neg


def _grid_point(grid: EmpiricalGrid, flat: int) -> GridPoint:
    i, j = divmod(flat, grid.m2 + 1)
    return GridPoint(i, j, Fraction(int(grid.cum_x[i]), grid.n), Fraction(int(grid.cum_y[j]), grid.n))


def tie_free_normalizer(n: int) -> Fraction:
    """d(M) = -d(W) on the grid {0, 1/n, ..., 1}: 1/4 for even n, (n^2-1)/(4n^2) for odd n."""
    if n % 2 == 0:
        return Fraction(1, 4)
    return Fraction(n * n - 1, 4 * n * n)


def mu_empirical(sample: BivariateSample) -> DependenceReport:
    """Monotone dependence of the empirical subcopula, computed exactly.

    The count matrix is scanned block by block, so memory stays O(m2) per
    block. For tie-free samples the bound functionals come from the closed
    even/odd formula; otherwise they are maximised over the grid.
    """
    grid = build_grid(sample)
    n = grid.n
    den = n * n
    pos, at_pos, neg, at_neg = _scan_gaps(grid)
    d_s = Fraction(pos - neg, den)
    if grid.tie_free:
        d_m = tie_free_normalizer(n)
        d_w = -d_m
    else:
        m_num, w_num = bound_gaps(grid.cum_x, grid.cum_y, n)
        d_m = Fraction(int(m_num), den)
        d_w = -Fraction(int(w_num), den)
    rep = DependenceReport(
        d_s=d_s,
        argmax_pos=_grid_point(grid, at_pos),
        argmax_neg=_grid_point(grid, at_neg),
        domain_sizes=(grid.m1 + 1, grid.m2 + 1),
    )
    warnings = (f"{sample.dropped} incomplete pair(s) dropped",) if sample.dropped else ()
    return _finish(
        rep, d_m, d_w, grid.m1 == 1 or grid.m2 == 1, n=n, dropped=sample.dropped, warnings=warnings
    )


def mu_tie_free(sample: BivariateSample) -> Fraction:
    """Closed normalisation for samples without ties: a constant multiple of d(S_n)."""
    grid = build_grid(sample)
    if not grid.tie_free:
        raise ValueError("sample has ties; use mu_empirical")
    pos, _, neg, _ = _scan_gaps(grid)
    return Fraction(pos - neg, grid.n**2) / tie_free_normalizer(grid.n)


def mu(x, y) -> float:
    """Shortcut: ``mu_empirical`` on two arrays, as a float."""
    return float(mu_empirical(BivariateSample.from_arrays(x, y)).mu)


@dataclass(frozen=True)
class DependenceMatrix:
    """Pairwise ``mu`` values; ``nan`` where a pair has no complete rows."""

    names: tuple[str, ...]
    values: np.ndarray
    reports: dict
    unavailable: tuple[tuple[str, str], ...]
    degenerate: tuple[tuple[str, str], ...]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SUBDEP_THREADS", "1")))
    except ValueError:
        return 1


def dependence_matrix(columns: Mapping[str, Sequence] | Sequence, names: Sequence[str] | None = None,
                      threads: int | None = None) -> DependenceMatrix:
    """Symmetric matrix of ``mu`` over pairwise-complete rows, unit diagonal.

    ``columns`` is a mapping name -> values or a sequence of columns (then
    ``names`` defaults to ``x0, x1, ...``). Entries are independent and may be
    evaluated on ``threads`` workers (default from ``SUBDEP_THREADS``).
    """
    if isinstance(columns, Mapping):
        names = tuple(columns)
        cols = [columns[k] for k in names]
    else:
        cols = list(columns)
        names = tuple(names) if names is not None else tuple(f"x{k}" for k in range(len(cols)))
    if len(cols) < 2:
        raise ValueError("need at least two columns")
    if len(set(names)) != len(names):
        raise ValueError("column names must be unique")
    k = len(cols)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def entry(ij):
        i, j = ij
        try:
            sample = BivariateSample.from_arrays(cols[i], cols[j])
        except ValueError as exc:
            if "empty sample" in str(exc):
                return ij, None
            raise
        return ij, mu_empirical(sample)

    workers = threads or _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(entry, pairs))
    else:
        results = [entry(p) for p in pairs]

    values = np.eye(k)
    reports = {}
    unavailable, degenerate = [], []
    for (i, j), rep in results:
        if rep is None:
            values[i, j] = values[j, i] = np.nan
            unavailable.append((names[i], names[j]))
            continue
        values[i, j] = values[j, i] = float(rep.mu)
        reports[(names[i], names[j])] = rep
        if rep.degenerate:
            degenerate.append((names[i], names[j]))
    return DependenceMatrix(names, values, reports, tuple(unavailable), tuple(degenerate))
