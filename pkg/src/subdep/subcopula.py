"""Bivariate subcopulas on finite grids.

A subcopula is stored as a value matrix over the product of two grid domains.
Two numeric modes are supported:

* exact: every level and value is an integer numerator over a common integer
  ``scale`` (empirical subcopulas use ``scale = n``), so axiom checks and the
  dependence functional are computed without rounding;
* floating: plain ``float64`` arrays, checked against a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

#: default tolerance for axiom checks of floating-point subcopulas
AXIOM_TOL = 1e-12

# int64 is safe while products of two numerators (at most scale**2) fit
_INT64_SCALE_LIMIT = 2**30


class StructureError(ValueError):
    """Malformed domain or value matrix (not an axiom violation)."""


class InvalidSubcopulaError(ValueError):
    """Raised when a measure is requested for a matrix failing the axioms."""

    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0]
        super().__init__(
            f"{len(self.violations)} axiom violation(s); first: {first.axiom} at {first.cell}"
        )


def _int_array(values, scale: int) -> np.ndarray:
    if scale <= _INT64_SCALE_LIMIT:
        return np.array(values, dtype=np.int64)
    return np.vectorize(int, otypes=[object])(np.array(values, dtype=object))


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Finite strictly increasing set of levels in [0, 1] containing 0 and 1.

    With ``scale`` set, ``levels`` holds integer numerators so that level ``i``
    equals ``levels[i] / scale``.
    """

    levels: np.ndarray
    scale: int | None = None

    def __post_init__(self):
        if self.scale is None:
            lv = np.asarray(self.levels, dtype=float)
            one = 1.0
        else:
            if int(self.scale) < 1:
                raise StructureError("scale must be a positive integer")
            object.__setattr__(self, "scale", int(self.scale))
            lv = _int_array(self.levels, self.scale)
            one = self.scale
        if lv.ndim != 1 or lv.size < 2:
            raise StructureError("a domain needs at least the levels 0 and 1")
        if lv[0] != 0 or lv[-1] != one:
            raise StructureError("domain levels must start at 0 and end at 1")
        if np.any(np.diff(lv) <= 0):
            raise StructureError("domain levels must be strictly increasing")
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)

    @classmethod
    def exact(cls, levels: Sequence) -> "GridDomain":
        """Build an exact domain from rationals (``Fraction``, int or ``"p/q"``)."""
        fr = [_to_fraction(v) for v in levels]
        scale = math.lcm(*(f.denominator for f in fr))
        return cls([f.numerator * (scale // f.denominator) for f in fr], scale)

    @classmethod
    def uniform(cls, n: int, exact: bool = True) -> "GridDomain":
        """The grid {0, 1/n, ..., 1}."""
        if exact:
            return cls(np.arange(n + 1), n)
        return cls(np.linspace(0.0, 1.0, n + 1))

    @property
    def exact_mode(self) -> bool:
        return self.scale is not None

    def __len__(self) -> int:
        return self.levels.size

    def level(self, i: int):
        if self.scale is None:
            return float(self.levels[i])
        return Fraction(int(self.levels[i]), self.scale)

    def fractions(self) -> list[Fraction]:
        return [self.level(i) for i in range(len(self))]

    def as_float(self) -> np.ndarray:
        if self.scale is None:
            return self.levels.astype(float)
        return np.array([int(v) / self.scale for v in self.levels])

    def rescaled(self, scale: int) -> "GridDomain":
        """Same levels expressed over a multiple of the current scale."""
        if self.scale is None or scale % self.scale:
            raise StructureError(f"cannot rescale {self.scale} to {scale}")
        k = scale // self.scale
        return GridDomain([int(v) * k for v in self.levels], scale)

    def is_trivial(self) -> bool:
        """True for the two-point domain {0, 1}."""
        return len(self) == 2

    def __eq__(self, other):
        if not isinstance(other, GridDomain):
            return NotImplemented
        if self.exact_mode and other.exact_mode:
            return self.fractions() == other.fractions()
        return len(self) == len(other) and bool(np.all(self.as_float() == other.as_float()))

    def __repr__(self):
        if self.scale is None:
            return f"GridDomain({self.levels.tolist()})"
        return f"GridDomain({[str(f) for f in self.fractions()]})"


def _common_scale(d1: GridDomain, d2: GridDomain) -> tuple[GridDomain, GridDomain]:
    if d1.exact_mode and d2.exact_mode:
        if d1.scale == d2.scale:
            return d1, d2
        scale = math.lcm(d1.scale, d2.scale)
        return d1.rescaled(scale), d2.rescaled(scale)
    if d1.exact_mode:
        d1 = GridDomain(d1.as_float())
    if d2.exact_mode:
        d2 = GridDomain(d2.as_float())
    return d1, d2


@dataclass(frozen=True, eq=False)
class Subcopula:
    """Value matrix ``values[i, j] = S(d1[i], d2[j])``.

    In exact mode ``d1``, ``d2`` and ``values`` share one integer scale.
    The constructor checks structure only; use :func:`validate` for the axioms.
    """

    d1: GridDomain
    d2: GridDomain
    values: np.ndarray

    def __post_init__(self):
        d1, d2 = self.d1, self.d2
        if d1.scale != d2.scale:
            raise StructureError("domains must share a scale (or both be floating)")
        shape = np.shape(self.values)
        if shape != (len(d1), len(d2)):
            raise StructureError(
                f"value matrix has shape {shape}, domains need {(len(d1), len(d2))}"
            )
        if d1.scale is None:
            vals = np.array(self.values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise StructureError("value matrix contains non-finite entries")
        else:
            vals = _int_array(self.values, d1.scale)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_fractions(cls, d1: Sequence, d2: Sequence, values) -> "Subcopula":
        """Exact subcopula from rational levels and values."""
        f1 = [_to_fraction(v) for v in d1]
        f2 = [_to_fraction(v) for v in d2]
        fv = [[_to_fraction(v) for v in row] for row in values]
        scale = math.lcm(*(f.denominator for f in f1 + f2 + [v for row in fv for v in row]))
        num = lambda f: f.numerator * (scale // f.denominator)  # noqa: E731
        return cls(
            GridDomain([num(f) for f in f1], scale),
            GridDomain([num(f) for f in f2], scale),
            [[num(v) for v in row] for row in fv],
        )

    @property
    def scale(self) -> int | None:
        return self.d1.scale

    @property
    def exact_mode(self) -> bool:
        return self.d1.scale is not None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def value(self, i: int, j: int):
        if self.scale is None:
            return float(self.values[i, j])
        return Fraction(int(self.values[i, j]), self.scale)

    def as_float(self) -> "Subcopula":
        if not self.exact_mode:
            return self
        vals = np.array([[int(v) / self.scale for v in row] for row in self.values])
        return Subcopula(GridDomain(self.d1.as_float()), GridDomain(self.d2.as_float()), vals)

    def float_values(self) -> np.ndarray:
        if not self.exact_mode:
            return self.values.astype(float)
        return np.array([[int(v) / self.scale for v in row] for row in self.values])

    def __eq__(self, other):
        if not isinstance(other, Subcopula):
            return NotImplemented
        if self.d1 != other.d1 or self.d2 != other.d2:
            return False
        if self.exact_mode and other.exact_mode:
            if self.scale == other.scale:
                return bool(np.all(self.values == other.values))
            lhs = self.values * other.scale
            rhs = other.values * self.scale
            return bool(np.all(lhs == rhs))
        return bool(np.all(self.float_values() == other.float_values()))


class GridPoint(NamedTuple):
    i: int
    j: int
    u: float | Fraction
    v: float | Fraction


@dataclass(frozen=True)
class AxiomViolation:
    """One failed axiom check.

    ``cell`` is the grid index where the check failed; for the 2-increasing
    axiom it is the upper-right corner of the offending adjacent rectangle and
    ``rect`` holds ``(i1, j1, i2, j2)``.
    """

    axiom: str
    cell: tuple[int, int]
    deficit: float | Fraction
    rect: tuple[int, int, int, int] | None = None

    def corners(self) -> set[tuple[int, int]]:
        if self.rect is None:
            return {self.cell}
        i1, j1, i2, j2 = self.rect
        return {(i1, j1), (i1, j2), (i2, j1), (i2, j2)}


@dataclass(frozen=True)
class DependenceReport:
    d_s: float | Fraction
    argmax_pos: GridPoint
    argmax_neg: GridPoint
    domain_sizes: tuple[int, int]
    d_m: float | Fraction | None = None
    d_w: float | Fraction | None = None
    mu: float | Fraction | None = None
    degenerate: bool = False
    n: int | None = None
    dropped: int = 0
    warnings: tuple[str, ...] = field(default_factory=tuple)


GROUNDED = "grounded"
MARGINS = "margins"
TWO_INCREASING = "2-increasing"
FRECHET_HOEFFDING = "frechet-hoeffding"


def _frac_or_float(num, den: int | None):
    if den is None:
        return float(num)
    return Fraction(int(num), den)


def validate(s: Subcopula, tol: float = AXIOM_TOL) -> list[AxiomViolation]:
    """Check the subcopula axioms and the Fréchet-Hoeffding bounds.

    Returns an empty list for a valid subcopula. Exact subcopulas are checked
    with no tolerance; ``tol`` only applies in floating mode. Deficits are the
    amounts by which each inequality or equality fails.
    """
    V = s.values
    u = s.d1.levels
    v = s.d2.levels
    exact = s.exact_mode
    one = s.scale if exact else 1.0
    eps = 0 if exact else tol
    out: list[AxiomViolation] = []

    def add(axiom, idx, deficits, rect_fn=None):
        for i, j in zip(*idx):
            i, j = int(i), int(j)
            rect = rect_fn(i, j) if rect_fn else None
            cell = (rect[2], rect[3]) if rect else (i, j)
            out.append(AxiomViolation(axiom, cell, _frac_or_float(deficits[i, j], s.scale), rect))

    row0 = np.abs(V[0:1, :])
    col0 = np.abs(V[:, 0:1])
    bad = np.nonzero(row0 > eps)
    add(GROUNDED, bad, row0)
    bad = np.nonzero(col0 > eps)
    add(GROUNDED, (bad[0], bad[1]), col0)

    last_col = np.abs(V[:, -1] - u).reshape(-1, 1)
    last_row = np.abs(V[-1, :] - v).reshape(1, -1)
    for i in np.nonzero(last_col[:, 0] > eps)[0]:
        out.append(AxiomViolation(MARGINS, (int(i), len(v) - 1), _frac_or_float(last_col[i, 0], s.scale)))
    for j in np.nonzero(last_row[0] > eps)[0]:
        out.append(AxiomViolation(MARGINS, (len(u) - 1, int(j)), _frac_or_float(last_row[0, j], s.scale)))

    vol = np.diff(np.diff(V, axis=0), axis=1)
    neg = -vol
    bad = np.nonzero(neg > eps)
    add(TWO_INCREASING, bad, neg, lambda i, j: (i, j, i + 1, j + 1))

    upper = np.minimum.outer(u, v)
    lower = np.maximum(np.add.outer(u, v) - one, 0)
    over = V - upper
    under = lower - V
    bad = np.nonzero(over > eps)
    add(FRECHET_HOEFFDING, bad, over)
    bad = np.nonzero(under > eps)
    add(FRECHET_HOEFFDING, bad, under)
    return out


def is_valid(s: Subcopula, tol: float = AXIOM_TOL) -> bool:
    return not validate(s, tol)


def restrict(kind: str, d1: GridDomain, d2: GridDomain) -> Subcopula:
    """Restriction of M, W or Pi to ``d1 x d2``.

    ``kind`` is one of ``"M"``, ``"W"``, ``"Pi"``. Exact domains give an exact
    result; for Pi the scale is squared so that products stay integral.
    """
    d1, d2 = _common_scale(d1, d2)
    u, v = d1.levels, d2.levels
    one = d1.scale if d1.exact_mode else 1.0
    if kind == "M":
        vals = np.minimum.outer(u, v)
    elif kind == "W":
        vals = np.maximum(np.add.outer(u, v) - one, 0)
    elif kind in ("Pi", "PI", "P"):
        if d1.exact_mode:
            scale = d1.scale * d1.scale
            d1, d2 = d1.rescaled(scale), d2.rescaled(scale)
        vals = np.multiply.outer(u, v)
    else:
        raise ValueError(f"unknown restriction kind {kind!r}")
    return Subcopula(d1, d2, vals)


def transpose(s: Subcopula) -> Subcopula:
    return Subcopula(s.d2, s.d1, s.values.T.copy())


def _gap_matrix(s: Subcopula):
    """Numerators of S - Pi_S; denominator is ``scale**2`` in exact mode."""
    u, v = s.d1.levels, s.d2.levels
    if s.exact_mode:
        return s.values * s.scale - np.multiply.outer(u, v), s.scale * s.scale
    return s.values - np.multiply.outer(u, v), None


def _point(s: Subcopula, flat: int) -> GridPoint:
    i, j = divmod(int(flat), s.shape[1])
    return GridPoint(i, j, s.d1.level(i), s.d2.level(j))


def _checked(s: Subcopula, check: bool, tol: float):
    if check:
        violations = validate(s, tol)
        if violations:
            raise InvalidSubcopulaError(violations)


def d_measure(s: Subcopula, check: bool = True, tol: float = AXIOM_TOL) -> DependenceReport:
    """Signed functional sup(S - Pi_S) - sup(Pi_S - S) over the grid.

    Both suprema are attained; the reported locations are the first maximisers
    in row-major order.
    """
    _checked(s, check, tol)
    gap, den = _gap_matrix(s)
    flat = gap.ravel()
    ipos = int(np.argmax(flat))
    ineg = int(np.argmax(-flat))
    pos, neg = flat[ipos], -flat[ineg]
    return DependenceReport(
        d_s=_frac_or_float(pos - neg, den),
        argmax_pos=_point(s, ipos),
        argmax_neg=_point(s, ineg),
        domain_sizes=s.shape,
    )


def bound_gaps(u: np.ndarray, v: np.ndarray, one):
    """Maxima of M - Pi and Pi - W over the grid ``u x v``.

    Works on numerators over ``one`` (exact) or floats with ``one = 1.0``; the
    results are numerators over ``one**2``. Only the two neighbours of ``a``
    (for M) and of ``one - a`` (for W) in ``v`` can be maximisers for a given
    row level ``a``, which keeps this O(|u| log |v|).
    """
    u = np.asarray(u)
    v = np.asarray(v)
    # largest v <= a and smallest v >= a
    hi = np.searchsorted(v, u, side="left")
    lo = np.searchsorted(v, u, side="right") - 1
    hi = np.minimum(hi, v.size - 1)
    m_lo = v[lo] * (one - u)
    m_hi = u * (one - v[hi])
    d_m = max(np.max(m_lo), np.max(m_hi))

    t = one - u
    hi = np.minimum(np.searchsorted(v, t, side="left"), v.size - 1)
    lo = np.searchsorted(v, t, side="right") - 1
    w_lo = u * v[lo]
    w_hi = (one - u) * (one - v[hi])
    d_w = max(np.max(w_lo), np.max(w_hi))
    return d_m, d_w


def normalize(d_s, d_m, d_w):
    """Map the raw functional to [-1, 1] using the bound functionals.

    ``d_s = 0`` goes through the nonnegative branch.
    """
    if d_s >= 0:
        return d_s / d_m
    return -d_s / d_w


def mu_measure(s: Subcopula, check: bool = True, tol: float = AXIOM_TOL) -> DependenceReport:
    """Monotone dependence ``mu`` of a subcopula together with its ingredients.

    When either domain is {0, 1} the subcopula coincides with M, W and Pi on
    its domain; ``mu`` is then 0 and the report is flagged degenerate.
    """
    rep = d_measure(s, check=check, tol=tol)
    one = s.scale if s.exact_mode else 1.0
    den = s.scale * s.scale if s.exact_mode else None
    m_num, w_num = bound_gaps(s.d1.levels, s.d2.levels, one)
    d_m = _frac_or_float(m_num, den)
    d_w = -_frac_or_float(w_num, den)
    return _finish(rep, d_m, d_w, s.d1.is_trivial() or s.d2.is_trivial())


def _finish(rep: DependenceReport, d_m, d_w, degenerate: bool, **extra) -> DependenceReport:
    warnings = list(extra.pop("warnings", ()))
    if degenerate:
        zero = Fraction(0) if isinstance(rep.d_s, Fraction) else 0.0
        mu = zero
        warnings.append("degenerate domain: M_S = Pi_S = W_S, mu set to 0")
    else:
        mu = normalize(rep.d_s, d_m, d_w)
    return DependenceReport(
        d_s=rep.d_s,
        argmax_pos=rep.argmax_pos,
        argmax_neg=rep.argmax_neg,
        domain_sizes=rep.domain_sizes,
        d_m=d_m,
        d_w=d_w,
        mu=mu,
        degenerate=degenerate,
        warnings=tuple(warnings),
        **extra,
    )
