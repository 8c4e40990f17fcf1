"""Parametric models: the Bernoulli pair, the M/Pi mixture and copula families.

Numeric functionals over the unit square (``mu``, Spearman's rho,
Schweizer-Wolff sigma and the sup-distance Lambda) are evaluated on a uniform
grid; suprema are then polished with a bounded Nelder-Mead search started
from the best grid cell.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy import integrate, optimize

from .subcopula import (
    AXIOM_TOL,
    GridDomain,
    StructureError,
    Subcopula,
    _to_fraction,
    validate,
)

DEFAULT_RESOLUTION = 512
DEFAULT_REFINE_TOL = 1e-8
DEFAULT_QUAD_RESOLUTION = 1024


class ParameterWarning(UserWarning):
    """A parameter value outside the family's space was replaced by its limit."""


# --------------------------------------------------------------------------
# Bernoulli pair


@dataclass(frozen=True)
class BernoulliPairModel:
    """Two Bernoulli variables with ``P(X=1, Y=1) = alpha``.

    Parameters given as ``Fraction``, ``int`` or ``"p/q"`` strings keep the
    model exact; floats make it floating.
    """

    theta1: Fraction | float
    theta2: Fraction | float
    alpha: Fraction | float

    def __post_init__(self):
        vals = (self.theta1, self.theta2, self.alpha)
        if all(isinstance(v, (Fraction, int, str)) for v in vals):
            t1, t2, a = (_to_fraction(v) for v in vals)
        else:
            t1, t2, a = (float(v) for v in vals)
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)
        object.__setattr__(self, "alpha", a)
        if not (0 < t1 < 1 and 0 < t2 < 1):
            raise ValueError("theta1 and theta2 must lie strictly between 0 and 1")
        lo, hi = self.alpha_bounds
        if not lo <= a <= hi:
            raise ValueError(f"alpha={a} outside the Frechet-Hoeffding range [{lo}, {hi}]")

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, Fraction)

    @property
    def alpha_bounds(self):
        t1, t2 = self.theta1, self.theta2
        return max(t1 + t2 - 1, 0 * t1), min(t1, t2)

    @property
    def covariance(self):
        return self.alpha - self.theta1 * self.theta2


def bernoulli_subcopula(m: BernoulliPairModel) -> Subcopula:
    """3x3 subcopula on {0, 1-theta1, 1} x {0, 1-theta2, 1}."""
    t1, t2, a = m.theta1, m.theta2, m.alpha
    d1 = [0, 1 - t1, 1]
    d2 = [0, 1 - t2, 1]
    vals = [
        [0, 0, 0],
        [0, 1 + a - t1 - t2, 1 - t1],
        [0, 1 - t2, 1],
    ]
    if m.exact:
        return Subcopula.from_fractions(d1, d2, vals)
    return Subcopula(GridDomain(d1), GridDomain(d2), vals)


def bernoulli_mu_closed(m: BernoulliPairModel):
    """Closed-form monotone dependence of the Bernoulli pair."""
    t1, t2, a = m.theta1, m.theta2, m.alpha
    cov = a - t1 * t2
    if cov >= 0:
        den = t2 * (1 - t1) if t2 <= t1 else t1 * (1 - t2)
    else:
        den = t1 * t2 if t2 <= 1 - t1 else (1 - t1) * (1 - t2)
    return cov / den


def bernoulli_pearson(m: BernoulliPairModel) -> float:
    t1, t2 = m.theta1, m.theta2
    return float(m.covariance) / math.sqrt(float(t1 * (1 - t1) * t2 * (1 - t2)))


# --------------------------------------------------------------------------
# copula families


def _clayton(theta: float) -> Callable:
    if theta < 0:
        p = -theta

        def c(u, v):
            base = np.maximum(np.power(u, p) + np.power(v, p) - 1.0, 0.0)
            return np.power(base, 1.0 / p)

        return c

    def c(u, v):
        # log-space to survive large theta: log(u^-t + v^-t - 1) = m + log1p(e^(s-m) - e^-m)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            a = -theta * np.log(u)
            b = -theta * np.log(v)
            hi = np.maximum(a, b)
            lo = np.minimum(a, b)
            inner = hi + np.log1p(np.exp(lo - hi) - np.exp(-hi))
            out = np.exp(-inner / theta)
        out = np.where((u == 0) | (v == 0), 0.0, out)
        out = np.where(u == 1, v, out)
        return np.where(v == 1, u, out)

    return c


@dataclass(frozen=True)
class CopulaFamily:
    """A copula evaluator ``C(u, v)`` vectorised over numpy arrays.

    Build with the constructors :meth:`W`, :meth:`Pi`, :meth:`M`,
    :meth:`clayton` and :meth:`mix_m_pi`.
    """

    kind: str
    param: float | None = None
    flags: tuple[str, ...] = ()
    _fn: Callable = field(default=None, repr=False, compare=False)

    @classmethod
    def W(cls) -> "CopulaFamily":
        return cls("W", None, (), lambda u, v: np.maximum(u + v - 1.0, 0.0))

    @classmethod
    def Pi(cls) -> "CopulaFamily":
        return cls("Pi", None, (), lambda u, v: u * v)

    @classmethod
    def M(cls) -> "CopulaFamily":
        return cls("M", None, (), np.minimum)

    @classmethod
    def clayton(cls, theta: float) -> "CopulaFamily":
        """Clayton copula; theta = 0 is replaced by Pi (its limit) with a flag."""
        theta = float(theta)
        if not theta >= -1 or math.isinf(theta):
            raise ValueError("Clayton theta must be a finite value >= -1; use CopulaFamily.M() for the upper limit")
        if theta == 0:
            return cls("Clayton", 0.0, ("theta=0 evaluated as Pi",), lambda u, v: u * v)
        return cls("Clayton", theta, (), _clayton(theta))

    @classmethod
    def mix_m_pi(cls, alpha: float) -> "CopulaFamily":
        """Convex combination alpha*M + (1-alpha)*Pi."""
        alpha = float(alpha)
        if not 0 <= alpha <= 1:
            raise ValueError("mixture weight must lie in [0, 1]")
        return cls("MixMPi", alpha, (), lambda u, v: alpha * np.minimum(u, v) + (1 - alpha) * u * v)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return self._fn(u, v)

    def __str__(self):
        return self.kind if self.param is None else f"{self.kind}({self.param:g})"


def kendall_clayton(theta):
    """Kendall's tau of the Clayton copula, theta/(theta+2).

    theta = 0 returns 0 (the Pi limit) and emits :class:`ParameterWarning`.
    """
    if theta < -1:
        raise ValueError("Clayton theta must be >= -1")
    if theta == 0:
        warnings.warn("theta=0 is outside the Clayton family; using the Pi limit", ParameterWarning, stacklevel=2)
        return 0 * theta
    return theta / (theta + 2)


@dataclass(frozen=True)
class ParetoGeometricMixture:
    """Pareto(1,1) x Geometric(theta) margins joined by alpha*M + (1-alpha)*Pi.

    ``v_levels`` is the range of the geometric CDF truncated after
    ``y_truncation`` atoms (levels that round to 1 in floating point are
    dropped) and closed with 1.
    """

    alpha: float
    theta: float
    y_truncation: int = 60

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.y_truncation < 1:
            raise ValueError("truncation must be >= 1")

    def v_levels(self) -> np.ndarray:
        k = np.arange(self.y_truncation + 1)
        lv = 1.0 - (1.0 - self.theta) ** k
        lv = lv[lv < 1.0]
        return np.append(lv, 1.0)

    @property
    def truncation_error(self) -> float:
        """Mass of the geometric tail beyond the kept levels."""
        return (1.0 - self.theta) ** (self.v_levels().size - 2)

    def copula(self) -> CopulaFamily:
        return CopulaFamily.mix_m_pi(self.alpha)

    def subcopula(self, u_points: int = 201) -> Subcopula:
        return discretize(self.copula(), GridDomain(np.linspace(0, 1, u_points)), GridDomain(self.v_levels()))


def discretize(c: CopulaFamily, d1: GridDomain, d2: GridDomain, tol: float = AXIOM_TOL) -> Subcopula:
    """Floating subcopula of ``c`` restricted to ``d1 x d2``.

    Raises :class:`StructureError` when the evaluator leaves [0, 1] or the
    restriction fails the axioms beyond ``tol``.
    """
    u = d1.as_float()
    v = d2.as_float()
    uu, vv = np.meshgrid(u, v, indexing="ij")
    vals = np.asarray(c(uu, vv), dtype=float)
    if vals.shape != uu.shape or not np.all(np.isfinite(vals)):
        raise StructureError(f"{c} evaluator returned non-finite or misshaped values")
    if np.any(vals < -tol) or np.any(vals > 1 + tol):
        raise StructureError(f"{c} evaluator left the unit interval")
    s = Subcopula(GridDomain(u), GridDomain(v), vals)
    bad = validate(s, tol)
    if bad:
        raise StructureError(f"{c} restriction is not a subcopula: {bad[0]}")
    return s


# --------------------------------------------------------------------------
# numeric functionals on the unit square


@dataclass(frozen=True)
class SupResult:
    """Suprema of C - Pi and Pi - C over the unit square."""

    sup_pos: float
    sup_neg: float
    at_pos: tuple[float, float]
    at_neg: tuple[float, float]
    resolution: int
    precise: bool = True
    flags: tuple[str, ...] = ()

    @property
    def mu(self) -> float:
        return 4.0 * (self.sup_pos - self.sup_neg)

    @property
    def lam(self) -> float:
        return 4.0 * max(self.sup_pos, self.sup_neg)


def _refine(f: Callable, x0: tuple[float, float], h: float, best: float, tol: float):
    """Maximise ``f`` on the box of half-width ``h`` around ``x0``.

    Never returns less than ``best``, the grid value at ``x0``.
    """
    lo = [max(0.0, x0[0] - h), max(0.0, x0[1] - h)]
    hi = [min(1.0, x0[0] + h), min(1.0, x0[1] + h)]
    res = optimize.minimize(
        lambda p: -float(f(p[0], p[1])),
        np.asarray(x0),
        method="Nelder-Mead",
        bounds=list(zip(lo, hi)),
        options={"xatol": tol, "fatol": tol, "maxiter": 2000},
    )
    val = -float(res.fun)
    if val > best:
        return val, (float(res.x[0]), float(res.x[1])), bool(res.success)
    return best, x0, bool(res.success)


def sup_distance(c: CopulaFamily, resolution: int = DEFAULT_RESOLUTION,
                 refine_tol: float = DEFAULT_REFINE_TOL) -> SupResult:
    """Grid scan of C - Pi on {0, 1/G, ..., 1}^2 followed by local refinement."""
    g = int(resolution)
    if g < 2:
        raise ValueError("resolution must be >= 2")
    t = np.linspace(0.0, 1.0, g + 1)
    uu, vv = np.meshgrid(t, t, indexing="ij")
    diff = c(uu, vv) - uu * vv
    flat = diff.ravel()
    kp = int(np.argmax(flat))
    kn = int(np.argmax(-flat))
    h = 1.0 / g
    precise = True
    out = []
    for k, sign in ((kp, 1.0), (kn, -1.0)):
        i, j = divmod(k, g + 1)
        grid_val = sign * float(flat[k])
        if grid_val <= 0.0:
            # C - Pi never crosses this side on the grid; the sup is the boundary value 0
            out.append((0.0, (float(t[i]), float(t[j]))))
            continue
        val, at, ok = _refine(lambda u, v: sign * (c(u, v) - u * v), (float(t[i]), float(t[j])), h, grid_val, refine_tol)
        precise &= ok
        out.append((val, at))
    flags = c.flags + (() if precise else ("refinement did not converge; grid value kept",))
    return SupResult(out[0][0], out[1][0], out[0][1], out[1][1], g, precise, flags)


def mu_copula_numeric(c: CopulaFamily, resolution: int = DEFAULT_RESOLUTION,
                      refine_tol: float = DEFAULT_REFINE_TOL) -> SupResult:
    """Monotone dependence of a copula: 4 (max(C - Pi) - max(Pi - C)).

    Returns the full :class:`SupResult`; the measure is its ``mu``.
    """
    return sup_distance(c, resolution, refine_tol)


def lambda_inf_numeric(c: CopulaFamily, resolution: int = DEFAULT_RESOLUTION,
                       refine_tol: float = DEFAULT_REFINE_TOL) -> float:
    """Sup-distance 4 sup |C - Pi|."""
    return sup_distance(c, resolution, refine_tol).lam


def _simpson2d(values: np.ndarray, h: float) -> float:
    inner = integrate.simpson(values, dx=h, axis=1)
    return float(integrate.simpson(inner, dx=h))


def _quad_grid(c: CopulaFamily, resolution: int):
    g = int(resolution)
    if g < 2 or g % 2:
        raise ValueError("quadrature resolution must be an even integer >= 2")
    t = np.linspace(0.0, 1.0, g + 1)
    uu, vv = np.meshgrid(t, t, indexing="ij")
    return c(uu, vv) - uu * vv, 1.0 / g


def spearman_numeric(c: CopulaFamily, resolution: int = DEFAULT_QUAD_RESOLUTION) -> float:
    """Spearman's rho as 12 times the integral of C - Pi (composite Simpson)."""
    diff, h = _quad_grid(c, resolution)
    return 12.0 * _simpson2d(diff, h)


def schweizer_wolff_numeric(c: CopulaFamily, resolution: int = DEFAULT_QUAD_RESOLUTION) -> float:
    """Schweizer-Wolff sigma, 12 times the integral of |C - Pi|."""
    diff, h = _quad_grid(c, resolution)
    return 12.0 * _simpson2d(np.abs(diff), h)


@dataclass(frozen=True)
class CurveRow:
    theta: float
    mu: float
    tau: float
    rho: float
    flags: tuple[str, ...] = ()


def _curve_point(theta: float, resolution: int, refine_tol: float, quad_resolution: int) -> CurveRow:
    c = CopulaFamily.clayton(theta)
    sup = mu_copula_numeric(c, resolution, refine_tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterWarning)
        tau = float(kendall_clayton(theta))
    rho = spearman_numeric(c, quad_resolution)
    return CurveRow(float(theta), sup.mu, tau, rho, sup.flags)


def clayton_curve(theta_grid: Iterable[float], resolution: int = DEFAULT_RESOLUTION,
                  refine_tol: float = DEFAULT_REFINE_TOL, quad_resolution: int = DEFAULT_QUAD_RESOLUTION,
                  threads: int | None = None) -> list[CurveRow]:
    """(theta, mu, tau, rho) over the Clayton family, one row per theta."""
    thetas = [float(t) for t in theta_grid]
    if threads is None:
        threads = max(1, int(os.environ.get("SUBDEP_THREADS", "1") or 1))

    def point(t):
        return _curve_point(t, resolution, refine_tol, quad_resolution)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(point, thetas))
    return [point(t) for t in thetas]
