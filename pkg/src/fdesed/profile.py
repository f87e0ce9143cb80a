"""Hypothetical cdf, vertical concentration profile and parameter fitting."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .entropy import EPSILON_LAMBDA, MultiplierPair
from .errors import (
    BoundaryOptimum,
    FlatObjective,
    InsufficientData,
    NegativeDiscriminant,
    OutOfDomainHeight,
    SpanZero,
    UnsortedData,
)
from .series import A_CONST, cdf_two_term, outside_convergence, solve_multipliers

if TYPE_CHECKING:
    from .dataio import SedimentProfileDataset

DEFAULT_A_SEARCH = (0.01, 1.0)
# Multipliers from solve_multipliers give a profile equal to 1 at y_r and 0 at
# the surface only for mean concentrations in this closed range.
MONOTONE_MEAN_RANGE = (1.0 / 3.0, 2.0 / 3.0)
_HEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class FlowGeometry:
    """Surface elevation ``h``, reference level ``y_r`` and reference concentration ``c_r``."""

    h: float
    y_r: float
    c_r: float

    def __post_init__(self):
        if not (0.0 <= self.y_r < self.h):
            raise ValueError(f"need 0 <= y_r < h, got y_r={self.y_r}, h={self.h}")
        if not self.c_r > 0:
            raise ValueError(f"reference concentration must be positive, got {self.c_r}")

    def normalized_height(self, y):
        """``(y - y_r) / (h - y_r)``; heights outside ``[y_r, h]`` are rejected."""
        y = np.asarray(y, dtype=float)
        span = self.h - self.y_r
        y_hat = (y - self.y_r) / span
        if np.any(y_hat < -_HEIGHT_TOL) or np.any(y_hat > 1.0 + _HEIGHT_TOL):
            raise OutOfDomainHeight(
                f"heights must lie in [y_r, h] = [{self.y_r}, {self.h}]")
        return np.clip(y_hat, 0.0, 1.0)


def shape_parameter(a) -> float:
    a = float(a)
    if not (a > 0 and math.isfinite(a)):
        raise ValueError(f"shape parameter a must be positive, got {a}")
    return a


@dataclass(frozen=True)
class FdeModelParameters:
    lam: MultiplierPair
    a: float
    c_m_hat: float
    geometry: FlowGeometry
    alpha: float = 0.5

    def __post_init__(self):
        shape_parameter(self.a)

    def consistency_residual(self) -> float:
        """Largest deviation of ``lam`` from ``solve_multipliers(c_m_hat)``."""
        ref = solve_multipliers(self.c_m_hat)
        return max(abs(ref.lambda0 - self.lam.lambda0), abs(ref.lambda1 - self.lam.lambda1))


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def hypothetical_cdf_normalized(y_hat, a):
    """``(1 - Y**a) exp(-Y**a)`` for normalised height ``Y`` in [0, 1]."""
    a = shape_parameter(a)
    ya = np.asarray(y_hat, dtype=float) ** a
    return _out((1.0 - ya) * np.exp(-ya))


def hypothetical_cdf(y, geom: FlowGeometry, a):
    """Hypothetical cdf in terms of height: 1 at ``y_r``, 0 at ``h``."""
    return hypothetical_cdf_normalized(geom.normalized_height(y), a)


def profile_from_cdf(F, lam: MultiplierPair):
    """Invert :func:`~fdesed.series.cdf_two_term` for the positive root.

    ``c = (-l0 + sqrt(l0**2 + l1 * F * 2 sqrt2 e**(1/2))) / l1``.  When
    ``lambda0 > 0`` the rationalised form ``A F / (l0 + sqrt(...))`` is used
    to avoid cancellation; when ``|lambda1|`` is below the degeneracy
    threshold the exact limit ``A F / (2 l0)`` is returned, which is ``F``
    itself for multipliers from :func:`~fdesed.series.solve_multipliers`.
    """
    F = np.asarray(F, dtype=float)
    l0, l1 = lam.lambda0, lam.lambda1
    if abs(l1) < EPSILON_LAMBDA:
        if l0 <= 0:
            raise NegativeDiscriminant(
                f"degenerate lambda1 with lambda0 = {l0} <= 0 has no finite profile")
        return _out(A_CONST * F / (2.0 * l0))
    radicand = l0 * l0 + l1 * F * A_CONST
    if np.any(radicand < -1e-12 * max(1.0, l0 * l0)):
        raise NegativeDiscriminant(
            f"profile radicand is negative (min {np.min(radicand):.3g}) for {lam}")
    root = np.sqrt(np.maximum(radicand, 0.0))
    if l0 > 0:
        c = A_CONST * F / (l0 + root)
    else:
        c = (root - l0) / l1
    return _out(c)


def concentration_profile(y, params: FdeModelParameters):
    """Normalised concentration ``c / c_r`` at height ``y``."""
    F = hypothetical_cdf(y, params.geometry, params.a)
    return profile_from_cdf(F, params.lam)


def concentration_profile_normalized(y_hat, params: FdeModelParameters):
    return profile_from_cdf(hypothetical_cdf_normalized(y_hat, params.a), params.lam)


def dimensional_concentration(y, params: FdeModelParameters):
    return _out(params.geometry.c_r * np.asarray(concentration_profile(y, params)))


def mean_normalized_concentration(dataset: "SedimentProfileDataset",
                                  extend_to_surface: bool = True) -> float:
    """Depth-averaged ``c / c_r`` by the trapezoidal rule.

    With ``extend_to_surface`` a zero-concentration point is appended at
    ``h`` when the top sample lies below it.
    """
    y = np.asarray(dataset.y, dtype=float)
    c_hat = np.asarray(dataset.c, dtype=float) / dataset.geometry.c_r
    if y.size < 2:
        raise InsufficientData(f"need at least 2 samples to average, got {y.size}")
    if np.any(np.diff(y) <= 0):
        raise UnsortedData("heights must be strictly increasing")
    h = dataset.geometry.h
    if extend_to_surface and y[-1] < h:
        y = np.append(y, h)
        c_hat = np.append(c_hat, 0.0)
    span = y[-1] - y[0]
    if span <= 0:
        raise SpanZero("sampled heights span zero length")
    return float(np.trapezoid(c_hat, y) / span)


# --------------------------------------------------------------------------
# fitting

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   xtol: float = 1e-8) -> tuple[float, float]:
    """Minimise ``f`` on ``[lo, hi]`` until the bracket is narrower than ``xtol``.

    Returns the best point evaluated (the bracket ends included) and its value.
    """
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d), (f(a), a), (f(b), b)]
    fx, x = min(candidates)
    return x, fx


@dataclass(frozen=True)
class ShapeFit:
    a: float
    objective: float
    flags: tuple[str, ...] = ()


def _fit_points(dataset):
    y_hat, c_hat = dataset.normalized()
    interior = (y_hat > 0) & (y_hat < 1)
    if np.count_nonzero(interior) < 3:
        raise InsufficientData(
            f"need at least 3 samples strictly between y_r and h, got {np.count_nonzero(interior)}")
    return y_hat, c_hat


def shape_objective(dataset, lam: MultiplierPair, a: float) -> float:
    """Sum of squared differences between the hypothetical and estimated cdfs."""
    y_hat, c_hat = dataset.normalized()
    resid = hypothetical_cdf_normalized(y_hat, a) - cdf_two_term(c_hat, lam)
    return float(np.sum(np.square(resid)))


def _shape_search(y_hat, target_cdf, search, xtol, seeds):
    lo, hi = search

    def objective(a):
        ya = y_hat**a
        return float(np.sum(np.square((1.0 - ya) * np.exp(-ya) - target_cdf)))

    edges = np.linspace(lo, hi, seeds + 1)
    best = None
    for left, right in zip(edges[:-1], edges[1:]):
        x, fx = golden_section(objective, left, right, xtol)
        if best is None or fx < best[1]:
            best = (x, fx)
    edge_values = [objective(e) for e in edges]
    return best[0], best[1], max(edge_values + [best[1]]) - min(edge_values + [best[1]])


def fit_shape_parameter(dataset, lam: MultiplierPair, search=DEFAULT_A_SEARCH,
                        xtol: float = 1e-8, seeds: int = 10) -> ShapeFit:
    """Least-squares fit of the shape parameter ``a`` for fixed multipliers.

    Golden-section search runs on each of ``seeds`` equal sub-intervals of
    ``search`` and the best minimum wins.  Emits :class:`FlatObjective`
    when the objective is constant to 1e-12 over the interval and
    :class:`BoundaryOptimum` when the minimiser sits on an end of it.
    """
    lo, hi = float(search[0]), float(search[1])
    if not (0 < lo < hi):
        raise ValueError(f"search interval must satisfy 0 < lo < hi, got {search}")
    y_hat, c_hat = _fit_points(dataset)
    target = cdf_two_term(c_hat, lam)
    a, obj, spread = _shape_search(y_hat, target, (lo, hi), xtol, seeds)
    flags = []
    if spread < 1e-12:
        flags.append("FlatObjective")
        warnings.warn(f"shape objective varies by only {spread:.3g} on [{lo}, {hi}]",
                      FlatObjective, stacklevel=2)
    if min(a - lo, hi - a) <= 2 * xtol:
        flags.append("BoundaryOptimum")
        warnings.warn(f"fitted a = {a:.6g} lies on the search boundary [{lo}, {hi}]",
                      BoundaryOptimum, stacklevel=2)
    return ShapeFit(a, obj, tuple(flags))


@dataclass(frozen=True)
class ProfileFit:
    params: FdeModelParameters
    objective: float
    mean_method: str
    flags: tuple[str, ...] = field(default=())


MEAN_METHODS = ("joint", "trapezoid")


def fit_profile(dataset, search=DEFAULT_A_SEARCH, mean_method: str = "joint",
                extend_to_surface: bool = True, xtol: float = 1e-8) -> ProfileFit:
    """Estimate ``c_m_hat``, the multipliers and ``a`` from a measured profile.

    ``mean_method="trapezoid"`` takes ``c_m_hat`` as the depth average of the
    samples and then fits ``a`` alone.  ``"joint"`` minimises the same cdf
    misfit over ``c_m_hat`` in ``[1/3, 2/3]`` as well, with the shape fit
    nested inside a bounded scalar minimisation over ``c_m_hat``.
    """
    if mean_method not in MEAN_METHODS:
        raise ValueError(f"mean_method must be one of {MEAN_METHODS}, got {mean_method!r}")
    y_hat, c_hat = _fit_points(dataset)
    flags: list[str] = []

    if mean_method == "trapezoid":
        c_m = mean_normalized_concentration(dataset, extend_to_surface)
    else:
        c_m = _joint_mean(y_hat, c_hat, search, xtol)
    lam = solve_multipliers(c_m)
    shape = fit_shape_parameter(dataset, lam, search, xtol)
    flags.extend(shape.flags)

    lo_m, hi_m = MONOTONE_MEAN_RANGE
    if not (lo_m - 1e-12 <= c_m <= hi_m + 1e-12):
        flags.append("MeanOutsideMonotoneRange")
    if lam.degenerate:
        flags.append("DegenerateMultiplier")
    if outside_convergence(lam, 0.0, 1.0):
        flags.append("TruncationDivergence")
    params = FdeModelParameters(lam, shape.a, c_m, dataset.geometry)
    return ProfileFit(params, shape.objective, mean_method, tuple(flags))


def _joint_mean(y_hat, c_hat, search, xtol, scan: int = 24) -> float:
    lo_m, hi_m = MONOTONE_MEAN_RANGE
    k = math.exp(-0.5) / (2.0 * math.sqrt(2.0))

    def inner(c_m):
        lam = solve_multipliers(c_m)
        target = k * c_hat * (2.0 * lam.lambda0 + lam.lambda1 * c_hat)
        return _shape_search(y_hat, target, search, xtol, 10)[1]

    grid = np.linspace(lo_m, hi_m, scan + 1)
    values = [inner(c) for c in grid]
    i = int(np.argmin(values))
    left, right = grid[max(i - 1, 0)], grid[min(i + 1, scan)]
    res = minimize_scalar(inner, bounds=(left, right), method="bounded",
                          options={"xatol": xtol})
    if res.fun <= values[i]:
        return float(res.x)
    return float(grid[i])
