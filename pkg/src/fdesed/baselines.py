"""Comparison profiles with zero surface concentration: Rouse, Shannon (Choo), Tsallis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import NegativeBase, OutOfDomainHeight, OutOfRange

_TOL = 1e-12


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class RouseSpec:
    """Rouse number ``R0``, reference height ``r`` and surface height ``y_star``."""

    R0: float
    y_star: float
    r: Optional[float] = None

    def __post_init__(self):
        if self.r is None:
            object.__setattr__(self, "r", 0.05 * self.y_star)
        if not (0 < self.r < self.y_star):
            raise ValueError(f"need 0 < r < y_star, got r={self.r}, y_star={self.y_star}")
        if not self.R0 > 0:
            raise ValueError(f"Rouse number must be positive, got {self.R0}")

    column = "c_hat_rouse"


@dataclass(frozen=True)
class ShannonSpec:
    """Entropy parameter ``N``, depth ``D`` and bed concentration ``c0``.

    Heights are measured from ``y0`` (the level where ``c = c0``).
    """

    N: float
    D: float
    c0: float = 1.0
    y0: float = 0.0

    def __post_init__(self):
        if not (self.D > 0 and self.c0 > 0):
            raise ValueError(f"need D > 0 and c0 > 0, got D={self.D}, c0={self.c0}")

    column = "c_hat_shannon"


@dataclass(frozen=True)
class TsallisSpec:
    """Entropy parameter ``N`` and hypothesised cdf ``F(y)``.

    ``cdf_hypothesis=None`` means ``F = 1 - (y - y0)/D``; that default is a
    convenience, not part of the published model, which leaves ``F`` to the user.
    """

    N: float
    D: float
    y0: float = 0.0
    cdf_hypothesis: Optional[Callable] = None

    def __post_init__(self):
        if not self.N > 0:
            raise ValueError(f"Tsallis N must be positive, got {self.N}")
        if not self.D > 0:
            raise ValueError(f"depth must be positive, got {self.D}")

    column = "c_hat_tsallis"

    def cdf(self, y):
        if self.cdf_hypothesis is not None:
            return np.asarray(self.cdf_hypothesis(y), dtype=float)
        return 1.0 - (np.asarray(y, dtype=float) - self.y0) / self.D


def rouse_profile(y, spec: RouseSpec):
    """``c/c_r = [((y* - y)/y) (r/(y* - r))]**R0`` for ``r <= y <= y*``."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or np.any(y < spec.r * (1 - _TOL)) or np.any(y > spec.y_star * (1 + _TOL)):
        raise OutOfDomainHeight(
            f"Rouse profile is defined on [r, y*] = [{spec.r}, {spec.y_star}]")
    base = np.maximum(spec.y_star - y, 0.0) / y * (spec.r / (spec.y_star - spec.r))
    return _out(base**spec.R0)


def shannon_profile(y, spec: ShannonSpec):
    """``c/c0 = ln[e**N - (e**N - 1) eta] / N`` with ``eta = (y - y0)/D``.

    ``N = 0`` gives the linear limit ``1 - eta``.  Otherwise the profile is
    ``log1p[(e**N - 1)(1 - eta)] / N``, switching to a plain log of the sum of
    positive terms where ``log1p`` would cancel.
    """
    eta = (np.asarray(y, dtype=float) - spec.y0) / spec.D
    if np.any(eta < -_TOL) or np.any(eta > 1 + _TOL):
        raise OutOfDomainHeight("Shannon profile is defined on [y0, y0 + D]")
    eta = np.clip(eta, 0.0, 1.0)
    N = float(spec.N)
    if abs(N) < 1e-12:
        return _out(1.0 - eta)
    if N > 700:
        return _out(1.0 + np.log((1.0 - eta) + math.exp(-N) * eta) / N)
    arg = math.expm1(N) * (1.0 - eta)
    if N > 0:
        return _out(np.log1p(arg) / N)
    safe = np.maximum(arg, -0.5)
    direct = np.log(np.maximum(eta + math.exp(N) * (1.0 - eta), np.finfo(float).tiny))
    return _out(np.where(arg > -0.5, np.log1p(safe), direct) / N)


# Taylor coefficients of (x coth x - 1) / x**2 in powers of x**2
_COTH_SERIES = (1 / 3, -1 / 45, 2 / 945, -1 / 4725, 2 / 93555, -1382 / 638512875)


def _coth_poly(t: float) -> tuple[float, float]:
    value = deriv = 0.0
    for coef in reversed(_COTH_SERIES):
        deriv = deriv * t + value
        value = value * t + coef
    return value, deriv


def shannon_mean_ratio(N: float) -> float:
    """Mean-to-bed concentration ratio ``e**N/(e**N - 1) - 1/N``; 1/2 at ``N = 0``."""
    N = float(N)
    if abs(N) < 0.5:
        # 1/2 + (x coth x - 1)/N with x = N/2
        return 0.5 + N / 4.0 * _coth_poly(N * N / 4.0)[0]
    return -1.0 / math.expm1(-N) - 1.0 / N


def _shannon_ratio_derivative(N: float) -> float:
    if abs(N) < 0.5:
        p, dp = _coth_poly(N * N / 4.0)
        return p / 4.0 + N * N / 8.0 * dp
    # d/dN [1/(1 - e^-N)] = -e^-N / (1 - e^-N)^2 = -1 / (4 sinh^2(N/2))
    return 1.0 / N**2 - 1.0 / (4.0 * math.sinh(N / 2.0) ** 2)


def solve_shannon_N(cm_over_c0: float, tol: float = 1e-12) -> float:
    """Entropy parameter ``N`` whose mean ratio equals ``cm_over_c0``.

    Bisection on a bracket that is widened until it contains the root, followed
    by Newton polishing.  Ratios above 1/2 give positive ``N``, below 1/2
    negative ``N``; exactly 1/2 returns 0.
    """
    r = float(cm_over_c0)
    if not (0.0 < r < 1.0):
        raise OutOfRange(f"c_m/c_0 must lie in (0, 1), got {r}")
    if r == 0.5:
        return 0.0

    def g(N):
        return shannon_mean_ratio(N) - r

    if r > 0.5:
        lo, hi = 0.0, 1.0
        while g(hi) < 0:
            lo, hi = hi, 2.0 * hi
            if hi > 1e12:
                raise OutOfRange(f"c_m/c_0 = {r} is too close to 1 to solve for N")
    else:
        lo, hi = -1.0, 0.0
        while g(lo) > 0:
            lo, hi = 2.0 * lo, lo
            if lo < -1e12:
                raise OutOfRange(f"c_m/c_0 = {r} is too close to 0 to solve for N")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-6 * max(1.0, abs(mid)):
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    N = 0.5 * (lo + hi)
    for _ in range(50):
        step = g(N) / _shannon_ratio_derivative(N)
        N -= step
        if abs(step) <= tol * max(1.0, abs(N)):
            break
    return N


def tsallis_profile(y, spec: TsallisSpec):
    """``c/c0 = 1 - {1 - [(1 + 0.5 ln N) F - 0.5 ln N]**(2/3)} / N``."""
    y_arr = np.asarray(y, dtype=float)
    eta = (y_arr - spec.y0) / spec.D
    if np.any(eta < -_TOL) or np.any(eta > 1 + _TOL):
        raise OutOfDomainHeight("Tsallis profile is defined on [y0, y0 + D]")
    F = spec.cdf(y_arr)
    half_log = 0.5 * math.log(spec.N)
    base = (1.0 + half_log) * F - half_log
    bad = base < 0
    if np.any(bad):
        where = float(np.atleast_1d(y_arr)[np.argmax(np.atleast_1d(bad))]) if y_arr.ndim else float(y_arr)
        raise NegativeBase(
            f"Tsallis bracket is negative at y = {where:.6g} (N = {spec.N})", y=where)
    return _out(1.0 - (1.0 - base ** (2.0 / 3.0)) / spec.N)


BaselineSpec = Union[RouseSpec, ShannonSpec, TsallisSpec]


def baseline_profile(spec, y):
    """Dispatch to the profile function matching ``spec``."""
    if isinstance(spec, RouseSpec):
        return rouse_profile(y, spec)
    if isinstance(spec, ShannonSpec):
        return shannon_profile(y, spec)
    if isinstance(spec, TsallisSpec):
        return tsallis_profile(y, spec)
    raise TypeError(f"unknown baseline spec {spec!r}")


def rouse_for(geometry, R0: float) -> RouseSpec:
    """Rouse spec referenced at the dataset's own reference level.

    Uses ``r = y_r`` so the ratio is normalised like the data; falls back to
    ``0.05 h`` when the reference level is the bed itself.
    """
    r = geometry.y_r if geometry.y_r > 0 else 0.05 * geometry.h
    return RouseSpec(R0=R0, y_star=geometry.h, r=r)


def shannon_for(geometry, N: float) -> ShannonSpec:
    return ShannonSpec(N=N, D=geometry.h - geometry.y_r, c0=geometry.c_r, y0=geometry.y_r)


def tsallis_for(geometry, N: float, cdf_hypothesis=None) -> TsallisSpec:
    return TsallisSpec(N=N, D=geometry.h - geometry.y_r, y0=geometry.y_r,
                       cdf_hypothesis=cdf_hypothesis)
