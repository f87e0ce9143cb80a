"""Error statistics and regression analysis for observed vs computed profiles."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateVariance, ZeroComputed, ZeroObserved


@dataclass(frozen=True, eq=False)
class PairedSeries:
    """Observed and computed values at the same heights.

    ``surface_index`` marks the sample at the flow surface, which the MASE
    and log-deviation metrics skip.
    """

    observed: np.ndarray
    computed: np.ndarray
    surface_index: Optional[int] = None

    def __post_init__(self):
        obs = np.asarray(self.observed, dtype=float).ravel()
        comp = np.asarray(self.computed, dtype=float).ravel()
        if obs.shape != comp.shape:
            raise ValueError(f"length mismatch: {obs.size} observed vs {comp.size} computed")
        if obs.size < 2:
            raise ValueError("need at least 2 paired values")
        if np.any(obs < 0):
            raise ValueError("observed values must be non-negative")
        if self.surface_index is not None and not (-obs.size <= self.surface_index < obs.size):
            raise IndexError(f"surface_index {self.surface_index} out of range")
        object.__setattr__(self, "observed", obs)
        object.__setattr__(self, "computed", comp)

    def __len__(self):
        return self.observed.size

    def without_surface(self) -> "PairedSeries":
        if self.surface_index is None:
            return self
        keep = np.ones(len(self), dtype=bool)
        keep[self.surface_index] = False
        return PairedSeries(self.observed[keep], self.computed[keep])

    def where(self, mask) -> "PairedSeries":
        return PairedSeries(self.observed[mask], self.computed[mask])


def _require_positive_observed(s: PairedSeries):
    if np.any(s.observed == 0):
        idx = np.flatnonzero(s.observed == 0).tolist()
        raise ZeroObserved(f"observed value is zero at indices {idx}")


def relative_error(s: PairedSeries) -> float:
    """Mean of ``|comp - obs| / obs``."""
    _require_positive_observed(s)
    return float(np.mean(np.abs(s.computed - s.observed) / s.observed))


def sum_relative_squared_error(s: PairedSeries) -> float:
    """E1: sum of ``((comp - obs) / obs)**2``."""
    _require_positive_observed(s)
    return float(np.sum(((s.computed - s.observed) / s.observed) ** 2))


def rmse(s: PairedSeries) -> float:
    return float(np.sqrt(np.mean((s.computed - s.observed) ** 2)))


def mase(s: PairedSeries) -> float:
    """Mean of ``max(comp/obs, obs/comp)`` with the surface sample dropped.

    Equal values contribute exactly 1.
    """
    s = s.without_surface()
    _require_positive_observed(s)
    if np.any(s.computed <= 0):
        raise ZeroComputed("MASE needs positive computed values off the surface")
    ratio = s.computed / s.observed
    return float(np.mean(np.maximum(ratio, 1.0 / ratio)))


def sum_log_deviation_error(s: PairedSeries) -> float:
    """E2: sum of ``(ln|comp| - ln|obs|)**2`` with the surface sample dropped."""
    s = s.without_surface()
    _require_positive_observed(s)
    if np.any(s.computed == 0):
        raise ZeroComputed("E2 needs non-zero computed values off the surface")
    return float(np.sum((np.log(np.abs(s.computed)) - np.log(np.abs(s.observed))) ** 2))


def error_moments(s: PairedSeries) -> tuple[float, float]:
    """Mean and sample standard deviation (ddof=1) of ``|comp - obs|``."""
    eps = np.abs(s.computed - s.observed)
    return float(np.mean(eps)), float(np.std(eps, ddof=1))


def regression_r2(s: PairedSeries, degree: int = 1) -> float:
    """Coefficient of determination of a least-squares fit of computed on observed.

    ``degree=1`` is ordinary linear regression; higher degrees fit a
    polynomial.  A constant computed series has nothing to explain and
    scores 0.
    """
    x, y = s.observed, s.computed
    if x.size < max(3, degree + 2):
        raise ValueError(f"need at least {max(3, degree + 2)} points for degree {degree}")
    if np.ptp(x) == 0:
        raise DegenerateVariance("observed values are all equal")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 0.0
    coef = np.polynomial.polynomial.polyfit(x, y, degree)
    resid = y - np.polynomial.polynomial.polyval(x, coef)
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot
    return min(max(r2, 0.0), 1.0)


@dataclass(frozen=True)
class ErrorReport:
    Re: float
    E1: float
    RMSE: float
    MASE: float
    E2: float
    mean_error: float
    std_error: float
    r_squared: float
    n: int
    n_used_re_e1: int
    n_used_mase_e2: int

    def as_dict(self) -> dict:
        return asdict(self)


def error_report(s: PairedSeries, degree: int = 1) -> ErrorReport:
    """All metrics for one series.

    Points with zero observed value are left out of Re and E1 (their ratio is
    undefined); the surface sample is left out of MASE and E2.
    """
    positive = s.observed > 0
    ratio_part = s.where(positive) if not positive.all() else s
    trimmed = s.without_surface()
    mean_err, std_err = error_moments(s)
    return ErrorReport(
        Re=relative_error(ratio_part),
        E1=sum_relative_squared_error(ratio_part),
        RMSE=rmse(s),
        MASE=mase(s),
        E2=sum_log_deviation_error(s),
        mean_error=mean_err,
        std_error=std_err,
        r_squared=regression_r2(s, degree),
        n=len(s),
        n_used_re_e1=len(ratio_part),
        n_used_mase_e2=len(trimmed),
    )
