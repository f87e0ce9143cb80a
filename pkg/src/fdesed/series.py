"""Truncated power-series integrals of the concentration pdf.

With ``L = lambda0 + lambda1*c`` the pdf expands as a triple sum over
``i`` (exponential series), ``j`` (binomial of ``(x - y)**i``) and ``k``
(generalised binomial of ``(1 + L**2/2)**(j/2)``).  Every term integrates to
a power of ``L``, which gives closed forms for the normalisation and mean
integrals at any truncation order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .entropy import MultiplierPair, fde_pdf
from .errors import DegenerateMultiplier, TruncationDivergence
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate

A_CONST = 2.0 * math.sqrt(2.0) * math.exp(0.5)
"""Right-hand side ``2*sqrt(2)*e**(1/2)`` of the two-term normalisation equation."""


@dataclass(frozen=True)
class TruncationConfig:
    i_max: int = 1
    k_max: int = 0

    def __post_init__(self):
        for name in ("i_max", "k_max"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value}")


DEFAULT_TRUNCATION = TruncationConfig()


def mean_concentration(c_m_hat) -> float:
    c_m_hat = float(c_m_hat)
    if not (0.0 < c_m_hat < 1.0):
        raise ValueError(f"mean normalised concentration must lie in (0, 1), got {c_m_hat}")
    return c_m_hat


def generalized_binomial(x: float, k: int) -> float:
    """``C(x, k) = x (x-1) ... (x-k+1) / k!`` for real ``x``."""
    out = 1.0
    for m in range(k):
        out *= (x - m) / (m + 1)
    return out


class SeriesTerm(NamedTuple):
    i: int
    j: int
    k: int
    coefficient: float
    exponent: int


def series_coefficients(trunc: TruncationConfig = DEFAULT_TRUNCATION) -> Iterator[SeriesTerm]:
    """Yield ``(-1)**(i+j)/i! * C(i,j) * C(j/2,k) * 2**(j/2-i-k)`` per term.

    ``exponent`` is ``1 + 2(i+k) - j``, the power of ``L`` in the
    antiderivative of the term; it is always at least 1 because ``j <= i``.
    """
    for i in range(trunc.i_max + 1):
        for j in range(i + 1):
            for k in range(trunc.k_max + 1):
                coef = ((-1) ** (i + j) / math.factorial(i) * math.comb(i, j)
                        * generalized_binomial(j / 2.0, k) * 2.0 ** (j / 2.0 - i - k))
                yield SeriesTerm(i, j, k, coef, 1 + 2 * (i + k) - j)


def outside_convergence(lam: MultiplierPair, c_lo: float, c_hi: float) -> bool:
    """True when ``|lambda0 + lambda1*c| >= 1`` somewhere on ``[c_lo, c_hi]``."""
    return max(abs(lam.lambda0 + lam.lambda1 * c_lo), abs(lam.lambda0 + lam.lambda1 * c_hi)) >= 1.0


def _check_interval(lam, c_lo, c_hi):
    if not (0.0 <= c_lo <= c_hi <= 1.0):
        raise ValueError(f"need 0 <= c_lo <= c_hi <= 1, got [{c_lo}, {c_hi}]")
    if lam.degenerate:
        raise DegenerateMultiplier(
            f"|lambda1| = {abs(lam.lambda1):.3g} is below the degeneracy threshold")
    if outside_convergence(lam, c_lo, c_hi):
        warnings.warn(
            f"|lambda0 + lambda1*c| >= 1 on [{c_lo}, {c_hi}] for {lam}; "
            "the truncated series is outside its assumed convergence region",
            TruncationDivergence, stacklevel=3)


def series_integral_f(lam: MultiplierPair, c_lo: float = 0.0, c_hi: float = 1.0,
                      trunc: TruncationConfig = DEFAULT_TRUNCATION) -> float:
    """Truncated series for ``int_{c_lo}^{c_hi} f(c) dc``."""
    if c_lo == c_hi:
        return 0.0
    _check_interval(lam, c_lo, c_hi)
    lo = lam.lambda0 + lam.lambda1 * c_lo
    hi = lam.lambda0 + lam.lambda1 * c_hi
    total = 0.0
    for term in series_coefficients(trunc):
        n = term.exponent
        total += term.coefficient * (hi**n - lo**n) / n
    return math.exp(-0.5) / lam.lambda1 * total


def series_integral_cf(lam: MultiplierPair, c_lo: float = 0.0, c_hi: float = 1.0,
                       trunc: TruncationConfig = DEFAULT_TRUNCATION) -> float:
    """Truncated series for the first moment ``int c f(c) dc``.

    Uses ``c = (L - lambda0)/lambda1`` so the moment splits into an ``L``-weighted
    integral minus ``lambda0`` times the plain one.
    """
    if c_lo == c_hi:
        return 0.0
    _check_interval(lam, c_lo, c_hi)
    l0 = lam.lambda0
    lo = l0 + lam.lambda1 * c_lo
    hi = l0 + lam.lambda1 * c_hi
    weighted = 0.0
    plain = 0.0
    for term in series_coefficients(trunc):
        n = term.exponent
        weighted += term.coefficient * (hi ** (n + 1) - lo ** (n + 1)) / (n + 1)
        plain += term.coefficient * (hi**n - lo**n) / n
    return math.exp(-0.5) / lam.lambda1**2 * (weighted - l0 * plain)


def cdf_two_term(c_hat, lam: MultiplierPair):
    """Estimated cdf ``e**(-1/2) / (2 sqrt2 lambda1) * ((lambda0 + lambda1 c)**2 - lambda0**2)``.

    Evaluated as ``e**(-1/2) / (2 sqrt2) * c * (2 lambda0 + lambda1 c)``, which is
    the same polynomial without the division by ``lambda1``.
    """
    c = np.asarray(c_hat, dtype=float)
    out = math.exp(-0.5) / (2.0 * math.sqrt(2.0)) * c * (2.0 * lam.lambda0 + lam.lambda1 * c)
    return float(out) if out.ndim == 0 else out


def solve_multipliers(c_m_hat) -> MultiplierPair:
    """Solve ``2 l0 + l1 = A`` and ``3 l0 + 2 l1 = 3 A c_m`` with ``A = 2 sqrt2 e**(1/2)``.

    The determinant is 1, so ``l0 = A (2 - 3 c_m)`` and ``l1 = 3 A (2 c_m - 1)``.
    At ``c_m = 1/2`` the result has ``lambda1 = 0`` and reports itself as
    :attr:`~fdesed.entropy.MultiplierPair.degenerate`.
    """
    c = mean_concentration(c_m_hat)
    return MultiplierPair(A_CONST * (2.0 - 3.0 * c), 3.0 * A_CONST * (2.0 * c - 1.0))


def linear_system_residuals(lam: MultiplierPair, c_m_hat: float) -> tuple[float, float]:
    """Residuals of the two linear multiplier equations."""
    r_norm = 2.0 * lam.lambda0 + lam.lambda1 - A_CONST
    r_mean = 3.0 * lam.lambda0 + 2.0 * lam.lambda1 - 3.0 * A_CONST * c_m_hat
    return r_norm, r_mean


class ConstraintResiduals(NamedTuple):
    series_norm: float
    series_mean: float
    quad_norm: float
    quad_mean: float
    reduced_norm: float
    reduced_mean: float


def constraint_residuals(lam: MultiplierPair, c_m_hat: float,
                         trunc: TruncationConfig = DEFAULT_TRUNCATION,
                         quad: QuadratureConfig = DEFAULT_QUADRATURE) -> ConstraintResiduals:
    """Normalisation and mean-constraint residuals, by series and by quadrature.

    The quadrature pair measures how far the exact pdf is from satisfying the
    constraints that the truncated system was solved for.  The ``reduced``
    pair uses the pdf implied by :func:`cdf_two_term`,
    ``e**(-1/2) (lambda0 + lambda1 c) / sqrt2``, which is what the linear
    multiplier equations integrate; it vanishes for solved multipliers.
    """
    c_m_hat = mean_concentration(c_m_hat)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationDivergence)
        s_norm = series_integral_f(lam, 0.0, 1.0, trunc) - 1.0
        s_mean = series_integral_cf(lam, 0.0, 1.0, trunc) - c_m_hat
    q_norm = integrate(lambda c: fde_pdf(c, lam), 0.0, 1.0, quad) - 1.0
    q_mean = integrate(lambda c: c * fde_pdf(c, lam), 0.0, 1.0, quad) - c_m_hat
    k = math.exp(-0.5) / math.sqrt(2.0)
    r_norm = cdf_two_term(1.0, lam) - 1.0
    r_mean = k * (lam.lambda0 / 2.0 + lam.lambda1 / 3.0) - c_m_hat
    return ConstraintResiduals(s_norm, s_mean, q_norm, q_mean, r_norm, r_mean)
