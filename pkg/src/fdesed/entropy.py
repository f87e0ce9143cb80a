"""Fractional (Ubriaco) entropy and the maximum-entropy concentration pdf.

The pdf is written in terms of ``Lambda = lambda0 + lambda1 * c_hat``. Both
roots of the stationarity condition are available; the package uses the
minus root everywhere downstream because it is the one whose cdf grows with
concentration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonProbabilityVector
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate

EPSILON_LAMBDA = 1e-8
"""Below this ``|lambda1|`` formulas dividing by lambda1 switch to their limit."""


def fractional_order(alpha) -> float:
    """Validate an entropy order, returning it as a float in (0, 1]."""
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"fractional order alpha must satisfy 0 < alpha <= 1, got {alpha}")
    return alpha


@dataclass(frozen=True)
class MultiplierPair:
    """Lagrange multipliers for the normalisation and mean constraints."""

    lambda0: float
    lambda1: float

    def __post_init__(self):
        if not (math.isfinite(self.lambda0) and math.isfinite(self.lambda1)):
            raise ValueError(f"multipliers must be finite, got {self}")

    @property
    def degenerate(self) -> bool:
        return abs(self.lambda1) < EPSILON_LAMBDA

    def argument(self, c_hat):
        return self.lambda0 + self.lambda1 * np.asarray(c_hat, dtype=float)


def _as_output(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def discrete_fde(p, alpha) -> float:
    """Ubriaco entropy ``sum p_i (-ln p_i)**alpha`` of a probability vector.

    Zero-probability outcomes contribute nothing.
    """
    alpha = fractional_order(alpha)
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise NonProbabilityVector("empty probability vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise NonProbabilityVector("probabilities must be finite and non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise NonProbabilityVector(f"probabilities sum to {p.sum()!r}, not 1")
    q = p[p > 0]
    info = np.maximum(-np.log(q), 0.0)
    return float(np.sum(q * info**alpha))


def _exponents(Lam):
    """Return ``(-ln f_minus, -ln f_plus)`` for the argument ``Lam``.

    The two exponents multiply to 1/4, which lets the small one be formed
    without the cancellation in ``1 + L**2 - L*sqrt(L**2 + 2)``.
    """
    Lam = np.asarray(Lam, dtype=float)
    big = 0.5 * (1.0 + Lam**2 + np.abs(Lam) * np.sqrt(Lam**2 + 2.0))
    small = 0.25 / big
    minus = np.where(Lam >= 0, small, big)
    plus = np.where(Lam >= 0, big, small)
    return minus, plus


def _minus_exponent_scalar(L: float) -> float:
    big = 0.5 * (1.0 + L * L + abs(L) * math.sqrt(L * L + 2.0))
    return 0.25 / big if L >= 0 else big


def pdf_exponent(c_hat, lam: MultiplierPair, branch: str = "minus"):
    """``-ln f(c_hat)`` for the requested root (``"minus"`` or ``"plus"``)."""
    minus, plus = _exponents(lam.argument(c_hat))
    if branch == "minus":
        return _as_output(minus)
    if branch == "plus":
        return _as_output(plus)
    raise ValueError(f"branch must be 'minus' or 'plus', got {branch!r}")


def fde_pdf(c_hat, lam: MultiplierPair):
    """Maximum-entropy density of the normalised concentration (minus root).

    ``f = exp(-(1 + L**2 - L*sqrt(L**2 + 2)) / 2)`` with
    ``L = lambda0 + lambda1 * c_hat``; always in (0, 1).
    """
    return _as_output(np.exp(-pdf_exponent(c_hat, lam, "minus")))


def fde_pdf_plus_branch(c_hat, lam: MultiplierPair):
    """The rejected plus root of the same quadratic, kept for diagnostics."""
    return _as_output(np.exp(-pdf_exponent(c_hat, lam, "plus")))


def euler_lagrange_residual(c_hat, lam: MultiplierPair, alpha=0.5, branch="minus"):
    """Residual ``alpha*u**(alpha-1) - u**alpha + lambda0 + lambda1*c_hat``.

    ``u = -ln f`` on the chosen branch and real powers use the principal
    (non-negative) root.
    """
    alpha = fractional_order(alpha)
    u = np.asarray(pdf_exponent(c_hat, lam, branch), dtype=float)
    res = alpha * u ** (alpha - 1.0) - u**alpha + lam.argument(c_hat)
    return _as_output(res)


def fde_entropy_of_pdf(lam: MultiplierPair, alpha=0.5, c_hat_surface: float = 0.0,
                       quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Fractional differential entropy ``int f (-ln f)**alpha`` of the pdf.

    Integrated from ``c_hat_surface`` to 1 with :func:`integrate`.
    """
    alpha = fractional_order(alpha)
    if not (0.0 <= c_hat_surface < 1.0):
        raise ValueError(f"c_hat_surface must lie in [0, 1), got {c_hat_surface}")
    l0, l1 = lam.lambda0, lam.lambda1

    def integrand(c):
        u = _minus_exponent_scalar(l0 + l1 * c)
        return math.exp(-u) * u**alpha

    return integrate(integrand, c_hat_surface, 1.0, quad)
