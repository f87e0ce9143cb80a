import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdesed.entropy import (
    MultiplierPair,
    discrete_fde,
    euler_lagrange_residual,
    fde_entropy_of_pdf,
    fde_pdf,
    fde_pdf_plus_branch,
    fractional_order,
    pdf_exponent,
)
from fdesed.errors import NonProbabilityVector

lam_values = st.floats(-2.0, 2.0, allow_nan=False)
unit = st.floats(0.0, 1.0, allow_nan=False)


def mp_pdf(l0, l1, c, sign=-1, dps=40):
    with mp.workdps(dps):
        L = mp.mpf(l0) + mp.mpf(l1) * mp.mpf(c)
        return mp.e ** (-(1 + L**2 + sign * L * mp.sqrt(L**2 + 2)) / 2)


def shannon(p):
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


class TestFractionalOrder:
    @pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5, float("nan")])
    def test_rejects_outside_unit_interval(self, alpha):
        with pytest.raises(ValueError):
            fractional_order(alpha)

    def test_accepts_one(self):
        assert fractional_order(1) == 1.0


class TestDiscreteFde:
    def test_uniform_pair_alpha_one_is_ln2(self):
        assert discrete_fde([0.5, 0.5], 1.0) == pytest.approx(math.log(2), abs=1e-12)

    def test_uniform_pair_alpha_half(self):
        assert discrete_fde([0.5, 0.5], 0.5) == pytest.approx(math.sqrt(math.log(2)), abs=1e-12)

    def test_certain_outcome_is_zero(self):
        assert discrete_fde([1.0, 0.0], 0.5) == 0.0

    def test_rejects_non_probability(self):
        with pytest.raises(NonProbabilityVector):
            discrete_fde([0.5, 0.6], 0.5)
        with pytest.raises(NonProbabilityVector):
            discrete_fde([1.2, -0.2], 0.5)
        with pytest.raises(NonProbabilityVector):
            discrete_fde([], 0.5)

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8))
    def test_alpha_one_matches_independent_shannon(self, w):
        w = np.asarray(w)
        if w.sum() <= 1e-6:
            return
        p = w / w.sum()
        assert discrete_fde(p, 1.0) == pytest.approx(shannon(p), abs=1e-12)

    @given(st.lists(st.floats(1e-3, 1.0), min_size=2, max_size=8), st.floats(0.05, 1.0))
    def test_non_negative(self, w, alpha):
        p = np.asarray(w) / np.sum(w)
        assert discrete_fde(p, alpha) >= 0.0


class TestPdf:
    def test_zero_argument(self):
        assert fde_pdf(0.3, MultiplierPair(0.0, 0.0)) == pytest.approx(math.exp(-0.5), abs=1e-15)

    def test_arbitrary_precision_oracle_minus(self):
        expected = float(mp_pdf("0.1", "0.5", "0.4", -1))
        assert fde_pdf(0.4, MultiplierPair(0.1, 0.5)) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.720256762775558951195, rel=1e-20)

    def test_arbitrary_precision_oracle_plus(self):
        expected = float(mp_pdf("0.1", "0.5", "0.4", +1))
        assert fde_pdf_plus_branch(0.4, MultiplierPair(0.1, 0.5)) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.466800884188993894857, rel=1e-20)

    @settings(max_examples=200)
    @given(lam_values, lam_values, unit)
    def test_matches_mpmath_everywhere(self, l0, l1, c):
        lam = MultiplierPair(l0, l1)
        assert fde_pdf(c, lam) == pytest.approx(float(mp_pdf(l0, l1, c, -1)), rel=1e-13)
        assert fde_pdf_plus_branch(c, lam) == pytest.approx(float(mp_pdf(l0, l1, c, +1)), rel=1e-13)

    def test_large_argument_no_cancellation(self):
        # exponent tends to 1/(4 L^2) for large positive L
        L = 1e6
        u = pdf_exponent(0.0, MultiplierPair(L, 0.0))
        assert u == pytest.approx(0.25 / (0.5 * (1 + L * L + L * math.sqrt(L * L + 2))), rel=1e-15)
        assert u > 0

    @given(lam_values, lam_values, unit)
    def test_in_unit_interval_and_exponents_multiply_to_quarter(self, l0, l1, c):
        lam = MultiplierPair(l0, l1)
        f = fde_pdf(c, lam)
        assert 0.0 < f < 1.0
        product = pdf_exponent(c, lam, "minus") * pdf_exponent(c, lam, "plus")
        assert product == pytest.approx(0.25, rel=1e-12)

    @given(lam_values, lam_values, unit)
    def test_branch_order_follows_sign_of_argument(self, l0, l1, c):
        lam = MultiplierPair(l0, l1)
        L = l0 + l1 * c
        minus, plus = fde_pdf(c, lam), fde_pdf_plus_branch(c, lam)
        if L >= 0:
            assert minus >= plus
        else:
            assert minus <= plus

    def test_vectorised(self):
        c = np.linspace(0, 1, 5)
        out = fde_pdf(c, MultiplierPair(0.1, 0.5))
        assert out.shape == (5,)
        assert out[2] == fde_pdf(0.5, MultiplierPair(0.1, 0.5))

    def test_rejects_bad_branch(self):
        with pytest.raises(ValueError):
            pdf_exponent(0.5, MultiplierPair(0, 0), "sideways")

    def test_multipliers_must_be_finite(self):
        with pytest.raises(ValueError):
            MultiplierPair(float("inf"), 0.0)


class TestEulerLagrange:
    @given(lam_values, lam_values, unit)
    def test_plus_root_is_stationary(self, l0, l1, c):
        r = euler_lagrange_residual(c, MultiplierPair(l0, l1), 0.5, branch="plus")
        assert abs(r) < 1e-10

    @given(lam_values, lam_values, unit)
    def test_minus_root_residual_is_twice_argument(self, l0, l1, c):
        # with principal square roots the minus root solves the condition with
        # the sign of the multiplier term reversed
        r = euler_lagrange_residual(c, MultiplierPair(l0, l1), 0.5, branch="minus")
        assert r == pytest.approx(2 * (l0 + l1 * c), abs=1e-10)

    def test_zero_argument_both_roots_stationary(self):
        lam = MultiplierPair(0.0, 0.0)
        assert euler_lagrange_residual(0.5, lam, 0.5) == pytest.approx(0.0, abs=1e-15)


class TestEntropyOfPdf:
    def test_constant_integrand_alpha_one(self):
        value = fde_entropy_of_pdf(MultiplierPair(0, 0), alpha=1.0)
        assert value == pytest.approx(math.exp(-0.5) / 2, abs=1e-12)
        assert value == pytest.approx(0.303265, abs=1e-6)

    def test_constant_integrand_alpha_half(self):
        value = fde_entropy_of_pdf(MultiplierPair(0, 0), alpha=0.5)
        assert value == pytest.approx(math.exp(-0.5) * math.sqrt(0.5), abs=1e-12)
        assert value == pytest.approx(0.428882, abs=1e-6)

    def test_matches_mpmath_quadrature(self):
        lam = MultiplierPair(0.1, 0.5)
        with mp.workdps(30):
            expected = mp.quad(lambda c: mp_pdf(0.1, 0.5, c) * (-mp.log(mp_pdf(0.1, 0.5, c))) ** 0.5, [0, 1])
        assert fde_entropy_of_pdf(lam, 0.5) == pytest.approx(float(expected), abs=1e-9)

    def test_surface_offset_shrinks_interval(self):
        lam = MultiplierPair(0, 0)
        assert fde_entropy_of_pdf(lam, 1.0, c_hat_surface=0.5) == pytest.approx(math.exp(-0.5) / 4, abs=1e-12)

    def test_rejects_bad_surface(self):
        with pytest.raises(ValueError):
            fde_entropy_of_pdf(MultiplierPair(0, 0), 0.5, c_hat_surface=1.0)

    @settings(max_examples=30, deadline=None)
    @given(lam_values, lam_values, st.floats(0.05, 1.0))
    def test_non_negative(self, l0, l1, alpha):
        assert fde_entropy_of_pdf(MultiplierPair(l0, l1), alpha) >= 0.0
