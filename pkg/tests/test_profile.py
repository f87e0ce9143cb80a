import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import synthetic_dataset
from fdesed.dataio import SedimentProfileDataset
from fdesed.entropy import MultiplierPair
from fdesed.errors import (
    BoundaryOptimum,
    FlatObjective,
    InsufficientData,
    NegativeDiscriminant,
    OutOfDomainHeight,
)
from fdesed.profile import (
    FdeModelParameters,
    FlowGeometry,
    concentration_profile,
    concentration_profile_normalized,
    dimensional_concentration,
    fit_profile,
    fit_shape_parameter,
    golden_section,
    hypothetical_cdf,
    hypothetical_cdf_normalized,
    mean_normalized_concentration,
    profile_from_cdf,
    shape_objective,
)
from fdesed.series import cdf_two_term, solve_multipliers

UNIT_GEOM = FlowGeometry(h=1.0, y_r=0.0, c_r=1.0)


def params_for(c_m, a, geometry=UNIT_GEOM):
    return FdeModelParameters(solve_multipliers(c_m), a, c_m, geometry)


class TestHypotheticalCdf:
    def test_hand_value(self):
        assert hypothetical_cdf_normalized(0.5, 1.0) == pytest.approx(0.5 * math.exp(-0.5), abs=1e-15)

    def test_end_points(self):
        assert hypothetical_cdf_normalized(0.0, 0.3) == 1.0
        assert hypothetical_cdf_normalized(1.0, 0.3) == 0.0

    def test_dimensional_heights(self):
        g = FlowGeometry(h=2.0, y_r=0.5, c_r=3.0)
        assert hypothetical_cdf(1.25, g, 1.0) == pytest.approx(0.5 * math.exp(-0.5), abs=1e-15)
        with pytest.raises(OutOfDomainHeight):
            hypothetical_cdf(2.5, g, 1.0)

    @given(st.floats(0.01, 3.0))
    def test_monotone(self, a):
        F = hypothetical_cdf_normalized(np.linspace(0, 1, 200), a)
        assert np.all(np.diff(F) <= 1e-15)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            hypothetical_cdf_normalized(0.5, 0.0)


class TestProfile:
    def test_degenerate_limit_equals_cdf(self):
        p = params_for(0.5, 1.0)
        assert concentration_profile(0.5, p) == pytest.approx(0.5 * math.exp(-0.5), abs=1e-15)

    def test_dimensional(self):
        g = FlowGeometry(h=1.0, y_r=0.0, c_r=10.0)
        p = params_for(0.5, 1.0, g)
        assert dimensional_concentration(0.5, p) == pytest.approx(3.03265, abs=1e-5)

    @pytest.mark.parametrize("c_m", [0.34, 0.4, 0.5, 0.6, 0.66])
    def test_reference_and_surface(self, c_m):
        p = params_for(c_m, 0.5)
        assert concentration_profile_normalized(0.0, p) == pytest.approx(1.0, abs=1e-12)
        assert concentration_profile_normalized(1.0, p) == pytest.approx(0.0, abs=1e-12)

    @given(st.floats(1 / 3, 2 / 3), st.floats(0.05, 2.0))
    def test_inverts_two_term_cdf(self, c_m, a):
        p = params_for(c_m, a)
        y = np.linspace(0, 1, 50)
        c = concentration_profile_normalized(y, p)
        assert np.allclose(cdf_two_term(c, p.lam), hypothetical_cdf_normalized(y, a), atol=1e-12)

    @given(st.floats(1 / 3, 2 / 3), st.floats(0.05, 2.0))
    def test_non_increasing(self, c_m, a):
        c = concentration_profile_normalized(np.linspace(0, 1, 300), params_for(c_m, a))
        assert np.all(np.diff(c) <= 1e-14)

    def test_near_degenerate_continuity(self):
        F = np.linspace(0, 1, 101)
        for l1 in (1e-6, -1e-6, 1e-9):
            c = profile_from_cdf(F, MultiplierPair(0.5 * 4.663288 - l1 / 2, l1))
            assert np.max(np.abs(c - F)) < 1e-5

    def test_negative_discriminant(self):
        with pytest.raises(NegativeDiscriminant):
            profile_from_cdf(0.9, MultiplierPair(1.0, -1.0))
        with pytest.raises(NegativeDiscriminant):
            profile_from_cdf(0.5, MultiplierPair(-1.0, 0.0))

    def test_negative_intercept_branch(self):
        lam = MultiplierPair(-0.5, 3.0)
        c = profile_from_cdf(0.4, lam)
        assert cdf_two_term(c, lam) == pytest.approx(0.4, abs=1e-12)

    def test_consistency_residual(self):
        p = params_for(0.6, 0.7)
        assert p.consistency_residual() == 0.0


class TestGeometry:
    def test_validation(self):
        with pytest.raises(ValueError):
            FlowGeometry(h=1.0, y_r=1.0, c_r=1.0)
        with pytest.raises(ValueError):
            FlowGeometry(h=1.0, y_r=0.0, c_r=0.0)

    def test_normalized_height(self):
        g = FlowGeometry(h=3.0, y_r=1.0, c_r=1.0)
        assert g.normalized_height(2.0) == pytest.approx(0.5)
        with pytest.raises(OutOfDomainHeight):
            g.normalized_height(0.5)


class TestMeanConcentration:
    def test_trapezoid_brute_force(self):
        y = np.linspace(0, 1, 11)
        ds = SedimentProfileDataset("sq", y, (1 - y) ** 2, UNIT_GEOM)
        # hand sum: 0.1 * (0.5 + 0.81 + 0.64 + ... + 0.01 + 0)
        assert mean_normalized_concentration(ds) == pytest.approx(0.335, abs=1e-12)

    def test_extends_to_surface(self):
        g = FlowGeometry(h=2.0, y_r=0.0, c_r=1.0)
        ds = SedimentProfileDataset("x", [0.0, 1.0], [1.0, 1.0], g)
        assert mean_normalized_concentration(ds) == pytest.approx(0.75)
        assert mean_normalized_concentration(ds, extend_to_surface=False) == pytest.approx(1.0)

    def test_insufficient(self):
        ds = SedimentProfileDataset("x", [0.0], [1.0], UNIT_GEOM)
        with pytest.raises(InsufficientData):
            mean_normalized_concentration(ds)


class TestGoldenSection:
    def test_quadratic(self):
        x, fx = golden_section(lambda t: (t - 0.3) ** 2, 0.0, 1.0, 1e-10)
        assert x == pytest.approx(0.3, abs=1e-8) and fx < 1e-16

    def test_boundary_minimum(self):
        x, _ = golden_section(lambda t: t, 0.2, 1.0)
        assert x == 0.2


class TestFit:
    def test_shape_recovery_with_known_multipliers(self, synthetic):
        ds, p = synthetic
        fit = fit_shape_parameter(ds, p.lam)
        assert fit.a == pytest.approx(0.7, abs=1e-6)
        assert fit.objective < 1e-12
        assert shape_objective(ds, p.lam, 0.7) < 1e-20

    def test_joint_fit_recovers_generator(self, synthetic):
        ds, _ = synthetic
        fit = fit_profile(ds)
        assert fit.params.c_m_hat == pytest.approx(0.6, abs=1e-6)
        assert fit.params.a == pytest.approx(0.7, abs=1e-5)
        assert "MeanOutsideMonotoneRange" not in fit.flags

    @pytest.mark.parametrize("c_m,a", [(0.4, 0.3), (0.55, 0.9), (0.65, 0.5)])
    def test_joint_fit_other_generators(self, c_m, a):
        ds, _ = synthetic_dataset(c_m=c_m, a=a, n=40, y_r=0.01, h=0.5, c_r=4.0)
        fit = fit_profile(ds)
        assert fit.params.a == pytest.approx(a, abs=1e-4)
        assert fit.params.c_m_hat == pytest.approx(c_m, abs=1e-4)

    def test_trapezoid_method_runs(self, synthetic):
        ds, _ = synthetic
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryOptimum)
            fit = fit_profile(ds, mean_method="trapezoid")
        assert fit.mean_method == "trapezoid"
        assert fit.params.c_m_hat == pytest.approx(mean_normalized_concentration(ds))

    def test_boundary_warning(self, synthetic):
        ds, p = synthetic
        with pytest.warns(BoundaryOptimum):
            fit = fit_shape_parameter(ds, p.lam, search=(0.01, 0.5))
        assert "BoundaryOptimum" in fit.flags

    def test_flat_objective_warning(self):
        y = np.linspace(0, 1, 6)
        ds = SedimentProfileDataset("flat", y, np.zeros(6), UNIT_GEOM)
        # y**a underflows for large a, so the objective stops depending on a
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryOptimum)
            with pytest.warns(FlatObjective):
                fit_shape_parameter(ds, solve_multipliers(0.6), search=(5000.0, 6000.0))

    def test_insufficient_data(self):
        ds = SedimentProfileDataset("tiny", [0.0, 0.5, 1.0], [1.0, 0.3, 0.0], UNIT_GEOM)
        with pytest.raises(InsufficientData):
            fit_profile(ds)

    def test_rejects_unknown_method(self, synthetic):
        with pytest.raises(ValueError):
            fit_profile(synthetic[0], mean_method="median")
