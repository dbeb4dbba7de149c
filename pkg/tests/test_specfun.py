"""Tests for the Mittag-Leffler, Wright and Tricomi functions."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import erfc, i0, j0

from frac_opcalc.exceptions import AccuracyDomainError, DomainError, OrderWindowError
from frac_opcalc.models import FractionalOrder, MittagLefflerParams, WrightParams
from frac_opcalc.services.specfun import (
    density_bound,
    mittag_leffler,
    mittag_leffler_term,
    reciprocal_gamma,
    tail_mass_bound,
    tricomi_c0,
    wright,
    wright_density,
    wright_density_integral,
    wright_moment,
)
from tests.oracles import density_oracle, ml_oracle, wright_oracle


def ml(gamma: float, x: float, zeta: float = 1.0) -> float:
    return mittag_leffler(MittagLefflerParams(gamma=gamma, zeta=zeta), x).value


class TestMittagLeffler:
    """Tests for E_{gamma, zeta}."""

    def test_exponential(self) -> None:
        """Test E_1(x) = exp(x)."""
        for x in (-3.0, 0.5, 4.0):
            assert ml(1.0, x) == pytest.approx(math.exp(x), rel=1e-13)

    def test_half_order_error_function(self) -> None:
        """Test E_{1/2}(-1) = e erfc(1)."""
        assert ml(0.5, -1.0) == pytest.approx(math.e * erfc(1.0), rel=1e-13)

    def test_second_order_cosine(self) -> None:
        """Test E_2(-x**2) = cos(x)."""
        for x in (0.5, 2.0, 5.0):
            assert ml(2.0, -(x**2)) == pytest.approx(math.cos(x), abs=1e-12)

    def test_two_parameter(self) -> None:
        """Test E_{1,2}(2) = (e**2 - 1) / 2."""
        assert ml(1.0, 2.0, zeta=2.0) == pytest.approx((math.e**2 - 1) / 2, rel=1e-13)

    def test_zero_argument(self) -> None:
        """Test E_{gamma, zeta}(0) = 1 / Gamma(zeta)."""
        assert ml(0.7, 0.0, zeta=2.5) == pytest.approx(1 / math.gamma(2.5), rel=1e-15)

    def test_term_recurrence(self) -> None:
        """Test consecutive terms differ by x Gamma(g r + z) / Gamma(g r + g + z)."""
        p = MittagLefflerParams(gamma=0.8, zeta=1.3)
        x = -0.7
        for r in range(20):
            ratio = mittag_leffler_term(p, x, r + 1) / mittag_leffler_term(p, x, r)
            expected = x * math.gamma(0.8 * r + 1.3) / math.gamma(0.8 * r + 2.1)
            assert ratio == pytest.approx(expected, rel=1e-12)

    def test_extended_precision_reported(self) -> None:
        """Test heavy cancellation is summed in extended precision."""
        result = mittag_leffler(MittagLefflerParams(gamma=0.5), -20.0)
        assert result.extended_precision
        assert result.converged
        assert result.value == pytest.approx(ml_oracle(0.5, 1.0, -20.0), rel=1e-12)

    @pytest.mark.parametrize("gamma", [0.75, 0.9, 1.0])
    def test_completely_monotone(self, gamma: float) -> None:
        """Test E_nu(-x) decreases from 1 and stays positive on [0, 50]."""
        values = [ml(gamma, -x) for x in np.linspace(0.0, 50.0, 51)]
        assert values[0] == pytest.approx(1.0)
        assert all(v > 0 for v in values)
        assert all(b < a for a, b in zip(values, values[1:], strict=False))

    def test_completely_monotone_half_order(self) -> None:
        """Test E_{1/2}(-x) decreases and stays positive on [0, 20]."""
        values = [ml(0.5, -x) for x in np.linspace(0.0, 20.0, 41)]
        assert all(v > 0 for v in values)
        assert all(b < a for a, b in zip(values, values[1:], strict=False))

    def test_invalid_parameters(self) -> None:
        """Test gamma must be positive."""
        with pytest.raises(ValidationError):
            MittagLefflerParams(gamma=0.0)

    @pytest.mark.slow
    def test_against_oracle(self) -> None:
        """Test 50 random points against a 50-digit direct sum."""
        rng = np.random.default_rng(20240601)
        for _ in range(50):
            gamma = float(rng.uniform(0.5, 2.0))
            zeta = float(rng.uniform(0.1, 3.0))
            x = float(rng.uniform(-20.0, 20.0))
            expected = ml_oracle(gamma, zeta, x)
            assert ml(gamma, x, zeta) == pytest.approx(
                expected, rel=1e-10, abs=1e-8
            ), (gamma, zeta, x)

    @pytest.mark.parametrize(
        "gamma,zeta,x", [(0.2, 1.0, -20.0), (0.3, 2.0, -20.0), (0.2, 1.0, 5.0)]
    )
    def test_small_gamma_out_of_domain(
        self, gamma: float, zeta: float, x: float
    ) -> None:
        """Test small gamma with large |x| is refused rather than truncated."""
        with pytest.raises(AccuracyDomainError):
            mittag_leffler(MittagLefflerParams(gamma=gamma, zeta=zeta), x)


class TestWright:
    """Tests for the Wright function and the Tricomi function."""

    def test_bessel_case(self) -> None:
        """Test phi(1, 1; x) = I_0(2 sqrt(x))."""
        result = wright(WrightParams(gamma=1.0, zeta=1.0), 1.0)
        assert result.value == pytest.approx(float(i0(2.0)), rel=1e-14)

    def test_exponential_case(self) -> None:
        """Test phi(0, 1; x) = exp(x)."""
        result = wright(WrightParams(gamma=0.0, zeta=1.0), -2.0)
        assert result.value == pytest.approx(math.exp(-2.0), rel=1e-13)

    def test_tricomi_values(self) -> None:
        """Test C_0(1) = J_0(2) and C_0(-1) = I_0(2)."""
        assert tricomi_c0(1.0).value == pytest.approx(float(j0(2.0)), rel=1e-13)
        assert tricomi_c0(-1.0).value == pytest.approx(2.279585302336067, rel=1e-14)

    def test_tricomi_is_wright(self) -> None:
        """Test C_0(y) = phi(1, 1; -y)."""
        params = WrightParams(gamma=1.0, zeta=1.0)
        for y in (-3.0, 0.5, 4.0):
            assert tricomi_c0(y).value == pytest.approx(
                wright(params, -y).value, rel=1e-13
            )

    def test_against_oracle(self) -> None:
        """Test 20 random points against a 50-digit direct sum."""
        rng = np.random.default_rng(7)
        for _ in range(20):
            gamma = float(rng.uniform(0.2, 1.0))
            zeta = float(rng.uniform(0.1, 2.0))
            x = float(rng.uniform(-10.0, 10.0))
            result = wright(WrightParams(gamma=gamma, zeta=zeta), x)
            assert result.value == pytest.approx(
                wright_oracle(gamma, zeta, x), rel=1e-10, abs=1e-12
            ), (gamma, zeta, x)


class TestWrightDensity:
    """Tests for the density of the Wright-distributed variable."""

    def test_half_order_gaussian(self) -> None:
        """Test f(xi) = exp(-xi**2 / 4) / sqrt(pi) for nu = 1/2."""
        order = FractionalOrder(nu=0.5)
        for xi in (0.5, 1.0, 3.0, 6.0):
            expected = math.exp(-(xi**2) / 4) / math.sqrt(math.pi)
            assert wright_density(order, xi).value == pytest.approx(expected, rel=1e-11)

    @pytest.mark.parametrize(
        "nu,xi", [(0.3, 0.8), (0.3, 4.0), (0.75, 0.5), (0.75, 1.6)]
    )
    def test_against_oracle(self, nu: float, xi: float) -> None:
        """Test the density against a 50-digit direct sum."""
        result = wright_density(FractionalOrder(nu=nu), xi)
        assert result.value == pytest.approx(density_oracle(nu, xi), rel=1e-10)

    def test_far_tail_is_bounded(self) -> None:
        """Test a point far past the mode is returned as 0 with its bound."""
        result = wright_density(FractionalOrder(nu=0.9), 10.0)
        assert result.value == 0.0
        assert result.converged
        assert 0.0 <= result.est_error < 1e-16

    def test_density_bound_only_past_mode(self) -> None:
        """Test no bound is claimed before xi = 2."""
        assert density_bound(0.5, 1.5) == math.inf
        assert density_bound(0.5, 30.0) < 1e-30

    def test_domain(self) -> None:
        """Test xi must be positive and nu inside (0, 1)."""
        with pytest.raises(DomainError):
            wright_density(FractionalOrder(nu=0.5), 0.0)
        with pytest.raises(OrderWindowError):
            wright_density(FractionalOrder(nu=1.0), 1.0)


class TestWrightDensityIntegral:
    """Tests for the density as an integral over an angle."""

    def test_half_order_gaussian(self) -> None:
        """Test the integral reproduces exp(-xi**2 / 4) / sqrt(pi) for nu = 1/2."""
        order = FractionalOrder(nu=0.5)
        for xi in (0.5, 1.0, 3.0):
            expected = math.exp(-(xi**2) / 4) / math.sqrt(math.pi)
            result = wright_density_integral(order, xi)
            assert result.converged
            assert result.value == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("nu,xi", [(0.3, 0.8), (0.3, 4.0), (0.75, 1.6)])
    def test_against_oracle(self, nu: float, xi: float) -> None:
        """Test the integral against a 50-digit direct sum."""
        result = wright_density_integral(FractionalOrder(nu=nu), xi)
        assert result.value == pytest.approx(density_oracle(nu, xi), rel=1e-9)

    def test_order_near_one(self) -> None:
        """Test nu = 0.999 is integrated where the series gives up."""
        order = FractionalOrder(nu=0.999)
        result = wright_density(order, 1.0)
        assert result.converged
        assert 0.0 < result.value < 100.0
        assert result.value == pytest.approx(
            wright_density_integral(order, 1.0).value, rel=1e-9
        )

    def test_domain(self) -> None:
        """Test xi must be positive."""
        with pytest.raises(DomainError):
            wright_density_integral(FractionalOrder(nu=0.5), -1.0)


class TestMoments:
    """Tests for the moments and the tail bound of the Wright variable."""

    def test_first_moment(self) -> None:
        """Test E Xi = 1 / Gamma(1 + nu)."""
        assert wright_moment(0.5, 1.0) == pytest.approx(1 / math.gamma(1.5))

    def test_tail_bound_decreases(self) -> None:
        """Test the tail bound is at most 1 and non-increasing in the cut-off."""
        bounds = [tail_mass_bound(0.6, u) for u in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert all(0.0 <= b <= 1.0 for b in bounds)
        assert all(b <= a for a, b in zip(bounds, bounds[1:], strict=False))
        assert bounds[-1] < 1e-10

    def test_reciprocal_gamma_poles(self) -> None:
        """Test 1/Gamma vanishes at the poles."""
        assert reciprocal_gamma(-3.0) == 0.0
        assert reciprocal_gamma(4.0) == pytest.approx(1 / 6)
