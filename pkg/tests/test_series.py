"""Tests for the compensated series engine."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

from frac_opcalc.config import Settings
from frac_opcalc.exceptions import AccuracyDomainError, SeriesOverflowError
from frac_opcalc.models import SeriesPolicy
from frac_opcalc.services.series import (
    CompensatedSum,
    PowerSeries,
    log_reciprocal_gamma,
    sum_power_series,
    sum_terms,
)

EXP_SERIES = PowerSeries(
    name="exp",
    log_coefficient=lambda r: (np.ones(r.shape), -gammaln(r + 1.0)),
    exact_coefficient=lambda ctx, r: 1 / ctx.factorial(r),
)


class TestCompensatedSum:
    """Tests for the Klein-Neumaier accumulator."""

    def test_recovers_absorbed_term(self) -> None:
        """Test a small term absorbed by a large one is recovered."""
        acc = CompensatedSum()
        for x in (1e16, 1.0, -1e16):
            acc.add(x)
        assert acc.value == 1.0

    def test_abs_total(self) -> None:
        """Test the running sum of magnitudes."""
        acc = CompensatedSum()
        for x in (1.0, -2.0, 3.0):
            acc.add(x)
        assert acc.value == 2.0
        assert acc.abs_total == 6.0


class TestSumTerms:
    """Tests for summation of term callables."""

    def test_geometric_series(self, policy: SeriesPolicy) -> None:
        """Test sum 0.5**r converges to 2."""
        result = sum_terms(lambda r: 0.5**r, policy)
        assert result.converged
        assert not result.diverged
        assert result.value == pytest.approx(2.0, rel=1e-14)
        assert result.est_error < 1e-13

    def test_finite_sum_is_summed_in_full(self, policy: SeriesPolicy) -> None:
        """Test a known last index sums every term and reports roundoff only."""
        result = sum_terms(lambda r: 1.0, policy, last=4)
        assert result.value == 5.0
        assert result.terms_used == 5
        assert result.converged
        assert result.est_error < 1e-14

    def test_start_index(self, policy: SeriesPolicy) -> None:
        """Test summation from a later index."""
        result = sum_terms(lambda r: 0.5**r, policy, start=1)
        assert result.value == pytest.approx(1.0, rel=1e-14)

    def test_max_terms_reached(self) -> None:
        """Test the harmonic series stops unconverged at max_terms."""
        policy = SeriesPolicy(max_terms=50)
        result = sum_terms(lambda r: 1.0 / (r + 1), policy)
        assert not result.converged
        assert not result.diverged
        assert result.terms_used == 50

    def test_divergence_detected(self, policy: SeriesPolicy) -> None:
        """Test an asymptotic series is stopped once its terms grow again."""
        result = sum_terms(
            lambda r: math.factorial(r) * 0.1**r, policy, detect_divergence=True
        )
        assert result.diverged
        assert not result.converged
        assert result.terms_used < 20

    def test_non_finite_term_raises(self, policy: SeriesPolicy) -> None:
        """Test an infinite term raises SeriesOverflowError."""
        with pytest.raises(SeriesOverflowError):
            sum_terms(lambda r: math.inf if r == 2 else 1.0, policy)

    def test_non_finite_term_marks_divergence(self, policy: SeriesPolicy) -> None:
        """Test an infinite term is reported as divergence when requested."""
        result = sum_terms(
            lambda r: math.inf if r == 2 else 1.0, policy, detect_divergence=True
        )
        assert result.diverged
        assert result.terms_used == 2


class TestLogReciprocalGamma:
    """Tests for 1/Gamma in sign and log form."""

    def test_poles_have_zero_sign(self) -> None:
        """Test non-positive integers give sign 0 and log -inf."""
        sign, log_abs = log_reciprocal_gamma(np.array([-2.0, 0.0]))
        assert list(sign) == [0.0, 0.0]
        assert np.all(np.isneginf(log_abs))

    def test_regular_points(self) -> None:
        """Test values away from the poles."""
        sign, log_abs = log_reciprocal_gamma(np.array([-0.5, 0.5, 3.0]))
        assert list(sign) == [-1.0, 1.0, 1.0]
        assert log_abs[1] == pytest.approx(-math.lgamma(0.5))
        assert log_abs[2] == pytest.approx(-math.log(2.0))


class TestSumPowerSeries:
    """Tests for power series with the extended precision fallback."""

    def test_positive_argument(self) -> None:
        """Test exp(1) in double precision."""
        result = sum_power_series(EXP_SERIES, 1.0)
        assert result.value == pytest.approx(math.e, rel=1e-14)
        assert result.converged
        assert not result.extended_precision

    def test_zero_argument(self) -> None:
        """Test x = 0 returns the leading coefficient."""
        result = sum_power_series(EXP_SERIES, 0.0)
        assert result.value == 1.0
        assert result.terms_used == 1

    def test_cancellation_switches_to_extended_precision(self) -> None:
        """Test exp(-30) keeps its relative accuracy."""
        result = sum_power_series(EXP_SERIES, -30.0)
        assert result.extended_precision
        assert result.converged
        assert result.value == pytest.approx(math.exp(-30.0), rel=1e-12)

    def test_negative_argument_limit(self) -> None:
        """Test the accuracy domain for negative arguments."""
        with pytest.raises(AccuracyDomainError):
            sum_power_series(EXP_SERIES, -60.0)

    def test_negative_argument_limit_can_be_lifted(self) -> None:
        """Test exp(-60) when the limit check is switched off."""
        result = sum_power_series(EXP_SERIES, -60.0, check_negative_limit=False)
        assert result.value == pytest.approx(math.exp(-60.0), rel=1e-12)

    def test_precision_cost_guard(self) -> None:
        """Test a low digit limit refuses heavy cancellation."""
        settings = Settings(max_extended_digits=30)
        with pytest.raises(AccuracyDomainError):
            sum_power_series(EXP_SERIES, -45.0, settings=settings)

    def test_overflow(self) -> None:
        """Test exp(800) overflows the double range."""
        with pytest.raises(SeriesOverflowError):
            sum_power_series(EXP_SERIES, 800.0)
