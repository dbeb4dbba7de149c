"""Tests for the Wright-randomised exponential and the substituted clock."""

import math

import pytest

from frac_opcalc.config import Settings
from frac_opcalc.exceptions import DomainError, TailBoundError
from frac_opcalc.models import FractionalOrder, MittagLefflerParams, SubordinationSpec
from frac_opcalc.services.specfun import mittag_leffler
from frac_opcalc.services.subordination import (
    density_mass,
    make_spec,
    randomized_exponential,
    tail_mass_bound,
    time_substitution,
)


def ml(nu: float, x: float) -> float:
    return mittag_leffler(MittagLefflerParams(gamma=nu), x).value


class TestMakeSpec:
    """Tests for the quadrature setup."""

    def test_upper_limit(self, test_settings: Settings) -> None:
        """Test U is a power of two with negligible tail mass."""
        spec = make_spec(1.0, 0.5, 1.0, test_settings)
        assert math.log2(spec.quad_upper).is_integer()
        assert tail_mass_bound(0.5, spec.quad_upper) < 1e-10
        assert spec.quad_nodes == 256

    def test_initial_upper(self, test_settings: Settings) -> None:
        """Test the doubling starts from U = 8."""
        assert test_settings.subordination_initial_upper == 8.0
        assert make_spec(1.0, 0.9, 1.0, test_settings).quad_upper == 8.0
        wide = make_spec(1.0, 0.3, 1.0, test_settings).quad_upper
        assert wide >= 8.0
        assert math.log2(wide / 8.0).is_integer()

    def test_order_window(self) -> None:
        """Test nu must lie in (0, 1)."""
        with pytest.raises(DomainError):
            make_spec(1.0, 1.0, 1.0)

    def test_short_cut_off(self) -> None:
        """Test a cut-off with a large tail bound is refused."""
        spec = SubordinationSpec(
            alpha=1.0, nu=FractionalOrder(nu=0.5), t=1.0, quad_upper=1.0, quad_nodes=32
        )
        with pytest.raises(TailBoundError):
            randomized_exponential(spec)


@pytest.mark.slow
class TestRandomizedExponential:
    """Tests for the quadrature of exp(-alpha Xi t**nu) over the Wright density."""

    @pytest.mark.parametrize("nu", [0.25, 0.5, 0.75, 0.9])
    def test_density_mass(self, nu: float) -> None:
        """Test the density integrates to 1."""
        assert density_mass(nu).value == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.7, 0.9])
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
    def test_mittag_leffler(self, nu: float, alpha: float, t: float) -> None:
        """Test E exp(-alpha Xi t**nu) = E_nu(-alpha t**nu)."""
        result = randomized_exponential(make_spec(alpha, nu, t))
        assert result.converged
        assert result.value == pytest.approx(ml(nu, -alpha * t**nu), abs=1e-6)

    def test_small_alpha(self) -> None:
        """Test alpha -> 0 gives 1."""
        result = randomized_exponential(make_spec(1e-8, 0.5, 1.0))
        assert result.value == pytest.approx(1.0, abs=1e-6)

    def test_substitution_round_trip(self) -> None:
        """Test exp(-alpha tau) reproduces the Mittag-Leffler value."""
        spec = make_spec(1.0, 0.5, 1.0)
        tau = time_substitution(spec)
        assert tau == pytest.approx(-math.log(ml(0.5, -1.0)), rel=1e-8)
        assert math.exp(-spec.alpha * tau) == pytest.approx(ml(0.5, -1.0), rel=1e-8)

    def test_substitution_small_time(self) -> None:
        """Test the substituted clock starts at 0."""
        assert time_substitution(make_spec(1.0, 0.9, 1e-8)) == pytest.approx(
            0.0, abs=1e-6
        )

    def test_substitution_approaches_identity(self) -> None:
        """Test tau(t) moves towards t as nu grows."""
        gaps = [
            abs(time_substitution(make_spec(1.0, nu, 1.0)) - 1.0)
            for nu in (0.5, 0.7, 0.9)
        ]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_order_near_one(self) -> None:
        """Test nu = 0.999 gives a clock close to t."""
        assert time_substitution(make_spec(1.0, 0.999, 1.0)) == pytest.approx(
            1.0, abs=1e-2
        )

    def test_order_near_one_mass(self) -> None:
        """Test the concentrated density still integrates to 1."""
        assert density_mass(0.999).value == pytest.approx(1.0, abs=1e-4)

    def test_bulk_panels(self) -> None:
        """Test the bulk of the density gets panels beyond the uniform ones."""
        spec = make_spec(1.0, 0.9, 1.0)
        assert randomized_exponential(spec).terms_used > spec.quad_nodes
