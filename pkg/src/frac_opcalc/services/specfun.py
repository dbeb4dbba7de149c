"""Mittag-Leffler, Wright and Tricomi functions by direct series summation.

The Wright density falls back to an integral over an angle where its series
cannot be summed.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import root_scalar
from scipy.special import gammaln, rgamma

from frac_opcalc.config import resolve_policy
from frac_opcalc.exceptions import AccuracyDomainError, DomainError
from frac_opcalc.models import (
    FractionalOrder,
    MittagLefflerParams,
    SeriesPolicy,
    SeriesResult,
    WrightParams,
)
from frac_opcalc.services.series import (
    PowerSeries,
    log_reciprocal_gamma,
    sum_power_series,
)

logger = logging.getLogger(__name__)

# Below this point the Wright density is always summed; beyond it the
# density decreases and may be bounded by the tail mass.
DENSITY_BOUND_START = 2.0
DENSITY_MODE_BOUND = 1.5
_SPLIT_FRACTIONS = (0.5, 0.25, 0.1, 0.05)
_MOMENT_ORDERS = np.geomspace(1e-2, 1e12, 4000)
# exp(-exp(s)) underflows past this
KERNEL_EXP_MAX = 700.0


def reciprocal_gamma(z: float) -> float:
    """1/Gamma(z), exactly 0 at the poles z = 0, -1, -2, ..."""
    return float(rgamma(z))


def _mittag_leffler_series(p: MittagLefflerParams) -> PowerSeries:
    gamma, zeta = p.gamma, p.zeta
    return PowerSeries(
        name=f"E[{gamma}, {zeta}]",
        log_coefficient=lambda r: log_reciprocal_gamma(gamma * r + zeta),
        exact_coefficient=lambda ctx, r: ctx.rgamma(ctx.mpf(gamma) * r + zeta),
    )


def _wright_series(p: WrightParams) -> PowerSeries:
    gamma, zeta = p.gamma, p.zeta

    def log_coefficient(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sign, log_abs = log_reciprocal_gamma(gamma * r + zeta)
        return sign, log_abs - gammaln(r + 1.0)

    return PowerSeries(
        name=f"phi[{gamma}, {zeta}]",
        log_coefficient=log_coefficient,
        exact_coefficient=lambda ctx, r: (
            ctx.rgamma(ctx.mpf(gamma) * r + zeta) / ctx.factorial(r)
        ),
    )


_TRICOMI = PowerSeries(
    name="C0",
    log_coefficient=lambda r: (np.ones(r.shape), -2.0 * gammaln(r + 1.0)),
    exact_coefficient=lambda ctx, r: 1 / ctx.factorial(r) ** 2,
)


def mittag_leffler(
    p: MittagLefflerParams, x: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """E_{gamma, zeta}(x) = sum_r x**r / Gamma(gamma * r + zeta)."""
    return sum_power_series(_mittag_leffler_series(p), x, policy)


def mittag_leffler_term(p: MittagLefflerParams, x: float, r: int) -> float:
    """The r-th term x**r / Gamma(gamma * r + zeta) of the series."""
    if x == 0.0:
        return reciprocal_gamma(p.zeta) if r == 0 else 0.0
    sign, log_abs = log_reciprocal_gamma(np.array([p.gamma * r + p.zeta]))
    if sign[0] == 0:
        return 0.0
    x_sign = -1.0 if x < 0 and r % 2 == 1 else 1.0
    return float(x_sign * sign[0] * math.exp(log_abs[0] + r * math.log(abs(x))))


def wright(
    p: WrightParams, x: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """phi(gamma, zeta; x) = sum_r x**r / (r! Gamma(gamma * r + zeta))."""
    return sum_power_series(_wright_series(p), x, policy)


def tricomi_c0(y: float, policy: SeriesPolicy | None = None) -> SeriesResult:
    """C_0(y) = sum_r (-y)**r / (r!)**2."""
    return sum_power_series(_TRICOMI, -y, policy)


def wright_moment(nu: float, s: float) -> float:
    """E Xi**s = Gamma(s + 1) / Gamma(nu * s + 1) for the Wright density."""
    return math.exp(math.lgamma(s + 1.0) - math.lgamma(nu * s + 1.0))


@lru_cache(maxsize=4096)
def tail_mass_bound(nu: float, upper: float) -> float:
    """Markov bound on P(Xi > upper), minimised over the moment order."""
    s = _MOMENT_ORDERS
    log_bound = gammaln(s + 1.0) - gammaln(nu * s + 1.0) - s * math.log(upper)
    return float(min(1.0, math.exp(min(0.0, float(np.min(log_bound))))))


def density_bound(nu: float, xi: float) -> float:
    """Upper bound on f_Xi(xi) past the mode from the mass beyond a split point.

    For split points s in [DENSITY_MODE_BOUND, xi) the density is decreasing
    on [s, xi], so f(xi) * (xi - s) <= P(Xi > s).
    """
    if xi <= DENSITY_BOUND_START:
        return math.inf
    span = xi - DENSITY_MODE_BOUND
    return min(
        tail_mass_bound(nu, xi - q * span) / (q * span) for q in _SPLIT_FRACTIONS
    )


def _density_series(nu: float) -> PowerSeries:
    def log_coefficient(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sign, log_abs = log_reciprocal_gamma(1.0 - nu * (r + 1.0))
        return sign, log_abs - gammaln(r + 1.0)

    return PowerSeries(
        name=f"f_Xi[{nu}]",
        log_coefficient=log_coefficient,
        exact_coefficient=lambda ctx, r: (
            ctx.rgamma(1 - ctx.mpf(nu) * (r + 1)) / ctx.factorial(r)
        ),
    )


@lru_cache(maxsize=65536)
def _density(nu: float, xi: float, policy: SeriesPolicy) -> SeriesResult:
    bound = density_bound(nu, xi)
    negligible = policy.rel_tol * 1e-2
    if bound < negligible:
        logger.debug(f"f_Xi[{nu}]({xi}) below {bound:.3g}, returned as 0")
        return SeriesResult(value=0.0, terms_used=0, converged=True, est_error=bound)
    try:
        result = sum_power_series(
            _density_series(nu), -xi, policy, check_negative_limit=False
        )
    except AccuracyDomainError as exc:
        logger.debug(f"{exc}; integrating instead")
        return _density_integral(nu, xi, policy)
    if not result.converged:
        logger.debug(f"f_Xi[{nu}]({xi}): series not converged, integrating instead")
        return _density_integral(nu, xi, policy)
    return result


def _log_kernel(nu: float, phi: float) -> float:
    """log K(phi) of the angular kernel of the Wright density.

    K = sin((1 - nu) phi) sin(nu phi)**(p - 1) / sin(phi)**p with p = 1 / (1 - nu)
    increases from (1 - nu) nu**(nu/(1-nu)) at 0 to infinity at pi.
    """
    p = 1.0 / (1.0 - nu)
    return (
        math.log(math.sin((1.0 - nu) * phi))
        + (p - 1.0) * math.log(math.sin(nu * phi))
        - p * math.log(math.sin(phi))
    )


def _density_integral(nu: float, xi: float, policy: SeriesPolicy) -> SeriesResult:
    """f_Xi(xi) = 1 / (pi (1 - nu) xi) * int_0^pi exp(s - exp(s)) dphi.

    s(phi) = log K(phi) + log(xi) / (1 - nu) is increasing, so the integrand
    peaks where s = 0; the range is split there.
    """
    log_y = math.log(xi) / (1.0 - nu)

    def shifted(phi: float) -> float:
        return _log_kernel(nu, phi) + log_y

    def integrand(phi: float) -> float:
        if phi <= 0.0 or phi >= math.pi:
            return 0.0
        s = shifted(phi)
        return 0.0 if s > KERNEL_EXP_MAX else math.exp(s - math.exp(s))

    lo, hi = math.pi * 1e-12, math.pi * (1.0 - 1e-12)
    edges = [0.0, math.pi]
    if shifted(lo) < 0.0 < shifted(hi):
        edges.insert(1, root_scalar(shifted, bracket=(lo, hi), method="brentq").root)
    total, error, evaluations, converged = 0.0, 0.0, 0, True
    for a, b in zip(edges[:-1], edges[1:], strict=True):
        out = quad(
            integrand,
            a,
            b,
            limit=200,
            epsabs=policy.rel_tol * 1e-2,
            epsrel=max(policy.rel_tol, 1e-11),
            full_output=1,
        )
        total += out[0]
        error += out[1]
        evaluations += out[2]["neval"]
        if len(out) > 3:
            logger.warning(f"f_Xi[{nu}]({xi}): {out[3]}")
            converged = False
    scale = 1.0 / (math.pi * (1.0 - nu) * xi)
    return SeriesResult(
        value=scale * total,
        terms_used=evaluations,
        converged=converged,
        est_error=scale * error,
        exhausted=not converged,
    )


def wright_density(
    nu: FractionalOrder, xi: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """Density of the Wright-distributed variable Xi at xi > 0.

    f_Xi(xi) = phi(-nu, 1 - nu; -xi). Far past the mode, where the series
    needs thousands of terms, a value below the summation tolerance is
    returned as 0 with its bound as ``est_error``. Where the series cannot
    be summed, as for nu close to 1, the density is integrated instead
    (see ``wright_density_integral``).
    """
    nu.require(0.0, 1.0, operation="wright_density", upper_closed=False)
    if xi <= 0:
        raise DomainError(f"wright_density requires xi > 0, got {xi}")
    return _density(nu.nu, float(xi), resolve_policy(policy))


def wright_density_integral(
    nu: FractionalOrder, xi: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """Wright density at xi > 0 from its integral over the angle in (0, pi).

    ``terms_used`` counts integrand evaluations.
    """
    nu.require(0.0, 1.0, operation="wright_density_integral", upper_closed=False)
    if xi <= 0:
        raise DomainError(f"wright_density_integral requires xi > 0, got {xi}")
    return _density_integral(nu.nu, float(xi), resolve_policy(policy))
