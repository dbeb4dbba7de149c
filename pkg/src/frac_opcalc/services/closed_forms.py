"""Closed forms of the worked models.

Fractional heat polynomials, the vibrating plate, the space-fractional
boundary value problem and the fractional Poisson process.
"""

import logging
import math

import numpy as np
from scipy.special import gammaln

from frac_opcalc.config import resolve_policy
from frac_opcalc.exceptions import DomainError
from frac_opcalc.models import (
    DeltaSequence,
    FppParams,
    FractionalOrder,
    HeatPolyParams,
    MittagLefflerParams,
    ProbabilityResult,
    SeriesPolicy,
    SeriesResult,
)
from frac_opcalc.services.series import (
    LN10,
    PowerSeries,
    extended_context,
    log_reciprocal_gamma,
    sum_power_series,
    sum_terms,
)
from frac_opcalc.services.specfun import mittag_leffler

logger = logging.getLogger(__name__)


def _time_weight(nu: float, t: float, r: int) -> float:
    """t**(nu r) / Gamma(nu r + 1)."""
    if r == 0:
        return 1.0
    if t == 0.0:
        return 0.0
    a = nu * r + 1.0
    if a < 170.0:
        return t ** (nu * r) / math.gamma(a)
    return math.exp(nu * r * math.log(t) - gammaln(a))


def _scaled(result: SeriesResult, factor: float) -> SeriesResult:
    return result.model_copy(
        update={
            "value": factor * result.value,
            "est_error": abs(factor) * result.est_error,
        }
    )


def heat_polynomial(
    p: HeatPolyParams, x: float, t: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """Fractional heat polynomial, a series in t**nu with powers x**(beta - 2r).

    Term r is Gamma(beta + 1) t**(nu r) x**(beta - 2r) divided by
    Gamma(nu r + 1) Gamma(beta + 1 - 2r).

    Integer beta >= 0 gives a polynomial of floor(beta / 2) + 1 terms. Other
    beta give a divergent series for every t > 0, reported as ``diverged``.
    """
    policy = resolve_policy(policy)
    beta, nu = p.beta, p.nu.nu
    if not p.terminates and x <= 0:
        raise DomainError(f"heat_polynomial needs x > 0 for beta = {beta}")
    if t < 0:
        raise DomainError(f"heat_polynomial needs t >= 0, got {t}")
    if t == 0.0:
        value = x**beta
        return SeriesResult(value=value, terms_used=1, converged=True, est_error=0.0)

    # Gamma(beta + 1) / Gamma(beta + 1 - 2r) as a falling factorial
    ratios = [1.0]

    def term(r: int) -> float:
        while len(ratios) <= r:
            k = len(ratios)
            ratios.append(ratios[-1] * (beta - 2 * k + 2) * (beta - 2 * k + 1))
        if ratios[r] == 0.0:
            return 0.0
        return ratios[r] * _time_weight(nu, t, r) * x ** (beta - 2 * r)

    if p.terminates:
        return sum_terms(term, policy, last=math.floor(beta / 2))
    return sum_terms(term, policy, detect_divergence=True)


def heat_polynomial_laplacian(
    p: HeatPolyParams, x: float, t: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """d^2/dx^2 of the heat polynomial, beta (beta - 1) f_{beta - 2}."""
    factor = p.beta * (p.beta - 1.0)
    if factor == 0.0:
        return SeriesResult(value=0.0, terms_used=0, converged=True, est_error=0.0)
    lowered = HeatPolyParams(beta=p.beta - 2.0, nu=p.nu)
    return _scaled(heat_polynomial(lowered, x, t, policy), factor)


def vibrating_plate(
    nu: FractionalOrder, x: float, t: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """sin(x) E_nu(-t**nu); orders above 1 assume zero initial velocity."""
    nu.require(0.0, 2.0, operation="vibrating_plate")
    if t < 0:
        raise DomainError(f"vibrating_plate needs t >= 0, got {t}")
    ml = mittag_leffler(MittagLefflerParams(gamma=nu.nu), -(t**nu.nu), policy)
    return _scaled(ml, math.sin(x))


def space_fractional_bvp(
    nu: FractionalOrder, x: float, t: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """exp(-t) E_nu(-x**nu); orders above 1 assume a zero slope at x = 0."""
    nu.require(0.0, 2.0, operation="space_fractional_bvp")
    if x < 0:
        raise DomainError(f"space_fractional_bvp needs x >= 0, got {x}")
    ml = mittag_leffler(MittagLefflerParams(gamma=nu.nu), -(x**nu.nu), policy)
    return _scaled(ml, math.exp(-t))


# Fractional Poisson process


def _pmf_series(nu: float, k: int, z: float) -> PowerSeries:
    """p_k as a power series in -z: c_j = z**k C(j + k, k) / Gamma(nu (j + k) + 1)."""
    log_z = math.log(z)

    def log_coefficient(j: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sign, log_rg = log_reciprocal_gamma(nu * (j + k) + 1.0)
        log_binom = gammaln(j + k + 1.0) - gammaln(k + 1.0) - gammaln(j + 1.0)
        return sign, k * log_z + log_binom + log_rg

    return PowerSeries(
        name=f"p_{k}[{nu}]",
        log_coefficient=log_coefficient,
        exact_coefficient=lambda ctx, j: (
            ctx.mpf(z) ** k
            * ctx.binomial(j + k, k)
            * ctx.rgamma(ctx.mpf(nu) * (j + k) + 1)
        ),
    )


def fpp_pmf(
    p: FppParams, k: int, t: float, policy: SeriesPolicy | None = None
) -> ProbabilityResult:
    """P(N(t) = k) = sum_{r >= k} (-z)**r C(r, k) (-1)**k / Gamma(nu r + 1).

    Here z = rate * t**nu.

    A negative value left by cancellation is reported as is, next to its
    clamped companion and a diagnostic.
    """
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    if t < 0:
        raise DomainError(f"fpp_pmf needs t >= 0, got {t}")
    if t == 0.0:
        value = 1.0 if k == 0 else 0.0
        return ProbabilityResult(
            value=value, terms_used=1, converged=True, est_error=0.0, clamped=value
        )
    z = p.rate * t**p.nu.nu
    result = sum_power_series(_pmf_series(p.nu.nu, k, z), -z, policy)
    diagnostic = None
    if result.value < 0:
        diagnostic = f"negative probability {result.value:.3g} from cancellation"
        logger.warning(f"p_{k}({t}): {diagnostic}")
    return ProbabilityResult(
        **result.model_dump(), clamped=max(result.value, 0.0), diagnostic=diagnostic
    )


def fpp_pgf(
    p: FppParams, u: float, t: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """G(u, t) = E_nu(-rate (1 - u) t**nu) for |u| <= 1."""
    if abs(u) > 1:
        raise DomainError(f"fpp_pgf needs |u| <= 1, got {u}")
    if t < 0:
        raise DomainError(f"fpp_pgf needs t >= 0, got {t}")
    x = -p.rate * (1.0 - u) * t**p.nu.nu
    return mittag_leffler(MittagLefflerParams(gamma=p.nu.nu), x, policy)


def fpp_mean(p: FppParams, t: float) -> float:
    """E N(t) = rate t**nu / Gamma(nu + 1), the u-derivative of G at u = 1."""
    if t < 0:
        raise DomainError(f"fpp_mean needs t >= 0, got {t}")
    return p.rate * t**p.nu.nu / math.gamma(p.nu.nu + 1.0)


def backward_shift_solution(
    p: FppParams, t: float, K_max: int, policy: SeriesPolicy | None = None
) -> np.ndarray:
    """(p_0, ..., p_K_max) from sum_r (-z)**r / Gamma(nu r + 1) (1 - B)**r delta_0.

    The powers (1 - B)**r delta_0 are built by the recursion v <- v - Bv on
    the first K_max + 1 entries, in extended precision.
    """
    if K_max < 0:
        raise DomainError(f"K_max must be non-negative, got {K_max}")
    if t < 0:
        raise DomainError(f"backward_shift_solution needs t >= 0, got {t}")
    seed = DeltaSequence().values(K_max + 1)
    if t == 0.0:
        return seed

    policy = resolve_policy(policy)
    nu = p.nu.nu
    z = p.rate * t**nu

    # Magnitude bound z**r max_k C(r, k) / Gamma(nu r + 1) of the r-th update.
    r = np.arange(policy.max_terms, dtype=float)
    k_star = np.minimum(K_max, np.floor(r / 2))
    log_binom = gammaln(r + 1.0) - gammaln(k_star + 1.0) - gammaln(r - k_star + 1.0)
    log_bound = r * math.log(z) + log_binom - gammaln(nu * r + 1.0)
    peak = int(np.argmax(log_bound))
    threshold = math.log(policy.rel_tol) + math.log(1e-3)
    below = np.nonzero((r > max(peak, K_max)) & (log_bound < threshold))[0]
    if below.size == 0:
        logger.warning(f"backward shift series not converged after {r.size} terms")
        stop = r.size
    else:
        stop = int(below[0]) + 1

    dps = math.ceil(max(float(log_bound[peak]), 0.0) / LN10) + 30
    logger.debug(f"backward shift series: {stop} terms at {dps} digits")
    ctx = extended_context(dps)
    mz = -ctx.mpf(z)
    v = [ctx.mpf(float(c)) for c in seed]
    total = list(v)
    power = ctx.mpf(1)
    for n in range(1, stop):
        v = [v[0]] + [v[k] - v[k - 1] for k in range(1, K_max + 1)]
        power *= mz
        weight = power * ctx.rgamma(ctx.mpf(nu) * n + 1)
        for k in range(K_max + 1):
            total[k] += weight * v[k]
    return np.array([float(x) for x in total])
