"""Compensated summation of power series with convergence control.

Every series of the package goes through :func:`sum_terms` (arbitrary term
callables) or :func:`sum_power_series` (``sum_r c_r x**r`` with coefficients
known in log form). Alternating power series whose double precision sum has
lost too many digits are summed again with mpmath at a working precision
derived from the largest term.
"""

import logging
import math
import threading
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from mpmath import MPContext
from scipy.special import gammaln, gammasgn

from frac_opcalc.config import Settings, get_settings, resolve_policy
from frac_opcalc.exceptions import AccuracyDomainError, SeriesOverflowError
from frac_opcalc.models import SeriesPolicy, SeriesResult

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)
LOG_MAX = math.log(float(np.finfo(float).max))
LN10 = math.log(10.0)
GUARD_DIGITS = 16

LogCoefficient = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
ExactCoefficient = Callable[[MPContext, int], Any]

_local = threading.local()


def extended_context(dps: int) -> MPContext:
    """Thread-local mpmath context set to ``dps`` decimal digits."""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = MPContext()
        _local.ctx = ctx
    ctx.dps = dps
    return ctx


class CompensatedSum:
    """Running sum with second-order Neumaier (Klein) compensation."""

    __slots__ = ("_c", "_cc", "_s", "abs_total")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0
        self._cc = 0.0
        self.abs_total = 0.0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        c = (s - t) + x if abs(s) >= abs(x) else (x - t) + s
        self._s = t
        t = self._c + c
        if abs(self._c) >= abs(c):
            cc = (self._c - t) + c
        else:
            cc = (c - t) + self._c
        self._c = t
        self._cc += cc
        self.abs_total += abs(x)

    @property
    def value(self) -> float:
        return self._s + self._c + self._cc


def log_reciprocal_gamma(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log|1/Gamma(z)|, with sign 0 at the poles of Gamma."""
    z = np.asarray(z, dtype=float)
    pole = (z <= 0) & (z == np.floor(z))
    with np.errstate(all="ignore"):
        sign = np.where(pole, 0.0, gammasgn(np.where(pole, 0.5, z)))
        log_abs = np.where(pole, -np.inf, -gammaln(np.where(pole, 0.5, z)))
    return sign, log_abs


@dataclass(frozen=True)
class PowerSeries:
    """sum_r c_r x**r, with c_r available as (sign, log|c_r|) and in mpmath.

    ``log_coefficient`` must accept an integer array and return arrays.
    """

    name: str
    log_coefficient: LogCoefficient
    exact_coefficient: ExactCoefficient


def sum_terms(
    term: Callable[[int], float],
    policy: SeriesPolicy,
    *,
    start: int = 0,
    last: int | None = None,
    detect_divergence: bool = False,
) -> SeriesResult:
    """Sum term(start), term(start + 1), ... under ``policy``.

    Stops once ``consecutive_small`` successive terms are below
    ``rel_tol * |partial sum| + abs_tol`` without growing in magnitude. A
    known finite sum passes its last index as ``last`` and is summed in
    full. With ``detect_divergence`` the summation stops as soon as the
    terms grow again after a minimum that was never small.
    """
    acc = CompensatedSum()
    stop = start + policy.max_terms
    if last is not None:
        stop = min(stop, last + 1)

    streak = 0
    rising = 0
    fell = False
    previous = math.inf
    smallest = math.inf
    last_magnitude = 0.0
    used = 0
    converged = False
    diverged = False

    for r in range(start, stop):
        value = term(r)
        if not math.isfinite(value):
            if detect_divergence:
                diverged = True
                break
            raise SeriesOverflowError(f"term {r} of the series is not finite")
        acc.add(value)
        used += 1
        magnitude = abs(value)
        tolerance = policy.rel_tol * abs(acc.value) + policy.abs_tol

        if magnitude <= tolerance and magnitude <= previous:
            streak += 1
        else:
            streak = 0

        if magnitude > 0:
            if detect_divergence and previous < math.inf:
                if magnitude > previous:
                    rising += 1
                else:
                    rising = 0
                    fell = True
                smallest = min(smallest, magnitude)
                if fell and rising >= policy.consecutive_small and smallest > tolerance:
                    diverged = True
                    break
            previous = magnitude
            last_magnitude = magnitude

        if last is None and streak >= policy.consecutive_small:
            converged = True
            break
    else:
        converged = last is not None and stop == last + 1

    roundoff = EPS * acc.abs_total
    if converged and last is not None:
        est_error = roundoff
    else:
        est_error = last_magnitude + roundoff
    if diverged:
        logger.warning(f"series diverges after {used} terms")
    elif not converged:
        logger.warning(f"series not converged after {used} terms")
    return SeriesResult(
        value=acc.value,
        terms_used=used,
        converged=converged,
        est_error=est_error,
        diverged=diverged,
    )


def sum_power_series(
    series: PowerSeries,
    x: float,
    policy: SeriesPolicy | None = None,
    *,
    check_negative_limit: bool = True,
    settings: Settings | None = None,
) -> SeriesResult:
    """Evaluate ``series`` at x with the extended precision fallback."""
    policy = resolve_policy(policy)
    settings = settings or get_settings()

    if x < 0 and check_negative_limit and -x > settings.negative_argument_limit:
        raise AccuracyDomainError(
            f"{series.name}: |x| = {-x} exceeds the accuracy domain "
            f"{settings.negative_argument_limit} for negative arguments"
        )

    if x == 0.0:
        sign, log_coeff = series.log_coefficient(np.arange(1))
        return SeriesResult(
            value=float(sign[0] * math.exp(log_coeff[0])) if sign[0] else 0.0,
            terms_used=1,
            converged=True,
            est_error=0.0,
        )

    log_x = math.log(abs(x))
    r, sign, log_coeff, log_terms = _log_terms(series, log_x, policy)
    peak = int(np.argmax(log_terms))
    peak_log = float(log_terms[peak])
    if not math.isfinite(peak_log):
        return SeriesResult(value=0.0, terms_used=1, converged=True, est_error=0.0)
    if peak == policy.max_terms - 1:
        raise AccuracyDomainError(
            f"{series.name}: terms still grow after {policy.max_terms} terms at x={x}"
        )

    parity = np.where(r % 2 == 1, -1.0, 1.0) if x < 0 else np.ones(r.size)
    term_signs = sign * parity
    alternating = bool(np.any(term_signs < 0))
    if not alternating and peak_log > LOG_MAX:
        raise SeriesOverflowError(f"{series.name}({x}) exceeds double range")
    if alternating and peak_log / LN10 > settings.max_extended_digits:
        raise AccuracyDomainError(
            f"{series.name}: cancellation at x={x} needs more than "
            f"{settings.max_extended_digits} digits"
        )

    if peak_log < LOG_MAX - 1.0:
        with np.errstate(under="ignore"):
            terms = term_signs * np.exp(log_terms)

        def term(k: int) -> float:
            if k < terms.size:
                return float(terms[k])
            return _single_term(series, x, k)

        result = sum_terms(term, policy)
        if not alternating or not result.converged:
            return result
        used = min(result.terms_used, terms.size)
        # each term carries a relative error of about eps * (|log term| + 4)
        finite_log = np.where(np.isfinite(log_coeff[:used]), log_coeff[:used], 0.0)
        spread = np.abs(r[:used] * log_x) + np.abs(finite_log) + 4.0
        roundoff = EPS * float(np.sum(np.abs(terms[:used]) * spread))
        if roundoff <= settings.cancellation_tol * abs(result.value):
            return result.model_copy(update={"est_error": result.est_error + roundoff})

    return _extended_sum(series, x, policy, settings, peak_log)


def _log_terms(
    series: PowerSeries, log_x: float, policy: SeriesPolicy
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """log|c_r x**r| on an index range doubled until the terms have died out."""
    drop = math.log(policy.rel_tol) - 5.0
    n = min(64, policy.max_terms)
    while True:
        r = np.arange(n)
        sign, log_coeff = series.log_coefficient(r)
        with np.errstate(invalid="ignore"):
            log_terms = np.where(sign == 0, -np.inf, log_coeff + r * log_x)
        if n == policy.max_terms:
            return r, sign, log_coeff, log_terms
        tail = log_terms[(3 * n) // 4 :]
        if float(np.max(tail)) < float(np.max(log_terms)) + drop:
            return r, sign, log_coeff, log_terms
        n = min(2 * n, policy.max_terms)


def _single_term(series: PowerSeries, x: float, k: int) -> float:
    sign, log_coeff = series.log_coefficient(np.array([k]))
    if sign[0] == 0:
        return 0.0
    parity = -1.0 if x < 0 and k % 2 == 1 else 1.0
    return float(parity * sign[0] * math.exp(log_coeff[0] + k * math.log(abs(x))))


def _extended_sum(
    series: PowerSeries,
    x: float,
    policy: SeriesPolicy,
    settings: Settings,
    peak_log: float,
) -> SeriesResult:
    """Re-sum an alternating series with mpmath, raising precision as needed.

    The first pass assumes a value of order one; it is repeated while fewer
    than GUARD_DIGITS digits survive the cancellation.
    """
    lost = max(peak_log, 0.0) / LN10
    dps = math.ceil(lost) + GUARD_DIGITS + 6

    for _ in range(6):
        if dps > settings.max_extended_digits:
            raise AccuracyDomainError(
                f"{series.name}: x={x} needs {dps} digits, "
                f"limit is {settings.max_extended_digits}"
            )
        logger.debug(f"{series.name}({x}): extended summation at {dps} digits")
        value, used, converged, tail = _mp_loop(series, x, policy, dps)
        if value == 0.0:
            break
        lost = (peak_log - math.log(abs(value))) / LN10
        if dps >= lost + GUARD_DIGITS:
            break
        dps = math.ceil(lost) + GUARD_DIGITS + 6

    if not math.isfinite(value):
        raise SeriesOverflowError(f"{series.name}({x}) exceeds double range")
    if not converged:
        logger.warning(f"{series.name}({x}) not converged after {used} terms")
    residual = abs(value) * 10.0 ** (max(lost, 0.0) - dps)
    return SeriesResult(
        value=value,
        terms_used=used,
        converged=converged,
        est_error=tail + residual,
        extended_precision=True,
    )


def _mp_loop(
    series: PowerSeries, x: float, policy: SeriesPolicy, dps: int
) -> tuple[float, int, bool, float]:
    ctx = extended_context(dps)
    xm = ctx.mpf(x)
    power = ctx.mpf(1)
    total = ctx.mpf(0)
    previous = ctx.inf
    last_magnitude = ctx.mpf(0)
    streak = 0
    used = 0
    converged = False
    for r in range(policy.max_terms):
        term = series.exact_coefficient(ctx, r) * power
        power *= xm
        total += term
        used += 1
        magnitude = abs(term)
        tolerance = policy.rel_tol * abs(total) + policy.abs_tol
        if magnitude <= tolerance and magnitude <= previous:
            streak += 1
        else:
            streak = 0
        if magnitude > 0:
            previous = magnitude
            last_magnitude = magnitude
        if streak >= policy.consecutive_small:
            converged = True
            break
    return float(total), used, converged, float(last_magnitude)
