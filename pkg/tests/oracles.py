"""Direct series sums in mpmath, independent of the summation engine.

Each oracle first scans the term magnitudes at low precision to find the
largest term, then sums at enough digits to keep 50 significant digits
after cancellation.
"""

from collections.abc import Callable

import mpmath

SIGNIFICANT = 50
MAX_TERMS = 20_000

Term = Callable[[int], mpmath.mpf]


def _direct_sum(term: Term) -> float:
    with mpmath.workdps(30):
        peak = mpmath.mpf(0)
        for r in range(MAX_TERMS):
            size = abs(term(r))
            peak = max(peak, size)
            if r > 10 and size < peak * mpmath.mpf(10) ** -80:
                break
        peak_digits = int(mpmath.log10(peak)) + 1 if peak > 1 else 0

    with mpmath.workdps(SIGNIFICANT + peak_digits + 10):
        total = mpmath.mpf(0)
        small = 0
        for r in range(MAX_TERMS):
            value = term(r)
            total += value
            if abs(value) <= abs(total) * mpmath.mpf(10) ** -(SIGNIFICANT + 5):
                small += 1
                if small >= 5:
                    break
            else:
                small = 0
        return float(total)


def ml_oracle(gamma: float, zeta: float, x: float) -> float:
    """E_{gamma, zeta}(x)."""
    return _direct_sum(
        lambda r: mpmath.mpf(x) ** r * mpmath.rgamma(mpmath.mpf(gamma) * r + zeta)
    )


def wright_oracle(gamma: float, zeta: float, x: float) -> float:
    """phi(gamma, zeta; x)."""
    return _direct_sum(
        lambda r: mpmath.mpf(x) ** r
        * mpmath.rgamma(mpmath.mpf(gamma) * r + zeta)
        / mpmath.factorial(r)
    )


def density_oracle(nu: float, xi: float) -> float:
    """Wright density f_Xi(xi) = phi(-nu, 1 - nu; -xi)."""
    return wright_oracle(-nu, 1.0 - nu, -xi)


def c0_oracle(y: float) -> float:
    """Tricomi C_0(y)."""
    return _direct_sum(lambda r: (-mpmath.mpf(y)) ** r / mpmath.factorial(r) ** 2)


def heat_oracle(beta: float, nu: float, x: float, t: float) -> float:
    """Fractional heat polynomial for integer beta >= 0 (finite sum)."""
    with mpmath.workdps(SIGNIFICANT + 10):
        total = mpmath.mpf(0)
        b = mpmath.mpf(beta)
        for r in range(int(beta) // 2 + 1):
            total += (
                mpmath.gamma(b + 1)
                * mpmath.mpf(t) ** (mpmath.mpf(nu) * r)
                * mpmath.mpf(x) ** (b - 2 * r)
                * mpmath.rgamma(mpmath.mpf(nu) * r + 1)
                * mpmath.rgamma(b + 1 - 2 * r)
            )
        return float(total)
