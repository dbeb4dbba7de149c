"""Caputo derivative, Riemann-Liouville integral and the modified integral.

Power functions are handled exactly through gamma ratios; sampled functions
go through the L1 product quadrature on a uniform mesh. The measure
ds_nu = Gamma(m) / (Gamma(nu) (t - s)**(1 - nu)) ds is realised as product
trapezoidal node weights.
"""

import math

import numpy as np
from scipy.special import gammaln

from frac_opcalc.config import resolve_policy
from frac_opcalc.exceptions import DomainError, MeshError
from frac_opcalc.models import (
    FractionalOrder,
    FractionalWeight,
    PowerTerm,
    SampledFunction,
    SeriesPolicy,
    SeriesResult,
)
from frac_opcalc.services.series import sum_terms

MESH_RTOL = 1e-9


def _gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) for a, b > 0."""
    return math.exp(gammaln(a) - gammaln(b))


def caputo_power(order: FractionalOrder, p: PowerTerm) -> PowerTerm:
    """Exact Caputo derivative of coeff * t**e.

    Polynomial terms of degree below m are annihilated; for e > m - 1 the
    power rule Gamma(e + 1) / Gamma(e + 1 - nu) * t**(e - nu) applies.
    """
    order.require(0.0, 2.0, operation="caputo_power")
    if p.is_zero:
        return PowerTerm.zero()
    e, m = p.exponent, order.m
    if e >= 0 and e == math.floor(e) and e < m:
        return PowerTerm.zero()
    if e <= m - 1:
        raise DomainError(
            f"caputo_power: exponent {e} is neither above {m - 1} "
            f"nor a non-negative integer below {m}"
        )
    return PowerTerm(
        coeff=p.coeff * _gamma_ratio(e + 1.0, e + 1.0 - order.nu),
        exponent=e - order.nu,
    )


def rl_integral_power(order: FractionalOrder, p: PowerTerm) -> PowerTerm:
    """Riemann-Liouville integral D^{-nu} of coeff * t**e."""
    if p.is_zero:
        return PowerTerm.zero()
    e = p.exponent
    return PowerTerm(
        coeff=p.coeff * _gamma_ratio(e + 1.0, e + 1.0 + order.nu),
        exponent=e + order.nu,
    )


def _modified_integral(order: FractionalOrder, p: PowerTerm) -> PowerTerm:
    integral = rl_integral_power(order, p)
    scale = math.gamma(order.m)
    return integral.model_copy(update={"coeff": integral.coeff * scale})


def modified_integral_power(order: FractionalOrder, p: PowerTerm) -> PowerTerm:
    """Gamma(ceil(nu)) * D^{-nu} applied to coeff * t**e, for nu in (0, 1)."""
    order.require(0.0, 1.0, operation="modified_integral_power", upper_closed=False)
    return _modified_integral(order, p)


def _check_time(t: float) -> None:
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")


def operator_exponential_on_one(
    order: FractionalOrder,
    alpha: float,
    t: float,
    policy: SeriesPolicy | None = None,
) -> SeriesResult:
    """sum_r (-alpha)**r * (modified integral)**r applied to 1, at t.

    The powers are built by repeated application of the modified integral,
    so the sum reproduces E_nu(-alpha * t**nu) independently of the
    Mittag-Leffler summation. nu = 1 gives the ordinary integral.
    """
    order.require(0.0, 1.0, operation="operator_exponential_on_one")
    _check_time(t)
    powers = [PowerTerm(coeff=1.0, exponent=0.0)]

    def term(r: int) -> float:
        while len(powers) <= r:
            nxt = _modified_integral(order, powers[-1])
            powers.append(nxt.model_copy(update={"coeff": -alpha * nxt.coeff}))
        return powers[r](t)

    return sum_terms(term, resolve_policy(policy))


def wright_exponential_on_one(
    order: FractionalOrder,
    alpha: float,
    t: float,
    policy: SeriesPolicy | None = None,
) -> SeriesResult:
    """sum_r (-alpha)**r / r! * (D^{-nu})**r applied to 1, at t."""
    _check_time(t)
    powers = [PowerTerm(coeff=1.0, exponent=0.0)]

    def term(r: int) -> float:
        while len(powers) <= r:
            k = len(powers)
            nxt = rl_integral_power(order, powers[-1])
            powers.append(nxt.model_copy(update={"coeff": -alpha * nxt.coeff / k}))
        return powers[r](t)

    return sum_terms(term, resolve_policy(policy))


# Sampled functions


def _uniform_step(f: SampledFunction) -> float:
    steps = np.diff(f.t_grid)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=MESH_RTOL, atol=0.0):
        raise MeshError("the L1 scheme needs a uniform mesh")
    return h


def _l1_weights(nu: float, count: int) -> np.ndarray:
    """b_i = (i + 1)**(1 - nu) - i**(1 - nu), taking 0**(1 - nu) as 0."""
    powers = np.arange(count + 1, dtype=float) ** (1.0 - nu)
    powers[0] = 0.0
    return np.diff(powers)


def caputo_l1(order: FractionalOrder, f: SampledFunction, t_index: int) -> float:
    """L1 approximation of the Caputo derivative at t_grid[t_index]."""
    order.require(0.0, 1.0, operation="caputo_l1")
    h = _uniform_step(f)
    if not 1 <= t_index < f.t_grid.size:
        raise MeshError(
            f"t_index must lie in [1, {f.t_grid.size - 1}], got {t_index}"
        )
    nu = order.nu
    b = _l1_weights(nu, t_index)
    increments = np.diff(f.values[: t_index + 1])
    total = float(np.dot(b[::-1], increments))
    return total / (math.gamma(2.0 - nu) * h**nu)


def caputo_l1_grid(order: FractionalOrder, f: SampledFunction) -> np.ndarray:
    """L1 approximation at every node after the first.

    Entry k - 1 of the result belongs to t_grid[k].
    """
    order.require(0.0, 1.0, operation="caputo_l1_grid")
    h = _uniform_step(f)
    nu = order.nu
    n = f.t_grid.size - 1
    increments = np.diff(f.values)
    sums = np.convolve(_l1_weights(nu, n), increments)[:n]
    return sums / (math.gamma(2.0 - nu) * h**nu)


def fractional_weights(order: FractionalOrder, mesh: np.ndarray) -> FractionalWeight:
    """Product trapezoidal weights of ds_nu on ``mesh``, ending at t = mesh[-1].

    The integrand is interpolated linearly on every cell and the kernel
    Gamma(m) / Gamma(nu) * (t - s)**(nu - 1) is integrated exactly, so the
    weights sum to Gamma(m) * (t - mesh[0])**nu / Gamma(nu + 1).
    """
    mesh = np.asarray(mesh, dtype=float)
    if mesh.ndim != 1 or mesh.size < 2 or np.any(np.diff(mesh) <= 0):
        raise MeshError("the mesh must be strictly increasing with two nodes")
    nu = order.nu
    t = mesh[-1]
    a = t - mesh[1:]
    b = t - mesh[:-1]
    h = b - a
    cell = (b**nu - a**nu) / nu
    first = b * cell - (b ** (nu + 1.0) - a ** (nu + 1.0)) / (nu + 1.0)
    right = first / h
    left = cell - right

    weights = np.zeros(mesh.size)
    weights[:-1] += left
    weights[1:] += right
    scale = math.exp(gammaln(order.m) - gammaln(nu))
    return FractionalWeight(
        nu=order, mesh=mesh, node_weights=np.clip(scale * weights, 0.0, None)
    )


def integrate_measure(weight: FractionalWeight, values: np.ndarray) -> float:
    """Integral of sampled values against ds_nu."""
    values = np.asarray(values, dtype=float)
    if values.shape != weight.node_weights.shape:
        raise MeshError("values must be sampled on the weight mesh")
    return float(np.dot(weight.node_weights, values))
