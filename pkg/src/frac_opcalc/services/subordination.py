"""Time randomisation: E exp(-alpha Xi t**nu) over the Wright density.

The expectation is a composite Gauss-Legendre quadrature of the density on
[0, U], with U taken from a Markov bound on the tail mass built from the
exact moments E Xi**s = Gamma(s + 1) / Gamma(nu s + 1). ``quad_nodes``
counts the uniform panels; the bulk of the density gets extra panels.
"""

import logging
import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from frac_opcalc.config import Settings, get_settings, resolve_policy
from frac_opcalc.exceptions import DomainError, TailBoundError
from frac_opcalc.models import (
    FractionalOrder,
    SeriesPolicy,
    SeriesResult,
    SubordinationSpec,
)
from frac_opcalc.services.specfun import tail_mass_bound, wright_density, wright_moment

__all__ = [
    "density_mass",
    "make_spec",
    "randomized_exponential",
    "tail_mass_bound",
    "time_substitution",
    "wright_moment",
]

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 30
# standard deviations either side of the mean that get refined panels
BULK_WIDTH = 8.0


@lru_cache(maxsize=32)
def _rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


def make_spec(
    alpha: float, nu: float, t: float, settings: Settings | None = None
) -> SubordinationSpec:
    """Quadrature setup whose tail mass and last-panel mass are below tolerance.

    U is the smallest power-of-two multiple of the initial bound that passes.
    """
    settings = settings or get_settings()
    order = FractionalOrder(nu=nu)
    order.require(0.0, 1.0, operation="subordination", upper_closed=False)
    tol = settings.subordination_tail_tol
    panels = settings.subordination_panels
    upper = settings.subordination_initial_upper
    for _ in range(MAX_DOUBLINGS):
        last_panel_start = upper * (1.0 - 1.0 / panels)
        tails = (tail_mass_bound(nu, upper), tail_mass_bound(nu, last_panel_start))
        if max(tails) < tol:
            break
        upper *= 2.0
    else:
        raise TailBoundError(f"no truncation bound found for nu = {nu}")
    logger.debug(f"subordination nu={nu}: U={upper}")
    return SubordinationSpec(
        alpha=alpha,
        nu=order,
        t=t,
        quad_upper=upper,
        quad_nodes=panels * settings.subordination_panel_nodes,
    )


def _panel_edges(nu: float, upper: float, panels: int) -> np.ndarray:
    """Uniform panels on [0, U], subdivided again on mean +- BULK_WIDTH sd.

    As nu -> 1 the density concentrates around 1 with variance close to
    1 - nu, and the uniform panels alone miss its peak.
    """
    mean = wright_moment(nu, 1.0)
    spread = math.sqrt(max(wright_moment(nu, 2.0) - mean**2, 0.0))
    lo = max(0.0, mean - BULK_WIDTH * spread)
    hi = min(upper, mean + BULK_WIDTH * spread)
    uniform = np.linspace(0.0, upper, panels + 1)
    if hi <= lo:
        return uniform
    return np.union1d(uniform, np.linspace(lo, hi, panels + 1))


def _composite(
    integrand: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    nodes: int,
) -> tuple[np.ndarray, float]:
    """Per-panel integrals with the n-point rule, and the gap to the n/2 rule."""
    x_full, w_full = _rule(nodes)
    x_half, w_half = _rule(max(nodes // 2, 1))
    full = np.zeros(edges.size - 1)
    half = np.zeros(edges.size - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:], strict=True)):
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        full[i] = rad * float(np.dot(w_full, integrand(mid + rad * x_full)))
        half[i] = rad * float(np.dot(w_half, integrand(mid + rad * x_half)))
    return full, float(abs(np.sum(full) - np.sum(half)))


def _integrate(
    order: FractionalOrder,
    upper: float,
    node_count: int,
    factor: Callable[[np.ndarray], np.ndarray],
    policy: SeriesPolicy | None,
) -> SeriesResult:
    settings = get_settings()
    policy = resolve_policy(policy)
    tol = settings.subordination_tail_tol
    tail = tail_mass_bound(order.nu, upper)
    if tail > tol:
        raise TailBoundError(
            f"P(Xi > {upper}) may be as large as {tail:.3g}, above {tol:.3g}"
        )
    nodes = settings.subordination_panel_nodes
    panels = max(1, node_count // nodes)
    density_error = [0.0]

    def integrand(xi: np.ndarray) -> np.ndarray:
        values = np.empty(xi.size)
        for j, point in enumerate(xi):
            result = wright_density(order, float(point), policy)
            values[j] = result.value
            density_error[0] = max(density_error[0], result.est_error)
        return values * factor(xi)

    edges = _panel_edges(order.nu, upper, panels)
    per_panel, rule_gap = _composite(integrand, edges, nodes)
    last_start = upper * (1.0 - 1.0 / panels)
    near_upper = float(np.sum(per_panel[edges[:-1] >= last_start * (1.0 - 1e-12)]))
    if abs(near_upper) > tol:
        raise TailBoundError(f"the last panel below U={upper} carries {near_upper:.3g}")
    value = float(math.fsum(per_panel))
    return SeriesResult(
        value=value,
        terms_used=(edges.size - 1) * nodes,
        converged=True,
        est_error=tail + rule_gap + upper * density_error[0],
    )


def randomized_exponential(
    spec: SubordinationSpec, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """Integral of exp(-alpha xi t**nu) f_Xi(xi) over [0, U].

    Equals E_nu(-alpha t**nu) up to the reported error.
    """
    rate = spec.alpha * spec.t**spec.nu.nu
    return _integrate(
        spec.nu, spec.quad_upper, spec.quad_nodes, lambda xi: np.exp(-rate * xi), policy
    )


def density_mass(
    nu: float, policy: SeriesPolicy | None = None, settings: Settings | None = None
) -> SeriesResult:
    """Integral of the Wright density over [0, U] for the default U."""
    spec = make_spec(1.0, nu, 1.0, settings)
    return _integrate(
        spec.nu, spec.quad_upper, spec.quad_nodes, lambda xi: np.ones(xi.size), policy
    )


def time_substitution(
    spec: SubordinationSpec, policy: SeriesPolicy | None = None
) -> float:
    """-log(E exp(-alpha Xi t**nu)) / alpha, the randomised clock."""
    expectation = randomized_exponential(spec, policy).value
    if expectation <= 0:
        raise DomainError(
            f"the randomised exponential must be positive, got {expectation}"
        )
    return -math.log(expectation) / spec.alpha
