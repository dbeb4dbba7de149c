"""Operational solutions f = E_nu(s**nu * Theta) g as truncated operator series.

Operator powers Theta**r g are computed once per solution by exact
coefficient actions; evaluation only weights them with
s**(nu r) / Gamma(nu r + 1) and sums.
"""

import logging
import math

from pydantic import BaseModel, ConfigDict
from scipy.special import gammaln

from frac_opcalc.config import get_settings, resolve_policy
from frac_opcalc.exceptions import DomainError, UnsupportedOperatorError
from frac_opcalc.models import (
    AnalyticFunction,
    FractionalOrder,
    OperatorDescriptor,
    OperatorKind,
    SeriesPolicy,
    SeriesResult,
    VariableRole,
)
from frac_opcalc.services.series import CompensatedSum, sum_terms

logger = logging.getLogger(__name__)


def _falling(e: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= e - i
    return out


def _strip(coeffs: list[float], offset: float, truncated: bool) -> AnalyticFunction:
    """Drop leading zero coefficients into the offset."""
    start = 0
    while start < len(coeffs) and coeffs[start] == 0.0:
        start += 1
    if start == len(coeffs) and not truncated:
        return AnalyticFunction(coeffs=(), offset=0.0)
    return AnalyticFunction(
        coeffs=tuple(coeffs[start:]), offset=offset + start, truncated=truncated
    )


def _differentiate(
    g: AnalyticFunction, order: int, factor: float
) -> AnalyticFunction:
    exponents = g.exponents()
    coeffs = [
        factor * c * _falling(float(e), order)
        for c, e in zip(g.coeffs, exponents, strict=True)
    ]
    return _strip(coeffs, g.offset - order, g.truncated)


def _shift(
    g: AnalyticFunction, scale: float, identity_weight: float
) -> AnalyticFunction:
    if g.offset != math.floor(g.offset) or g.offset < 0:
        raise UnsupportedOperatorError(
            "backward_shift acts on sequence generating functions "
            f"(non-negative integer offset), got offset {g.offset}"
        )
    # scale * (u * g + w * g) on the grid offset, offset + 1, ...
    coeffs = [0.0] * (len(g.coeffs) + 1)
    for k, c in enumerate(g.coeffs):
        coeffs[k] += scale * identity_weight * c
        coeffs[k + 1] += scale * c
    return _strip(coeffs, g.offset, g.truncated)


def apply_operator(op: OperatorDescriptor, g: AnalyticFunction) -> AnalyticFunction:
    """Exact action of Theta on g."""
    match op.kind:
        case OperatorKind.SECOND_DERIVATIVE:
            return _differentiate(g, 2, op.scale)
        case OperatorKind.NEGATED_FOURTH_DERIVATIVE:
            return _differentiate(g, 4, -op.scale)
        case OperatorKind.SCALAR:
            return _strip([op.scale * c for c in g.coeffs], g.offset, g.truncated)
        case OperatorKind.BACKWARD_SHIFT:
            return _shift(g, op.scale, op.identity_weight)
    raise UnsupportedOperatorError(f"no action for operator {op.kind}")


def evaluate_function(
    g: AnalyticFunction, x: float, policy: SeriesPolicy | None = None
) -> SeriesResult:
    """Partial sum of g at x; a truncated section converges when its tail is small."""
    policy = resolve_policy(policy)
    if g.is_zero or g.is_exhausted:
        return SeriesResult(
            value=0.0, terms_used=0, converged=g.is_zero, est_error=0.0
        )
    acc = CompensatedSum()
    last = 0.0
    for c, e in zip(g.coeffs, g.exponents(), strict=True):
        if c == 0.0:
            continue
        if x < 0 and e != math.floor(e):
            raise DomainError(f"x**{e} is not real for x = {x}")
        if x == 0 and e < 0:
            raise DomainError(f"x**{e} is singular at 0")
        last = c * x**e
        acc.add(last)
    value = acc.value
    converged = not g.truncated or (
        abs(last) <= policy.rel_tol * abs(value) + policy.abs_tol
    )
    return SeriesResult(
        value=value,
        terms_used=len(g.coeffs),
        converged=converged,
        est_error=abs(last) if g.truncated else 0.0,
    )


class OperationalSolution(BaseModel):
    """Theta**r g for r = 0..R together with the order and the fractional variable.

    ``exact`` is set when some power vanished identically, so the series is
    a finite sum.
    """

    model_config = ConfigDict(frozen=True)

    terms: tuple[AnalyticFunction, ...]
    order: FractionalOrder
    role: VariableRole
    operator: OperatorDescriptor
    exact: bool = False


def _powers(
    op: OperatorDescriptor, g: AnalyticFunction, limit: int
) -> tuple[tuple[AnalyticFunction, ...], bool]:
    terms = [g]
    while len(terms) < limit:
        nxt = apply_operator(op, terms[-1])
        if nxt.is_zero:
            return tuple(terms), True
        if nxt.is_exhausted:
            break
        terms.append(nxt)
    logger.debug(f"{op.kind.value}: {len(terms)} operator powers cached")
    return tuple(terms), False


def _build(
    order: FractionalOrder,
    op: OperatorDescriptor,
    g: AnalyticFunction,
    policy: SeriesPolicy | None,
    role: VariableRole,
    zero_derivative: bool,
) -> OperationalSolution:
    if order.nu > 1.0 and zero_derivative:
        order.require(0.0, 2.0, operation=f"solve ({role.value})")
    else:
        order.require(0.0, 1.0, operation=f"solve ({role.value})")
    policy = resolve_policy(policy)
    limit = min(get_settings().max_operator_power, policy.max_terms)
    if g.is_zero:
        return OperationalSolution(
            terms=(g,), order=order, role=role, operator=op, exact=True
        )
    terms, exact = _powers(op, g, limit)
    return OperationalSolution(
        terms=terms, order=order, role=role, operator=op, exact=exact
    )


def solve_ivp(
    order: FractionalOrder,
    op: OperatorDescriptor,
    g: AnalyticFunction,
    policy: SeriesPolicy | None = None,
    *,
    zero_initial_velocity: bool = False,
) -> OperationalSolution:
    """Solution of D_t^nu f = Theta_x f with f(x, 0) = g(x).

    Orders in (1, 2] are accepted when the caller asserts d/dt f(x, 0) = 0,
    which the series satisfies by construction.
    """
    return _build(order, op, g, policy, VariableRole.TIME, zero_initial_velocity)


def solve_bvp(
    order: FractionalOrder,
    op: OperatorDescriptor,
    g: AnalyticFunction,
    policy: SeriesPolicy | None = None,
    *,
    zero_boundary_slope: bool = False,
) -> OperationalSolution:
    """Solution of D_x^nu f = Theta_t f with f(0, t) = g(t)."""
    return _build(order, op, g, policy, VariableRole.SPACE, zero_boundary_slope)


def evaluate(
    sol: OperationalSolution,
    x: float,
    t: float,
    policy: SeriesPolicy | None = None,
) -> SeriesResult:
    """sum_r s**(nu r) / Gamma(nu r + 1) * (Theta**r g)(y) at the point (x, t).

    s is the fractional variable of the solution and y the other one.
    """
    policy = resolve_policy(policy)
    s, y = (t, x) if sol.role == VariableRole.TIME else (x, t)
    if s < 0:
        raise DomainError(f"the {sol.role.value} variable must be >= 0, got {s}")
    nu = sol.order.nu
    log_s = math.log(s) if s > 0 else -math.inf
    inner_converged = [True]

    def term(r: int) -> float:
        if s == 0.0 and r > 0:
            return 0.0
        weight = 1.0 if r == 0 else math.exp(nu * r * log_s - gammaln(nu * r + 1.0))
        inner = evaluate_function(sol.terms[r], y, policy)
        if not inner.converged:
            inner_converged[0] = False
        return weight * inner.value

    count = len(sol.terms)
    if sol.exact:
        result = sum_terms(term, policy, last=count - 1)
    else:
        capped = policy.model_copy(update={"max_terms": min(policy.max_terms, count)})
        result = sum_terms(term, capped, detect_divergence=True)
    if not inner_converged[0]:
        return result.model_copy(update={"converged": False, "exhausted": True})
    if not result.converged and not result.diverged and count < policy.max_terms:
        return result.model_copy(update={"exhausted": True})
    return result
