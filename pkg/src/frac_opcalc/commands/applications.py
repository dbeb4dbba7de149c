"""Sub-commands for the worked models, subordination and the generic solver."""

import argparse

from frac_opcalc.commands.common import (
    add_t_axis,
    add_x_axis,
    evaluate_grid,
    grid_spec,
    parse_axis,
)
from frac_opcalc.config import get_settings
from frac_opcalc.models import (
    AnalyticFunction,
    DeltaSequence,
    FppParams,
    FractionalOrder,
    GridField,
    HeatPolyParams,
    OperatorDescriptor,
    OperatorKind,
    SeriesResult,
)
from frac_opcalc.services.closed_forms import (
    fpp_pgf,
    fpp_pmf,
    heat_polynomial,
    space_fractional_bvp,
    vibrating_plate,
)
from frac_opcalc.services.opsolve import evaluate, solve_bvp, solve_ivp
from frac_opcalc.services.subordination import (
    make_spec,
    randomized_exponential,
    time_substitution,
)

INITIAL_DATA = ("monomial", "constant", "sine", "exp", "delta")
OPERATORS = (*(kind.value for kind in OperatorKind), "poisson")


def run_heatpoly(args: argparse.Namespace, workers: int) -> GridField:
    """Fractional heat polynomial with datum x**beta."""
    params = HeatPolyParams(beta=args.beta, nu=FractionalOrder(nu=args.nu))
    return evaluate_grid(
        grid_spec(args.x, args.t),
        lambda x, t: heat_polynomial(params, x, t),
        workers=workers,
        metadata={"command": "heatpoly", "nu": args.nu, "beta": args.beta},
    )


def run_plate(args: argparse.Namespace, workers: int) -> GridField:
    order = FractionalOrder(nu=args.nu)
    return evaluate_grid(
        grid_spec(args.x, args.t),
        lambda x, t: vibrating_plate(order, x, t),
        workers=workers,
        metadata={"command": "plate", "nu": args.nu},
    )


def run_spacebvp(args: argparse.Namespace, workers: int) -> GridField:
    order = FractionalOrder(nu=args.nu)
    return evaluate_grid(
        grid_spec(args.x, args.t),
        lambda x, t: space_fractional_bvp(order, x, t),
        workers=workers,
        metadata={"command": "spacebvp", "nu": args.nu},
    )


def run_fpp_pmf(args: argparse.Namespace, workers: int) -> GridField:
    """P(N(t) = k) for k = 0..kmax."""
    params = FppParams(rate=args.rate, nu=FractionalOrder(nu=args.nu))
    return evaluate_grid(
        grid_spec((0.0, float(args.kmax), args.kmax + 1), args.t),
        lambda k, t: fpp_pmf(params, round(k), t),
        workers=workers,
        metadata={"command": "fpp-pmf", "nu": args.nu, "rate": args.rate},
        axis_names=("k", "t"),
    )


def run_fpp_pgf(args: argparse.Namespace, workers: int) -> GridField:
    params = FppParams(rate=args.rate, nu=FractionalOrder(nu=args.nu))
    return evaluate_grid(
        grid_spec(args.x, args.t),
        lambda u, t: fpp_pgf(params, u, t),
        workers=workers,
        metadata={"command": "fpp-pgf", "nu": args.nu, "rate": args.rate},
        axis_names=("u", "t"),
    )


def run_subordination(args: argparse.Namespace, workers: int) -> GridField:
    """Quadrature of E exp(-alpha Xi t**nu), or the substituted time."""

    def point(alpha: float, t: float) -> SeriesResult:
        spec = make_spec(alpha, args.nu, t)
        if args.substitute:
            value = time_substitution(spec)
            return SeriesResult(
                value=value, terms_used=spec.quad_nodes, converged=True, est_error=0.0
            )
        return randomized_exponential(spec)

    return evaluate_grid(
        grid_spec(args.alpha, args.t),
        point,
        workers=workers,
        metadata={
            "command": "subordination",
            "nu": args.nu,
            "substitute": args.substitute,
        },
        axis_names=("alpha", "t"),
    )


def _initial_data(name: str, parameter: float) -> AnalyticFunction:
    terms = get_settings().taylor_terms
    match name:
        case "monomial":
            return AnalyticFunction.monomial(parameter)
        case "constant":
            return AnalyticFunction.constant(parameter)
        case "sine":
            return AnalyticFunction.sine(terms)
        case "exp":
            return AnalyticFunction.exponential(parameter, terms)
        case _:
            return AnalyticFunction.delta(DeltaSequence(offset=round(parameter)))


def _operator(name: str, scale: float) -> OperatorDescriptor:
    if name == "poisson":
        return OperatorDescriptor.poisson_generator(scale)
    return OperatorDescriptor(kind=OperatorKind(name), scale=scale)


def run_solve(args: argparse.Namespace, workers: int) -> GridField:
    """Operational series solution for a chosen operator and initial datum."""
    order = FractionalOrder(nu=args.nu)
    op = _operator(args.operator, args.scale)
    g = _initial_data(args.initial, args.beta)
    if args.problem == "ivp":
        sol = solve_ivp(order, op, g, zero_initial_velocity=args.zero_velocity)
    else:
        sol = solve_bvp(order, op, g, zero_boundary_slope=args.zero_velocity)
    return evaluate_grid(
        grid_spec(args.x, args.t),
        lambda x, t: evaluate(sol, x, t),
        workers=workers,
        metadata={
            "command": "solve",
            "problem": args.problem,
            "nu": args.nu,
            "operator": args.operator,
            "scale": args.scale,
            "initial": args.initial,
            "beta": args.beta,
        },
    )


def register(
    subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]",
    parents: list[argparse.ArgumentParser],
) -> None:
    """Add the model, subordination and solver sub-commands."""
    cmd = subparsers.add_parser(
        "heatpoly", parents=parents, help="Fractional heat polynomial"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order in (0, 1]")
    cmd.add_argument("--beta", type=float, required=True, help="Initial power")
    add_x_axis(cmd, default="1")
    add_t_axis(cmd)
    cmd.set_defaults(handler=run_heatpoly)

    cmd = subparsers.add_parser(
        "plate", parents=parents, help="Vibrating plate sin(x) E_nu(-t^nu)"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order in (0, 2]")
    add_x_axis(cmd)
    add_t_axis(cmd)
    cmd.set_defaults(handler=run_plate)

    cmd = subparsers.add_parser(
        "spacebvp", parents=parents, help="Space-fractional BVP exp(-t) E_nu(-x^nu)"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order in (0, 2]")
    add_x_axis(cmd)
    add_t_axis(cmd)
    cmd.set_defaults(handler=run_spacebvp)

    cmd = subparsers.add_parser(
        "fpp-pmf", parents=parents, help="Fractional Poisson state probabilities"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order in (0, 1]")
    cmd.add_argument("--rate", type=float, required=True, help="Rate lambda > 0")
    cmd.add_argument("--kmax", type=int, required=True, help="Largest count k")
    add_t_axis(cmd, default="1")
    cmd.set_defaults(handler=run_fpp_pmf)

    cmd = subparsers.add_parser(
        "fpp-pgf", parents=parents, help="Fractional Poisson generating function"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order in (0, 1]")
    cmd.add_argument("--rate", type=float, required=True, help="Rate lambda > 0")
    cmd.add_argument(
        "--u",
        "--x",
        "--grid",
        dest="x",
        type=parse_axis,
        default=parse_axis("0"),
        help="u value or range a:b:n with |u| <= 1",
    )
    add_t_axis(cmd, default="1")
    cmd.set_defaults(handler=run_fpp_pgf)

    cmd = subparsers.add_parser(
        "subordination", parents=parents, help="Wright-randomised exponential"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order in (0, 1)")
    cmd.add_argument(
        "--alpha",
        type=parse_axis,
        default=parse_axis("1"),
        help="alpha value or range a:b:n",
    )
    cmd.add_argument(
        "--substitute",
        action="store_true",
        help="Report -log(E exp(-alpha Xi t^nu)) / alpha instead",
    )
    add_t_axis(cmd, default="1")
    cmd.set_defaults(handler=run_subordination)

    cmd = subparsers.add_parser(
        "solve", parents=parents, help="Operational series solution"
    )
    cmd.add_argument("--problem", choices=["ivp", "bvp"], default="ivp")
    cmd.add_argument("--nu", type=float, required=True, help="Order")
    cmd.add_argument("--operator", choices=OPERATORS, required=True)
    cmd.add_argument("--scale", type=float, default=1.0, help="Operator scale")
    cmd.add_argument("--initial", choices=INITIAL_DATA, default="monomial")
    cmd.add_argument(
        "--beta",
        type=float,
        default=1.0,
        help="Monomial power, constant value, exp rate or delta offset",
    )
    cmd.add_argument(
        "--zero-velocity",
        action="store_true",
        help="Assert a zero first derivative, allowing orders in (1, 2]",
    )
    add_x_axis(cmd)
    add_t_axis(cmd)
    cmd.set_defaults(handler=run_solve)
