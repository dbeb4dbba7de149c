"""Sub-commands for the special functions and the Caputo derivative."""

import argparse

import numpy as np

from frac_opcalc.commands.common import add_t_axis, add_x_axis, evaluate_grid, grid_spec
from frac_opcalc.models import (
    FractionalOrder,
    GridField,
    MittagLefflerParams,
    PowerTerm,
    SampledFunction,
    SeriesResult,
    WrightParams,
)
from frac_opcalc.services.fracops import caputo_l1, caputo_power
from frac_opcalc.services.specfun import mittag_leffler, tricomi_c0, wright

NO_TIME = (0.0, 0.0, 1)


def run_ml(args: argparse.Namespace, workers: int) -> GridField:
    """E_{gamma, zeta}(x)."""
    params = MittagLefflerParams(gamma=args.gamma, zeta=args.zeta)
    return evaluate_grid(
        grid_spec(args.x, NO_TIME),
        lambda x, _t: mittag_leffler(params, x),
        workers=workers,
        metadata={"command": "ml", "gamma": args.gamma, "zeta": args.zeta},
    )


def run_wright(args: argparse.Namespace, workers: int) -> GridField:
    """phi(gamma, zeta; x)."""
    params = WrightParams(gamma=args.gamma, zeta=args.zeta)
    return evaluate_grid(
        grid_spec(args.x, NO_TIME),
        lambda x, _t: wright(params, x),
        workers=workers,
        metadata={"command": "wright", "gamma": args.gamma, "zeta": args.zeta},
    )


def run_tricomi(args: argparse.Namespace, workers: int) -> GridField:
    """C_0(x)."""
    return evaluate_grid(
        grid_spec(args.x, NO_TIME),
        lambda x, _t: tricomi_c0(x),
        workers=workers,
        metadata={"command": "tricomi"},
    )


def run_caputo(args: argparse.Namespace, workers: int) -> GridField:
    """Caputo derivative of coeff * t**exponent, exact or by the L1 scheme."""
    order = FractionalOrder(nu=args.nu)
    power = PowerTerm(coeff=args.coeff, exponent=args.exponent)

    def point(_x: float, t: float) -> SeriesResult:
        if args.method == "exact":
            value = caputo_power(order, power)(t)
            return SeriesResult(
                value=value, terms_used=1, converged=True, est_error=0.0
            )
        f = SampledFunction.from_callable(
            lambda s: power.coeff * np.asarray(s) ** power.exponent, t, args.steps
        )
        value = caputo_l1(order, f, args.steps)
        return SeriesResult(
            value=value, terms_used=args.steps, converged=True, est_error=0.0
        )

    return evaluate_grid(
        grid_spec(NO_TIME, args.t),
        point,
        workers=workers,
        metadata={
            "command": "caputo",
            "nu": args.nu,
            "coeff": args.coeff,
            "exponent": args.exponent,
            "method": args.method,
        },
    )


def register(
    subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]",
    parents: list[argparse.ArgumentParser],
) -> None:
    """Add the special-function sub-commands."""
    cmd = subparsers.add_parser("ml", parents=parents, help="Mittag-Leffler E_{g,z}(x)")
    cmd.add_argument("--gamma", type=float, required=True, help="First parameter")
    cmd.add_argument("--zeta", type=float, default=1.0, help="Second parameter")
    add_x_axis(cmd)
    cmd.set_defaults(handler=run_ml)

    cmd = subparsers.add_parser("wright", parents=parents, help="Wright phi(g,z;x)")
    cmd.add_argument("--gamma", type=float, required=True, help="First parameter")
    cmd.add_argument("--zeta", type=float, default=1.0, help="Second parameter")
    add_x_axis(cmd)
    cmd.set_defaults(handler=run_wright)

    cmd = subparsers.add_parser("tricomi", parents=parents, help="Tricomi C_0(x)")
    add_x_axis(cmd)
    cmd.set_defaults(handler=run_tricomi)

    cmd = subparsers.add_parser(
        "caputo", parents=parents, help="Caputo derivative of coeff*t^exponent"
    )
    cmd.add_argument("--nu", type=float, required=True, help="Order")
    cmd.add_argument("--exponent", type=float, required=True, help="Power of t")
    cmd.add_argument("--coeff", type=float, default=1.0, help="Coefficient")
    cmd.add_argument("--method", choices=["exact", "l1"], default="exact")
    cmd.add_argument("--steps", type=int, default=1000, help="L1 mesh steps on [0, t]")
    add_t_axis(cmd, default="1")
    cmd.set_defaults(handler=run_caputo)
