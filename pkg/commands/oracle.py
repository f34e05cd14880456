import argparse
import logging

from commands.common import (
    add_grid_arguments,
    add_output_argument,
    add_physics_arguments,
    dimension_out,
    emit,
    grid_out,
    grid_overrides,
    inputs_out,
)
from dependencies import get_config, get_settings, pick, resolve_inputs
from exceptions import UsageError
from models import PotentialParams, effective_potential
from numerics import build_grid, h_residual
from qes_oracle import qes_constraint_polynomial, qes_solve
from schemas import OracleResponse, OracleSolutionOut

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("oracle", help="exact level-n states from the polynomial ansatz")
    add_physics_arguments(parser)
    add_grid_arguments(parser)
    add_output_argument(parser)
    parser.add_argument("--n", type=int, help="level index (polynomial degree)")
    parser.add_argument("--check", action="store_true", help="also report the grid H-residual of every state")
    parser.set_defaults(handler=cmd_oracle)


def cmd_oracle(args: argparse.Namespace) -> int:
    config = get_config(args)
    settings = get_settings(args, config)
    inputs = resolve_inputs(args, config)
    n = pick(args, config, "n", int)
    if n is None:
        raise UsageError("oracle needs --n")
    if n < 0 or n > settings.oracle_n_cap:
        raise UsageError(f"--n must lie in [0, {settings.oracle_n_cap}]")
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    if params.c <= 0:
        raise UsageError("oracle needs c > 0")
    if params.a:
        logger.info("oracle ignores a=%r; the Coulomb strength is solved for", params.a)

    solutions = qes_solve(params.b, params.c, dim, phys, n, n_cap=settings.oracle_n_cap)
    overrides = grid_overrides(args, config)
    rows = []
    for solution in solutions:
        residual, grid = None, None
        if args.check:
            potential = PotentialParams(a=solution.A_root, b=params.b, c=params.c)
            grid = build_grid(
                potential, dim, phys,
                overrides=overrides,
                energy_guess=solution.E,
                points=settings.grid_points,
                n_scales=settings.length_scales,
                level=n,
            )
            residual = h_residual(
                solution.state, solution.E, effective_potential(potential, dim, phys), phys,
                grid=grid, skip=settings.boundary_skip,
            )
        rows.append(OracleSolutionOut(
            n=n,
            A_root=solution.A_root,
            poly=list(solution.poly),
            E=solution.E,
            node_count=solution.node_count,
            residual=residual,
            grid=grid_out(grid) if grid else None,
        ))

    document = OracleResponse(
        inputs=inputs_out(inputs),
        dimension=dimension_out(dim),
        n=n,
        constraint_polynomial=[float(v) for v in qes_constraint_polynomial(params.b, params.c, dim, phys, n).coef],
        solutions=rows,
    )
    emit(document, args.out, "oracle_table.txt.j2")
    return 0
