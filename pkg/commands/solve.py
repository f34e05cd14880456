import argparse
import logging

from commands.common import (
    add_grid_arguments,
    add_output_argument,
    add_physics_arguments,
    dimension_out,
    emit,
    energy_out,
    grid_overrides,
    inputs_out,
    psi_out,
)
from dependencies import get_config, get_settings, pick, resolve_inputs
from exact import View, constraint_distance, coulomb_spectrum, ground_state, oscillator_view_ground, spectrum
from models import Regime, classify_regime, effective_potential
from numerics import build_grid, evaluate_state, normalize
from schemas import ConstraintOut, SolveResponse, SpectrumLevelOut, ViewsOut

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="closed-form ground state, energies and spectrum")
    add_physics_arguments(parser)
    add_grid_arguments(parser)
    add_output_argument(parser)
    parser.add_argument("--derive", choices=("a", "b", "c"), help="fill this parameter from the constraint")
    parser.add_argument("--nmax", type=int, help="highest spectrum level to list (default 2)")
    parser.add_argument(
        "--regime",
        choices=[regime.value for regime in Regime],
        help="override the advisory regime tag (default: whichever term dominates)",
    )
    parser.set_defaults(handler=cmd_solve)


def cmd_solve(args: argparse.Namespace) -> int:
    config = get_config(args)
    settings = get_settings(args, config)
    inputs = resolve_inputs(args, config)
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    n_max = pick(args, config, "nmax", int, 2)

    solution = ground_state(params, dim, phys, settings.tol_constraint)
    views = ViewsOut()
    if solution.view is View.COULOMB:
        views.coulomb = energy_out(solution.energy)
    if params.c > 0:
        views.oscillator = energy_out(oscillator_view_ground(params, dim, phys, settings.tol_constraint).energy)

    grid = build_grid(
        params, dim, phys,
        overrides=grid_overrides(args, config),
        energy_guess=solution.energy.E,
        points=settings.grid_points,
        n_scales=settings.length_scales,
    )
    _, n0 = normalize(evaluate_state(solution.psi, grid))
    logger.debug("N0=%r on %d nodes (V_eff=%r)", n0, grid.count, effective_potential(params, dim, phys).coefficients)

    if params.c > 0:
        levels = spectrum(params.b, params.c, dim, phys, n_max)
    else:
        levels = coulomb_spectrum(params.a, dim, phys, n_max)

    distance = constraint_distance(params, dim, phys)
    document = SolveResponse(
        inputs=inputs_out(inputs, grid),
        dimension=dimension_out(dim),
        regime=classify_regime(params, prefer=args.regime).value,
        constraint=ConstraintOut(**distance.model_dump()),
        views=views,
        psi=psi_out(solution.psi, n0),
        spectrum=[SpectrumLevelOut(n=level.n, a_n=level.a_n, E_n=level.E_n) for level in levels],
    )
    emit(document, args.out, "solve_table.txt.j2")
    return 0
