import argparse

from commands.common import (
    add_grid_arguments,
    add_output_argument,
    add_physics_arguments,
    dimension_out,
    emit,
    grid_overrides,
    inputs_out,
)
from dependencies import get_config, get_settings, pick, resolve_inputs
from exceptions import UsageError
from models import effective_potential
from numerics import build_grid, eigen_lowest
from schemas import EigResponse


def register(subparsers) -> None:
    parser = subparsers.add_parser("eig", help="lowest eigenvalues of the finite-difference Hamiltonian")
    add_physics_arguments(parser)
    add_grid_arguments(parser)
    add_output_argument(parser)
    parser.add_argument("--k", type=int, help="number of eigenvalues (default 3)")
    parser.set_defaults(handler=cmd_eig)


def cmd_eig(args: argparse.Namespace) -> int:
    config = get_config(args)
    settings = get_settings(args, config)
    inputs = resolve_inputs(args, config)
    k = pick(args, config, "k", int, 3)
    if k < 1:
        raise UsageError("--k must be at least 1")
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    grid = build_grid(
        params, dim, phys,
        overrides=grid_overrides(args, config),
        points=settings.grid_points,
        n_scales=settings.length_scales,
    )
    result = eigen_lowest(effective_potential(params, dim, phys), grid, phys, k=k, richardson=settings.richardson)
    document = EigResponse(
        inputs=inputs_out(inputs, grid),
        dimension=dimension_out(dim),
        richardson=result.richardson,
        energies=result.energies,
    )
    emit(document, args.out, "eig_table.txt.j2")
    return 0
