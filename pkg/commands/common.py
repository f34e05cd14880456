import argparse
import sys
from typing import Optional

from pydantic import BaseModel

from dependencies import Inputs, pick
from exact import EnergyBreakdown
from models import DimensionSpec
from numerics import GridOverrides, RadialGrid
from schemas import DimensionOut, EnergyOut, GridOut, InputsOut, ParamsOut, PhysOut, PsiOut
from susy import ClosedFormState
from utils.formatting import dump_json
from utils.tables import render_table


# -------- Arguments --------
def add_physics_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("physics")
    group.add_argument("--a", type=float, help="Coulomb strength a (energy*length)")
    group.add_argument("--b", type=float, help="linear strength b >= 0")
    group.add_argument("--c", type=float, help="quadratic strength c >= 0")
    group.add_argument("--N", type=int, help="spatial dimension (default 3)")
    group.add_argument("--l", type=int, help="angular momentum (default 0)")
    group.add_argument("--hbar", type=float, help="reduced Planck constant (default 1)")
    group.add_argument("--mass", type=float, help="mass (default 1)")
    parser.add_argument("--config", help="key = value config file; flags override it")
    # SUPPRESS keeps the top-level --verbose value when the flag is not repeated here
    parser.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS, help="debug logging on stderr")


def add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("grid")
    group.add_argument("--rmax", type=float, help="outer radius of the grid")
    group.add_argument("--h", type=float, help="grid step")
    group.add_argument("--richardson", action="store_true", help="extrapolate eigenvalues over (h, h/2)")


def add_output_argument(parser: argparse.ArgumentParser, choices=("json", "table"), default="json") -> None:
    parser.add_argument("--out", choices=choices, default=default, help=f"output format (default {default})")


def grid_overrides(args: argparse.Namespace, config: dict[str, str]) -> GridOverrides:
    return GridOverrides(r_max=pick(args, config, "rmax", float), h=pick(args, config, "h", float))


# -------- Serialization helpers --------
def grid_out(grid: RadialGrid) -> GridOut:
    return GridOut(r_max=grid.r_max, h=grid.h, count=grid.count, centered=grid.centered)


def inputs_out(inputs: Inputs, grid: Optional[RadialGrid] = None) -> InputsOut:
    return InputsOut(
        params=ParamsOut(a=inputs.params.a, b=inputs.params.b, c=inputs.params.c),
        phys=PhysOut(hbar=inputs.phys.hbar, mass=inputs.phys.mass),
        grid=grid_out(grid) if grid else None,
        derived=inputs.derived,
    )


def dimension_out(dim: DimensionSpec) -> DimensionOut:
    return DimensionOut(N=dim.N, l=dim.l, M=dim.M, Lambda=dim.Lambda)


def energy_out(energy: EnergyBreakdown) -> EnergyOut:
    return EnergyOut(epsilon=energy.epsilon, delta_epsilon=energy.delta_epsilon, E=energy.E)


def psi_out(state: ClosedFormState, n0: Optional[float] = None) -> PsiOut:
    return PsiOut(q=state.q, lambda_=state.lam, kappa=state.kappa, N0=n0, poly=list(state.poly))


# -------- Emission --------
def emit(document: BaseModel, out: str, template: Optional[str] = None, **context) -> None:
    if out == "table" and template:
        text = render_table(template, doc=document.model_dump(mode="json", by_alias=True), **context)
    else:
        text = dump_json(document)
    sys.stdout.write(text)
