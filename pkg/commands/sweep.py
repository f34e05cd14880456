"""Cartesian parameter sweeps, one CSV row per grid point.

Rows follow itertools.product over the ranges in the order given; with --jobs
the rows are computed in worker processes and collected back in that order.
"""
import argparse
import itertools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from commands.common import add_grid_arguments, add_physics_arguments, grid_overrides
from config import Settings
from dependencies import get_config, get_settings, pick
from exact import (
    ConstraintDomainError,
    ConstraintViolation,
    NoBoundStateError,
    constraint_distance,
    derive_parameter,
    ground_state,
    level_energy,
)
from exceptions import UsageError
from models import PhysicalParams, PotentialParams, dimension_reduce, effective_potential
from numerics import GridOverrides, build_grid, eigen_lowest
from schemas import SWEEP_HEADER, SweepRow
from utils.formatting import dump_json, write_csv

logger = logging.getLogger(__name__)

SWEEP_NAMES = ("a", "b", "c", "N", "l")
INTEGER_NAMES = ("N", "l")


class SweepTask(BaseModel):
    """Everything one worker needs for one row."""

    model_config = ConfigDict(frozen=True)

    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    N: int
    l: int
    n: int = 0
    derive: Optional[str] = None
    phys: PhysicalParams
    overrides: GridOverrides
    settings: Settings


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="closed form vs eigensolver over a parameter grid")
    add_physics_arguments(parser)
    add_grid_arguments(parser)
    parser.add_argument("--out", choices=("csv", "json"), default="csv", help="output format (default csv)")
    parser.add_argument(
        "--range",
        action="append",
        default=[],
        metavar="NAME=SPEC",
        help="swept parameter; SPEC is v1,v2,... or start:stop:count (inclusive)",
    )
    parser.add_argument("--derive", choices=("a", "b", "c"), help="fill this parameter from the constraint per row")
    parser.add_argument("--n", type=int, help="level index compared per row (default 0)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    parser.set_defaults(handler=cmd_sweep)


# ---------- Ranges ----------
def parse_range(text: str) -> tuple[str, list[float]]:
    name, sep, spec = text.partition("=")
    name = name.strip()
    if not sep or name not in SWEEP_NAMES:
        raise UsageError(f"malformed range {text!r}; expected NAME=SPEC with NAME in {', '.join(SWEEP_NAMES)}")
    spec = spec.strip()
    if not spec:
        return name, []
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            values = [float(v) for v in np.linspace(float(start), float(stop), int(count))]
        else:
            values = [float(v) for v in spec.split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed range {text!r}: {exc}") from exc
    if name in INTEGER_NAMES:
        if not all(v.is_integer() for v in values):
            raise UsageError(f"range for {name} must hold integers")
        values = [int(v) for v in values]
    return name, values


def build_tasks(args: argparse.Namespace, config: dict[str, str]) -> list[SweepTask]:
    ranges = dict(parse_range(text) for text in args.range)
    derive = pick(args, config, "derive", str)
    if derive and derive in ranges:
        raise UsageError(f"--derive {derive} conflicts with a range over {derive}")
    base = {
        "a": pick(args, config, "a", float),
        "b": pick(args, config, "b", float),
        "c": pick(args, config, "c", float),
        "N": pick(args, config, "N", int, 3),
        "l": pick(args, config, "l", int, 0),
    }
    if derive and base[derive] is not None:
        raise UsageError(f"--derive {derive} conflicts with an explicit value for {derive}")
    common = {
        "n": pick(args, config, "n", int, 0),
        "derive": derive,
        "phys": PhysicalParams(
            hbar=pick(args, config, "hbar", float, 1.0),
            mass=pick(args, config, "mass", float, 1.0),
        ),
        "overrides": grid_overrides(args, config),
        "settings": get_settings(args, config),
    }
    names = list(ranges)
    tasks = []
    for combo in itertools.product(*(ranges[name] for name in names)):
        values = {**base, **dict(zip(names, combo))}
        tasks.append(SweepTask(**values, **common))
    return tasks


# ---------- Rows ----------
def _closed_form_energy(params: PotentialParams, task: SweepTask) -> Optional[float]:
    dim = dimension_reduce(task.N, task.l)
    tol = task.settings.tol_constraint
    try:
        if task.n == 0:
            return ground_state(params, dim, task.phys, tol).energy.E
        if params.c > 0:
            ground_state(params, dim, task.phys, tol)
            return level_energy(params.b, params.c, dim, task.phys, task.n)
    except (ConstraintViolation, ConstraintDomainError, NoBoundStateError):
        return None
    return None


def sweep_row(task: SweepTask) -> SweepRow:
    dim = dimension_reduce(task.N, task.l)
    try:
        if task.derive:
            params = derive_parameter(task.a, task.b, task.c, dim, task.phys, task.derive)
        else:
            params = PotentialParams(a=task.a or 0.0, b=task.b or 0.0, c=task.c or 0.0)
    except ValueError as exc:
        raise UsageError(f"row a={task.a} b={task.b} c={task.c}: {exc}") from exc

    settings = task.settings
    closed = _closed_form_energy(params, task)
    grid = build_grid(
        params, dim, task.phys,
        overrides=task.overrides,
        energy_guess=closed,
        points=settings.grid_points,
        n_scales=settings.length_scales,
        level=task.n,
    )
    numeric = eigen_lowest(
        effective_potential(params, dim, task.phys), grid, task.phys,
        k=task.n + 1, richardson=settings.richardson,
    ).energies[task.n]
    return SweepRow(
        a=params.a,
        b=params.b,
        c=params.c,
        N=task.N,
        l=task.l,
        n=task.n,
        E_closed=closed,
        E_numeric=numeric,
        abs_err=abs(numeric - closed) if closed is not None else None,
        constraint_residual=constraint_distance(params, dim, task.phys).violation,
    )


def run_sweep(tasks: list[SweepTask], jobs: int = 1) -> list[SweepRow]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(sweep_row, tasks))
    return [sweep_row(task) for task in tasks]


def cmd_sweep(args: argparse.Namespace) -> int:
    config = get_config(args)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    tasks = build_tasks(args, config)
    logger.info("sweep over %d rows with %d job(s)", len(tasks), args.jobs)
    rows = run_sweep(tasks, args.jobs)
    if args.out == "json":
        sys.stdout.write(dump_json(rows))
    else:
        write_csv(sys.stdout, SWEEP_HEADER, (row.as_row() for row in rows))
    return 0
