"""Cross-check the closed forms against each other and against the two oracles.

Assert checks decide the exit status. Info checks record facts that are known
to hold only approximately, or not at all, such as ladder states of the
fixed-(b, c) hierarchy which are eigenstates of a different Hamiltonian.
"""
import argparse
import logging
import math
from typing import Any, Optional

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
from config import Settings
from dependencies import Inputs, get_config, get_settings, pick, resolve_inputs
from exact import (
    GroundSolution,
    View,
    constraint_a,
    dual_view_check,
    ground_state,
    hierarchy_states,
    hierarchy_superpotential,
    level_energy,
    oscillator_view_ground,
    perturbing_potential,
    spectrum,
    unperturbed_potential,
)
from exceptions import VerificationFailed
from models import PotentialParams, effective_potential
from numerics import GridOverrides, RadialGrid, build_grid, eigen_lowest, evaluate_state, h_residual, normalize, overlap
from qes_oracle import qes_solve
from schemas import CheckOut, SpectrumLevelOut, VerificationReport, ViewsOut
from susy import perturbation_residual, riccati_residual, shape_invariance_compare

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="run every consistency check and report")
    add_physics_arguments(parser)
    add_grid_arguments(parser)
    add_output_argument(parser)
    parser.add_argument("--derive", choices=("a", "b", "c"), help="fill this parameter from the constraint")
    parser.add_argument("--nmax", type=int, help="highest spectrum level to check (default 2)")
    parser.set_defaults(handler=cmd_verify)


# ---------- Check records ----------
def assert_check(name: str, value: float, tol: float) -> CheckOut:
    passed = math.isfinite(value) and value <= tol
    if not passed:
        logger.warning("check %s failed: %r > %r", name, value, tol)
    return CheckOut(name=name, kind="assert", value=value, tol=tol, pass_=passed)


def info_check(name: str, value: Any) -> CheckOut:
    return CheckOut(name=name, kind="info", value=value)


class _Grids:
    """One grid per potential, sized for the highest energy asked of it."""

    def __init__(self, inputs: Inputs, settings: Settings, overrides: GridOverrides):
        self.inputs = inputs
        self.settings = settings
        self.overrides = overrides

    def for_params(self, params: PotentialParams, energy: Optional[float], level: int = 0) -> RadialGrid:
        return build_grid(
            params,
            self.inputs.dim,
            self.inputs.phys,
            overrides=self.overrides,
            energy_guess=energy,
            points=self.settings.grid_points,
            n_scales=self.settings.length_scales,
            level=level,
        )


# ---------- Check groups ----------
def _riccati_checks(solution: GroundSolution, inputs: Inputs, settings: Settings, label: str) -> list[CheckOut]:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    view = solution.view
    scale = max(1.0, abs(solution.energy.E))
    tol = settings.tol_riccati * scale
    V = effective_potential(params, dim, phys)
    V_es = unperturbed_potential(params, dim, phys, view)
    delta_V = perturbing_potential(params, view)
    return [
        assert_check(
            f"riccati_{label}",
            riccati_residual(solution.superpotential, V, solution.energy.E, phys).max_abs(),
            tol,
        ),
        assert_check(
            f"riccati_{label}_unperturbed",
            riccati_residual(solution.W, V_es, solution.energy.epsilon, phys).max_abs(),
            tol,
        ),
        assert_check(
            f"perturbation_{label}",
            perturbation_residual(solution.W, solution.delta_W, delta_V, solution.energy.delta_epsilon, phys).max_abs(),
            tol,
        ),
    ]


def _closed_form_parameter_check(solution: GroundSolution, inputs: Inputs, settings: Settings) -> CheckOut:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    psi = solution.psi
    kappa = math.sqrt(2.0 * phys.mass * params.c) / (2.0 * phys.hbar)
    lam = phys.mass * params.a / ((dim.Lambda + 1.0) * phys.hbar ** 2)
    gap = max(abs(psi.q - (dim.Lambda + 1.0)), abs(psi.kappa - kappa), abs(psi.lam - lam))
    return assert_check("psi_parameters", gap, settings.tol_dual * max(1.0, lam, kappa))


def _numeric_ground_checks(
    solution: GroundSolution, inputs: Inputs, settings: Settings, grids: _Grids
) -> list[CheckOut]:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    V = effective_potential(params, dim, phys)
    E = solution.energy.E
    grid = grids.for_params(params, E)
    numeric = eigen_lowest(V, grid, phys, k=1, richardson=settings.richardson).energies[0]
    residual = h_residual(solution.psi, E, V, phys, grid=grid, skip=settings.boundary_skip)
    checks = [assert_check("eigensolver_ground", abs(numeric - E), settings.tol_eigen * max(1.0, abs(E)))]
    # a half-integer power r^q puts an h-independent truncation error on the first
    # nodes, so the pointwise residual stalls while the eigenvalue still converges
    if float(dim.Lambda).is_integer():
        checks.append(assert_check("ground_h_residual", residual, settings.tol_residual))
    else:
        checks.append(info_check("ground_h_residual", residual))
    return checks


def _spectrum_checks(
    inputs: Inputs, settings: Settings, grids: _Grids, n_max: int
) -> tuple[list[CheckOut], list[SpectrumLevelOut]]:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    b, c = params.b, params.c
    levels = spectrum(b, c, dim, phys, n_max)
    spacing = 2.0 * phys.susy_scale * math.sqrt(c)
    gaps = [abs(levels[n + 1].E_n - levels[n].E_n - spacing) for n in range(n_max)]
    top = max(abs(level.E_n) for level in levels)
    checks = [assert_check("spectrum_spacing", max(gaps, default=0.0), 1e-14 * max(1.0, top))]

    # the listed levels belong to different Coulomb strengths a_n; only a_0 is the input potential
    grid = grids.for_params(params, levels[-1].E_n)
    numeric = eigen_lowest(effective_potential(params, dim, phys), grid, phys, k=n_max + 1,
                           richardson=settings.richardson).energies
    checks.append(info_check("spectrum_vs_numeric", {
        "closed_form": [level.E_n for level in levels],
        "numeric": numeric,
    }))
    return checks, [SpectrumLevelOut(n=level.n, a_n=level.a_n, E_n=level.E_n) for level in levels]


def _oracle_checks(solution: GroundSolution, inputs: Inputs, settings: Settings, grids: _Grids) -> list[CheckOut]:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    b, c = params.b, params.c
    checks = []

    ground = qes_solve(b, c, dim, phys, 0, n_cap=settings.oracle_n_cap)[0]
    a0 = constraint_a(b, c, dim, phys, 0)
    checks.append(assert_check(
        "oracle_n0_root",
        abs(ground.A_root - a0) / max(abs(a0), 1e-300) if a0 else abs(ground.A_root),
        settings.tol_oracle_root,
    ))
    E = solution.energy.E
    checks.append(assert_check("oracle_n0_energy", abs(ground.E - E), settings.tol_dual * max(1.0, abs(E))))

    first = qes_solve(b, c, dim, phys, 1, n_cap=settings.oracle_n_cap)
    a1 = constraint_a(b, c, dim, phys, 1)
    roots = [s.A_root for s in first]
    checks.append(info_check("oracle_n1_roots", {
        "roots": roots,
        "linear_a1": a1,
        "straddles": roots[0] < a1 < roots[-1],
        "node_counts": [s.node_count for s in first],
        "E": first[0].E,
    }))

    residuals = []
    for s in first:
        oracle_params = PotentialParams(a=s.A_root, b=b, c=c)
        grid = grids.for_params(oracle_params, s.E, level=1)
        residuals.append(h_residual(s.state, s.E, effective_potential(oracle_params, dim, phys), phys,
                                    grid=grid, skip=settings.boundary_skip))
    checks.append(info_check("oracle_n1_residuals", residuals))

    # closed-form states at different Coulomb strengths are not orthogonal
    nodeless = [s for s in first if s.node_count == 0]
    if nodeless and params.a > 0:
        grid = grids.for_params(params, first[0].E)
        psi0 = evaluate_state(solution.psi, grid)
        psi1 = evaluate_state(nodeless[0].state, grid)
        pair = evaluate_state(first[-1].state, grid) if len(first) > 1 else psi1
        checks.append(info_check("non_orthogonality", {
            "ground_vs_n1_nodeless": overlap(psi0, psi1),
            "n1_pair": overlap(psi1, pair),
        }))
    return checks


def _hierarchy_checks(inputs: Inputs, settings: Settings, grids: _Grids) -> list[CheckOut]:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    b, c = params.b, params.c
    S0 = hierarchy_superpotential(b, c, dim, phys, 0)
    S1 = hierarchy_superpotential(b, c, dim, phys, 1)
    comparison = shape_invariance_compare(S0, S1, phys)
    a0 = constraint_a(b, c, dim, phys, 0)
    a1 = constraint_a(b, c, dim, phys, 1)
    checks = [info_check("shape_invariance", {
        "R": comparison.R,
        "spacing": 2.0 * phys.susy_scale * math.sqrt(c),
        "mismatch": {str(p): v for p, v in comparison.mismatch.coefficients.items()},
        "a1_minus_a0": a1 - a0,
    })]

    # the ladder state solves -a1/r + br + cr² exactly, not the input potential
    E1 = level_energy(b, c, dim, phys, 1)
    state = hierarchy_states(b, c, dim, phys, 1)
    shifted = PotentialParams(a=a1, b=b, c=c)
    grid = grids.for_params(shifted, E1, level=1)
    residual_a1 = h_residual(state, E1, effective_potential(shifted, dim, phys), phys,
                             grid=grid, skip=settings.boundary_skip)
    residual_a0 = h_residual(state, E1, effective_potential(params, dim, phys), phys,
                             grid=grid, skip=settings.boundary_skip)
    checks.append(info_check("ladder_n1_residual", {"a1": residual_a1, "a0": residual_a0}))

    ladder, _ = normalize(evaluate_state(state, grid))
    numeric = eigen_lowest(effective_potential(shifted, dim, phys), grid, phys, k=2, vectors=True)
    checks.append(info_check("ladder_n1_overlap", {
        "numeric_energies": numeric.energies,
        "overlaps": [overlap(ladder, vector) for vector in numeric.vectors],
    }))
    return checks


# ---------- Report ----------
def build_report(inputs: Inputs, settings: Settings, overrides: GridOverrides, n_max: int = 2) -> VerificationReport:
    params, dim, phys = inputs.params, inputs.dim, inputs.phys
    grids = _Grids(inputs, settings, overrides)
    solution = ground_state(params, dim, phys, settings.tol_constraint)
    views = ViewsOut()
    checks: list[CheckOut] = []

    if solution.view is View.COULOMB:
        views.coulomb = energy_out(solution.energy)
        checks += _riccati_checks(solution, inputs, settings, "coulomb")
    if params.c > 0:
        oscillator = oscillator_view_ground(params, dim, phys, settings.tol_constraint)
        views.oscillator = energy_out(oscillator.energy)
        checks += _riccati_checks(oscillator, inputs, settings, "oscillator")
    if params.a > 0 and params.c > 0:
        dual = dual_view_check(params, dim, phys, settings.tol_constraint)
        scale = max(1.0, abs(solution.energy.E))
        checks.append(assert_check("dual_view_energy", dual.energy_difference, settings.tol_dual * scale))
        checks.append(assert_check("dual_view_psi", dual.parameter_difference, settings.tol_dual))
        checks.append(_closed_form_parameter_check(solution, inputs, settings))

    checks += _numeric_ground_checks(solution, inputs, settings, grids)

    levels: list[SpectrumLevelOut] = []
    if params.c > 0:
        spectrum_checks, levels = _spectrum_checks(inputs, settings, grids, n_max)
        checks += spectrum_checks
        checks += _oracle_checks(solution, inputs, settings, grids)
        checks += _hierarchy_checks(inputs, settings, grids)

    grid = grids.for_params(params, solution.energy.E)
    _, n0 = normalize(evaluate_state(solution.psi, grid))
    report = VerificationReport(
        inputs=inputs_out(inputs, grid),
        dimension=dimension_out(dim),
        views=views,
        psi=psi_out(solution.psi, n0),
        spectrum=levels,
        checks=checks,
    )
    logger.info("verify: %d checks, %d failed", len(checks), len(report.failed))
    return report


def cmd_verify(args: argparse.Namespace) -> int:
    config = get_config(args)
    settings = get_settings(args, config)
    inputs = resolve_inputs(args, config)
    report = build_report(inputs, settings, grid_overrides(args, config), pick(args, config, "nmax", int, 2))
    emit(report, args.out, "verify_table.txt.j2", failed=report.failed)
    if report.failed:
        raise VerificationFailed(
            f"{len(report.failed)} assert check(s) failed",
            data={"failed": report.failed},
        )
    return 0
