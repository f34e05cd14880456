"""Closed-form solutions of the perturbed Coulomb problem on its constraint surface.

Two views of the same ground state are built: the Coulomb view treats br + cr²
as the perturbation, the oscillator view treats -a/r + br. Both must agree
whenever b = 2a√(2mc)/((M-1)ħ).
"""
import logging
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, computed_field

from models import DimensionSpec, LaurentForm, PhysicalParams, PotentialParams
from susy import (
    ClosedFormState,
    Superpotential,
    ladder_apply,
    product_state,
    superpotential_from_state,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL_CONSTRAINT = 1e-10


class ConstraintDomainError(ValueError):
    pass


class NoBoundStateError(ValueError):
    pass


class ConstraintViolation(ValueError):
    """(a, b, c) is off the surface on which the closed forms hold."""

    def __init__(self, violation: float, relative: float, b_required: float):
        self.violation = violation
        self.relative = relative
        self.b_required = b_required
        super().__init__(
            f"constraint b = 2a*sqrt(2mc)/((M-1)hbar) violated: "
            f"required b={b_required!r}, distance {violation!r} (relative {relative!r})"
        )


class View(str, Enum):
    COULOMB = "coulomb"
    OSCILLATOR = "oscillator"


# ---------- Types ----------
class EnergyBreakdown(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float
    delta_epsilon: float

    @computed_field
    @property
    def E(self) -> float:
        return self.epsilon + self.delta_epsilon


class GroundSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    view: View
    W: Superpotential
    delta_W: Superpotential
    chi: ClosedFormState
    phi: ClosedFormState
    psi: ClosedFormState
    energy: EnergyBreakdown

    @property
    def superpotential(self) -> Superpotential:
        return self.W + self.delta_W


class SpectrumLevel(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    a_n: float
    E_n: float
    state: Optional[ClosedFormState] = None


class ConstraintDistance(BaseModel):
    model_config = ConfigDict(frozen=True)

    b_required: float
    # signed: b - b_required
    violation: float
    relative: float


class DualViewReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    energy_difference: float
    parameter_difference: float


# ---------- Constraint ----------
def constraint_b(a: float, c: float, dim: DimensionSpec, phys: PhysicalParams) -> float:
    """b = 2a√(2mc)/((M-1)ħ)."""
    if a <= 0 or c <= 0:
        raise ConstraintDomainError("constraint requires attractive Coulomb and confining quadratic terms")
    return 2.0 * a * math.sqrt(2.0 * phys.mass * c) / ((dim.M - 1) * phys.hbar)


def constraint_a(b: float, c: float, dim: DimensionSpec, phys: PhysicalParams, n: int = 0) -> float:
    """a_n = (Λ+n+1)ħb/√(2mc); n = 0 inverts constraint_b exactly."""
    if b < 0 or c <= 0:
        raise ConstraintDomainError("constraint requires attractive Coulomb and confining quadratic terms")
    if n < 0:
        raise ValueError("level index must be nonnegative")
    return (dim.Lambda + n + 1.0) * phys.hbar * b / math.sqrt(2.0 * phys.mass * c)


def constraint_c(a: float, b: float, dim: DimensionSpec, phys: PhysicalParams) -> float:
    """c solving the constraint for given a, b: ((M-1)ħb/(2a))²/(2m)."""
    if a <= 0 or b < 0:
        raise ConstraintDomainError("constraint requires attractive Coulomb and confining quadratic terms")
    root = (dim.M - 1) * phys.hbar * b / (2.0 * a)
    return root * root / (2.0 * phys.mass)


def constraint_distance(params: PotentialParams, dim: DimensionSpec, phys: PhysicalParams) -> ConstraintDistance:
    b_required = 2.0 * params.a * math.sqrt(2.0 * phys.mass * params.c) / ((dim.M - 1) * phys.hbar)
    violation = params.b - b_required
    scale = max(abs(params.b), abs(b_required))
    relative = abs(violation) / scale if scale > 0 else 0.0
    return ConstraintDistance(b_required=b_required, violation=violation, relative=relative)


def check_constraint(
    params: PotentialParams,
    dim: DimensionSpec,
    phys: PhysicalParams,
    tol: float = DEFAULT_TOL_CONSTRAINT,
) -> ConstraintDistance:
    distance = constraint_distance(params, dim, phys)
    if distance.relative > tol:
        logger.info("constraint violated: %s", distance)
        raise ConstraintViolation(abs(distance.violation), distance.relative, distance.b_required)
    return distance


def derive_parameter(
    a: Optional[float],
    b: Optional[float],
    c: Optional[float],
    dim: DimensionSpec,
    phys: PhysicalParams,
    which: str,
) -> PotentialParams:
    """Fill the missing one of (a, b, c) from the constraint."""
    if which == "b":
        b = constraint_b(a or 0.0, c or 0.0, dim, phys)
    elif which == "a":
        a = constraint_a(b or 0.0, c or 0.0, dim, phys)
    elif which == "c":
        c = constraint_c(a or 0.0, b or 0.0, dim, phys)
    else:
        raise ValueError(f"cannot derive {which!r}; expected one of a, b, c")
    logger.debug("derived %s: a=%r b=%r c=%r", which, a, b, c)
    return PotentialParams(a=a or 0.0, b=b or 0.0, c=c or 0.0)


# ---------- Coulomb view ----------
def coulomb_ground(a: float, dim: DimensionSpec, phys: PhysicalParams) -> tuple[Superpotential, ClosedFormState, float]:
    if a <= 0:
        raise NoBoundStateError("no bound Coulomb state for a <= 0 in this construction")
    nu = dim.Lambda + 1.0
    chi = ClosedFormState(q=nu, lam=phys.mass * a / (nu * phys.hbar ** 2))
    W = superpotential_from_state(chi, phys)
    epsilon = -phys.mass * a ** 2 / (2.0 * phys.hbar ** 2 * nu ** 2)
    return W, chi, epsilon


def perturbation_ground_coulomb(
    params: PotentialParams,
    dim: DimensionSpec,
    phys: PhysicalParams,
    tol: float = DEFAULT_TOL_CONSTRAINT,
) -> tuple[Superpotential, ClosedFormState, float]:
    """ΔW = √c r, the moderating function and Δε for ΔV = br + cr²."""
    check_constraint(params, dim, phys, tol)
    if params.b == 0 and params.c == 0:
        return Superpotential(), ClosedFormState(q=0.0), 0.0
    if params.a <= 0:
        raise NoBoundStateError("Coulomb view needs a > 0")
    M = dim.M
    delta_W = Superpotential.from_terms({1: math.sqrt(params.c)})
    phi = ClosedFormState(q=0.0, kappa=params.b * (M - 1) / (4.0 * params.a))
    delta_epsilon = M * (M - 1) * params.b * phys.hbar ** 2 / (4.0 * phys.mass * params.a)
    return delta_W, phi, delta_epsilon


def ground_state(
    params: PotentialParams,
    dim: DimensionSpec,
    phys: PhysicalParams,
    tol: float = DEFAULT_TOL_CONSTRAINT,
) -> GroundSolution:
    """Exact ground state, Coulomb view; pure oscillator (a = 0) routes to the oscillator view."""
    if params.a == 0 and params.c > 0:
        return oscillator_view_ground(params, dim, phys, tol)
    check_constraint(params, dim, phys, tol)
    W, chi, epsilon = coulomb_ground(params.a, dim, phys)
    delta_W, phi, delta_epsilon = perturbation_ground_coulomb(params, dim, phys, tol)
    return GroundSolution(
        view=View.COULOMB,
        W=W,
        delta_W=delta_W,
        chi=chi,
        phi=phi,
        psi=product_state(chi, phi),
        energy=EnergyBreakdown(epsilon=epsilon, delta_epsilon=delta_epsilon),
    )


# ---------- Oscillator view ----------
def oscillator_view_ground(
    params: PotentialParams,
    dim: DimensionSpec,
    phys: PhysicalParams,
    tol: float = DEFAULT_TOL_CONSTRAINT,
) -> GroundSolution:
    """W = √c r - (Λ+1)ħ/(√2m r), ΔW = b/(2√c)."""
    if params.c <= 0:
        raise ConstraintDomainError("oscillator view undefined for c <= 0")
    check_constraint(params, dim, phys, tol)
    s = phys.susy_scale
    nu = dim.Lambda + 1.0
    root_c = math.sqrt(params.c)
    chi = ClosedFormState(q=nu, kappa=root_c / (2.0 * s))
    phi = ClosedFormState(q=0.0, lam=params.b / (2.0 * root_c * s))
    W = Superpotential.from_terms({1: root_c, -1: -nu * s})
    delta_W = Superpotential.from_terms({0: params.b / (2.0 * root_c)})
    energy = EnergyBreakdown(
        epsilon=s * root_c * (2.0 * dim.Lambda + 3.0),
        delta_epsilon=-params.b ** 2 / (4.0 * params.c),
    )
    return GroundSolution(
        view=View.OSCILLATOR,
        W=W,
        delta_W=delta_W,
        chi=chi,
        phi=phi,
        psi=product_state(chi, phi),
        energy=energy,
    )


def _relative_gap(x: float, y: float) -> float:
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


def dual_view_check(
    params: PotentialParams,
    dim: DimensionSpec,
    phys: PhysicalParams,
    tol: float = DEFAULT_TOL_CONSTRAINT,
) -> DualViewReport:
    coulomb = ground_state(params, dim, phys, tol)
    oscillator = oscillator_view_ground(params, dim, phys, tol)
    psi_c, psi_o = coulomb.psi, oscillator.psi
    return DualViewReport(
        energy_difference=abs(coulomb.energy.E - oscillator.energy.E),
        parameter_difference=max(
            _relative_gap(psi_c.q, psi_o.q),
            _relative_gap(psi_c.lam, psi_o.lam),
            _relative_gap(psi_c.kappa, psi_o.kappa),
        ),
    )


# ---------- Spectrum and hierarchy ----------
def level_energy(b: float, c: float, dim: DimensionSpec, phys: PhysicalParams, n: int) -> float:
    """E_n = -b²/4c + (ħ√c/√2m)[2(n+Λ)+3]."""
    return -b ** 2 / (4.0 * c) + phys.susy_scale * math.sqrt(c) * (2.0 * (n + dim.Lambda) + 3.0)


def spectrum(
    b: float,
    c: float,
    dim: DimensionSpec,
    phys: PhysicalParams,
    n_max: int,
    include_states: bool = False,
) -> list[SpectrumLevel]:
    if c <= 0:
        raise ConstraintDomainError("spectrum needs a confining quadratic term (c > 0)")
    if b < 0:
        raise ValueError("b must be nonnegative")
    levels = []
    for n in range(n_max + 1):
        state = hierarchy_states(b, c, dim, phys, n) if include_states else None
        levels.append(SpectrumLevel(
            n=n,
            a_n=constraint_a(b, c, dim, phys, n),
            E_n=level_energy(b, c, dim, phys, n),
            state=state,
        ))
    return levels


def coulomb_spectrum(a: float, dim: DimensionSpec, phys: PhysicalParams, n_max: int) -> list[SpectrumLevel]:
    """Pure Coulomb levels -ma²/(2ħ²(n+Λ+1)²); the Λ -> Λ+1 hierarchy keeps a fixed."""
    if a <= 0:
        raise NoBoundStateError("no bound Coulomb state for a <= 0 in this construction")
    levels = []
    for n in range(n_max + 1):
        nu = dim.Lambda + n + 1.0
        levels.append(SpectrumLevel(n=n, a_n=a, E_n=-phys.mass * a ** 2 / (2.0 * phys.hbar ** 2 * nu ** 2)))
    return levels


def hierarchy_superpotential(b: float, c: float, dim: DimensionSpec, phys: PhysicalParams, k: int) -> Superpotential:
    """W + ΔW at α_k = Λ + k with b and c held fixed (a advanced)."""
    s = phys.susy_scale
    root_c = math.sqrt(c)
    return Superpotential.from_terms({
        -1: -(dim.Lambda + k + 1.0) * s,
        0: b / (2.0 * root_c),
        1: root_c,
    })


def hierarchy_states(b: float, c: float, dim: DimensionSpec, phys: PhysicalParams, n: int) -> ClosedFormState:
    """Ψ_n(α₀) ∝ A⁺(α₀) A⁺(α₁) ... A⁺(α_{n-1}) Ψ₀(α_n), unnormalized."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    if c <= 0:
        raise ConstraintDomainError("hierarchy needs c > 0")
    s = phys.susy_scale
    root_c = math.sqrt(c)
    state = ClosedFormState(
        q=dim.Lambda + n + 1.0,
        lam=b / (2.0 * root_c * s),
        kappa=root_c / (2.0 * s),
    )
    for k in range(n - 1, -1, -1):
        state = ladder_apply(hierarchy_superpotential(b, c, dim, phys, k), state, phys)
    logger.debug("hierarchy state n=%d degree=%d", n, state.degree)
    return state


# ---------- Convenience ----------
def unperturbed_potential(params: PotentialParams, dim: DimensionSpec, phys: PhysicalParams, view: View) -> LaurentForm:
    """V_ES: the exactly solvable piece of the chosen view, barrier included."""
    barrier = dim.barrier_factor * phys.kinetic
    if view is View.COULOMB:
        return LaurentForm.from_terms({-2: barrier, -1: -params.a})
    return LaurentForm.from_terms({-2: barrier, 2: params.c})


def perturbing_potential(params: PotentialParams, view: View) -> LaurentForm:
    if view is View.COULOMB:
        return LaurentForm.from_terms({1: params.b, 2: params.c})
    return LaurentForm.from_terms({-1: -params.a, 1: params.b})
