"""Finite-difference radial oracle.

Uniform grid r_i = (i+1)h, i = 0..count-1, with Dirichlet zeros implied at r = 0
and r = (count+1)h. The three-point Laplacian makes H a symmetric tridiagonal
matrix; its lowest eigenvalues come from Sturm-sequence bisection.

For M = 2 (Λ = -1/2) u behaves like √r at the origin and the plain stencil fails.
Those grids are cell-centred, r_i = (i+1/2)h, and H is discretized through
u = √r v as the flux form of -(1/r)(r v')', symmetrized by √r. Its eigenvectors
are u on the nodes again.
"""
import logging
import math
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.optimize import brentq

from models import DimensionSpec, LaurentForm, PhysicalParams, PotentialParams, effective_potential
from susy import ClosedFormState

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 100


class GridError(ValueError):
    pass


# ---------- Types ----------
class RadialGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: float = Field(..., gt=0)
    count: int = Field(..., ge=MIN_GRID_POINTS)
    r_max: float = Field(..., gt=0)
    centered: bool = False

    @property
    def r_min(self) -> float:
        return self.h / 2.0 if self.centered else self.h

    @property
    def r_end(self) -> float:
        """Outer Dirichlet node."""
        return self.r_min + self.count * self.h

    def nodes(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(self.count, dtype=float)

    def refined(self) -> "RadialGrid":
        """Half step on the same Dirichlet interval (to within h/4 when centred)."""
        if self.centered:
            return RadialGrid(h=self.h / 2.0, count=2 * self.count, r_max=self.r_max, centered=True)
        return RadialGrid(h=self.h / 2.0, count=2 * self.count + 1, r_max=self.r_max + self.h / 2.0)


class GridOverrides(BaseModel):
    model_config = ConfigDict(frozen=True)

    r_max: Optional[float] = Field(None, gt=0)
    h: Optional[float] = Field(None, gt=0)


class GridFunction(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: RadialGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_alignment(self):
        if self.values.shape != (self.grid.count,):
            raise GridError(f"values of shape {self.values.shape} do not match {self.grid.count} nodes")
        if not np.all(np.isfinite(self.values)):
            raise GridError("grid function has non-finite values")
        return self

    def scale(self, factor: float) -> "GridFunction":
        return GridFunction(grid=self.grid, values=factor * self.values)


class EigenResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    energies: list[float]
    vectors: Optional[list[GridFunction]] = None
    richardson: bool = False


def _require_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise GridError("grid mismatch")


# ---------- Grid construction ----------
def length_scales(params: PotentialParams, dim: DimensionSpec, phys: PhysicalParams) -> dict[str, float]:
    scales = {}
    if params.a > 0:
        scales["coulomb"] = (dim.Lambda + 1.0) * phys.hbar ** 2 / (phys.mass * params.a)
    if params.c > 0:
        scales["oscillator"] = math.sqrt(phys.hbar / math.sqrt(2.0 * phys.mass * params.c))
    if params.b > 0:
        scales["linear"] = (phys.kinetic / params.b) ** (1.0 / 3.0)
    return scales


def turning_radius(V_eff: LaurentForm, energy: float, start: float) -> float:
    """Outermost r with V_eff(r) = energy; 0 when energy lies below the potential everywhere sampled."""
    r_hi = start
    while V_eff(r_hi) <= energy:
        r_hi *= 2.0
        if r_hi > 1e8:
            raise GridError("potential does not confine the requested energy")
    radii = np.geomspace(start * 1e-4, r_hi, 1024)
    below = np.nonzero(V_eff(radii) <= energy)[0]
    if below.size == 0:
        return 0.0
    i = below[-1]
    return brentq(lambda r: V_eff(r) - energy, radii[i], radii[i + 1])


def build_grid(
    params: PotentialParams,
    dim: DimensionSpec,
    phys: PhysicalParams,
    overrides: Optional[GridOverrides] = None,
    energy_guess: Optional[float] = None,
    points: int = 20000,
    n_scales: float = 10.0,
    level: int = 0,
) -> RadialGrid:
    """Grid sized from the length scales; `level` refines it for states with that many nodes.

    Without an h override the grid has points·(2·level+1) nodes: the residual of a
    level-n state grows about fourfold per level at fixed h.
    """
    if level < 0:
        raise GridError("level must be nonnegative")
    overrides = overrides or GridOverrides()
    scales = length_scales(params, dim, phys)
    if not scales:
        raise GridError("all of a, b, c are zero or nonconfining; no length scale")
    r_max = n_scales * max(scales.get("coulomb", 0.0), scales.get("oscillator", 0.0))
    if energy_guess is not None:
        V_eff = effective_potential(params, dim, phys)
        turning = turning_radius(V_eff, energy_guess, max(scales.values()))
        r_max = max(r_max, turning + n_scales * max(scales.values()))
    if r_max == 0.0:
        r_max = n_scales * max(scales.values())
    if overrides.r_max is not None:
        r_max = overrides.r_max
    if overrides.h is not None:
        h = overrides.h
        count = int(round(r_max / h))
    else:
        count = points * (2 * level + 1)
        h = r_max / count
    centered = dim.Lambda == -0.5
    logger.debug("grid r_max=%r h=%r count=%d centered=%s", r_max, h, count, centered)
    return RadialGrid(h=h, count=count, r_max=r_max, centered=centered)


# ---------- Grid functions ----------
def evaluate_state(state: ClosedFormState, grid: RadialGrid) -> GridFunction:
    """P(r) r^q exp(-λr - κr²) on the nodes, exponent assembled in log space."""
    if state.q <= -0.5:
        raise GridError("q <= -1/2: not square integrable")
    if not state.is_normalizable:
        raise GridError("state has no decaying exponential")
    r = grid.nodes()
    log_envelope = state.q * np.log(r) - state.lam * r - state.kappa * r * r
    values = state.polynomial(r) * np.exp(log_envelope)
    if state.norm is not None:
        values = state.norm * values
    return GridFunction(grid=grid, values=values)


def _integrate(values: np.ndarray, grid: RadialGrid) -> float:
    # zero at r = 0 and at the outer Dirichlet node
    padded = np.concatenate(([0.0], values, [0.0]))
    x = np.concatenate(([0.0], grid.nodes(), [grid.r_end]))
    return float(trapezoid(padded, x=x))


def norm(f: GridFunction) -> float:
    return math.sqrt(_integrate(f.values * f.values, f.grid))


def normalize(f: GridFunction) -> tuple[GridFunction, float]:
    size = norm(f)
    if not math.isfinite(size) or size == 0.0:
        raise GridError("cannot normalize a zero or non-finite function")
    n0 = 1.0 / size
    return f.scale(n0), n0


def overlap(f: GridFunction, g: GridFunction) -> float:
    """∫fg dr / (‖f‖‖g‖)."""
    _require_same_grid(f, g)
    return _integrate(f.values * g.values, f.grid) / (norm(f) * norm(g))


# ---------- Hamiltonian ----------
def tridiagonal(V_eff: LaurentForm, grid: RadialGrid, phys: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    stiffness = phys.kinetic / grid.h ** 2
    r = grid.nodes()
    diag = 2.0 * stiffness + V_eff(r)
    off = np.full(grid.count - 1, -stiffness)
    if grid.centered:
        # faces at (i+1)h; the face at r = 0 carries no flux
        faces = r[:-1] + grid.h / 2.0
        off = off * faces / np.sqrt(r[:-1] * r[1:])
        diag = diag + phys.kinetic / (4.0 * r * r)
    return diag, off


def hamiltonian_apply(V_eff: LaurentForm, f: GridFunction, phys: PhysicalParams) -> GridFunction:
    """The tridiagonal H on f with Dirichlet ends.

    On a plain grid this is -(ħ²/2m)(f_{i-1} - 2f_i + f_{i+1})/h² + V_eff(r_i) f_i.
    """
    diag, off = tridiagonal(V_eff, f.grid, phys)
    values = diag * f.values
    values[:-1] += off * f.values[1:]
    values[1:] += off * f.values[:-1]
    return GridFunction(grid=f.grid, values=values)


def sturm_count(diag: np.ndarray, off: np.ndarray, shifts) -> np.ndarray:
    """Number of eigenvalues strictly below each shift (LDLᵀ inertia)."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(np.abs(off) ** 2, initial=0.0)))
    counts = np.zeros(shifts.shape, dtype=int)
    d = diag[0] - shifts
    d = np.where(np.abs(d) < pivmin, -pivmin, d)
    counts += d < 0
    for i in range(1, diag.size):
        d = (diag[i] - shifts) - off[i - 1] ** 2 / d
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        counts += d < 0
    return counts


def _lowest(V_eff: LaurentForm, grid: RadialGrid, phys: PhysicalParams, k: int, vectors: bool, tol: float):
    diag, off = tridiagonal(V_eff, grid, phys)
    if vectors:
        energies, columns = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, k - 1), lapack_driver="stebz", tol=tol
        )
        functions = []
        for column in columns.T:
            # fix the sign so the largest lobe is positive
            column = column if column[np.argmax(np.abs(column))] > 0 else -column
            functions.append(GridFunction(grid=grid, values=column / math.sqrt(grid.h)))
        return energies, functions
    energies = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, k - 1), lapack_driver="stebz", tol=tol)
    return energies, None


def eigen_lowest(
    V_eff: LaurentForm,
    grid: RadialGrid,
    phys: PhysicalParams,
    k: int = 1,
    vectors: bool = False,
    richardson: bool = False,
    tol: float = 1e-12,
) -> EigenResult:
    """Lowest k eigenvalues, ascending; Richardson over (h, h/2) when asked."""
    if k < 1 or k >= grid.count:
        raise ValueError(f"k={k} out of range for {grid.count} nodes")
    energies, functions = _lowest(V_eff, grid, phys, k, vectors, tol)
    if richardson:
        fine, _ = _lowest(V_eff, grid.refined(), phys, k, False, tol)
        energies = (4.0 * fine - energies) / 3.0
    logger.debug("eigen_lowest k=%d richardson=%s -> %r", k, richardson, energies)
    return EigenResult(energies=[float(e) for e in energies], vectors=functions, richardson=richardson)


def h_residual(
    f: Union[GridFunction, ClosedFormState],
    E: float,
    V_eff: LaurentForm,
    phys: PhysicalParams,
    grid: Optional[RadialGrid] = None,
    skip: int = 3,
) -> float:
    """‖Hf - Ef‖₂ / ‖f‖₂ on interior nodes."""
    if isinstance(f, ClosedFormState):
        if grid is None:
            raise GridError("a grid is needed to evaluate a closed-form state")
        f = evaluate_state(f, grid)
    residual = hamiltonian_apply(V_eff, f, phys).values - E * f.values
    interior = slice(skip, f.grid.count - skip)
    return float(np.linalg.norm(residual[interior]) / np.linalg.norm(f.values[interior]))
