"""Polynomial-ansatz oracle.

Substituting u = P(r) r^(Λ+1) exp(-λr - κr²) with deg P = n into the radial
equation fixes λ and κ from the br and cr² terms, fixes E from the top power,
and leaves a tridiagonal homogeneous system for the coefficients of P whose
determinant is a polynomial in the Coulomb strength A. Each real root of that
polynomial is a potential -A/r + br + cr² with an exact level-n eigenstate.
"""
import logging
import math

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from exact import level_energy
from models import DimensionSpec, PhysicalParams
from susy import ClosedFormState

logger = logging.getLogger(__name__)

DEFAULT_N_CAP = 8


# ---------- Types ----------
class RecursionSystem(BaseModel):
    """Rows j = -1..n-1 of the reduced equation, indexed by i = j + 1.

    Row i reads lower[i-1]·p_{i-1} + (A - shifts[i])·p_i + upper[i]·p_{i+1} = 0.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    q: float
    lam: float
    kappa: float
    shifts: tuple[float, ...]
    upper: tuple[float, ...]
    lower: tuple[float, ...]

    @property
    def a0(self) -> float:
        return self.shifts[0]

    def matrix(self, A: float) -> np.ndarray:
        size = self.n + 1
        out = np.diag(A - np.asarray(self.shifts))
        if size > 1:
            out += np.diag(self.upper, 1) + np.diag(self.lower, -1)
        return out

    def determinant(self, A: float) -> float:
        """Continuant of the tridiagonal system at A."""
        prev, cur = 1.0, A - self.shifts[0]
        for i in range(1, self.n + 1):
            prev, cur = cur, (A - self.shifts[i]) * cur - self.lower[i - 1] * self.upper[i - 1] * prev
        return cur

    def null_vector(self, A: float) -> np.ndarray:
        """Back-substitution from p_n = 1; row 0 is the consistency condition."""
        p = np.zeros(self.n + 1)
        p[self.n] = 1.0
        for i in range(self.n, 0, -1):
            above = self.upper[i] * p[i + 1] if i < self.n else 0.0
            p[i - 1] = -((A - self.shifts[i]) * p[i] + above) / self.lower[i - 1]
        return p


class OracleSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    A_root: float
    state: ClosedFormState
    E: float
    node_count: int

    @property
    def poly(self) -> tuple[float, ...]:
        return self.state.poly


# ---------- Operations ----------
def oracle_reduce(b: float, c: float, dim: DimensionSpec, phys: PhysicalParams, n: int) -> RecursionSystem:
    if c <= 0:
        raise ValueError("oracle needs c > 0")
    if b < 0:
        raise ValueError("oracle needs b >= 0")
    if n < 0:
        raise ValueError("level index must be nonnegative")
    T = phys.kinetic
    q = dim.Lambda + 1.0
    kappa = math.sqrt(2.0 * phys.mass * c) / (2.0 * phys.hbar)
    lam = math.sqrt(phys.mass / 2.0) * b / (phys.hbar * math.sqrt(c))
    a0 = 2.0 * T * lam * q
    return RecursionSystem(
        n=n,
        q=q,
        lam=lam,
        kappa=kappa,
        shifts=tuple(a0 + 2.0 * T * lam * i for i in range(n + 1)),
        upper=tuple(T * (i + 1) * (i + 2.0 * q) for i in range(n)),
        lower=tuple(4.0 * T * kappa * (n - i + 1) for i in range(1, n + 1)),
    )


def qes_constraint_polynomial(b: float, c: float, dim: DimensionSpec, phys: PhysicalParams, n: int) -> Polynomial:
    """Monic degree-(n+1) polynomial in A; its real roots are the admissible Coulomb strengths."""
    system = oracle_reduce(b, c, dim, phys, n)
    A = Polynomial([0.0, 1.0])
    prev, cur = Polynomial([1.0]), A - system.shifts[0]
    for i in range(1, n + 1):
        prev, cur = cur, (A - system.shifts[i]) * cur - system.lower[i - 1] * system.upper[i - 1] * prev
    return cur


def _constraint_roots(system: RecursionSystem) -> list[float]:
    if system.n == 0:
        return [system.shifts[0]]
    # lower*upper > 0, so the system is similar to a symmetric tridiagonal matrix
    # and every root is real and simple
    off = np.sqrt(np.asarray(system.lower) * np.asarray(system.upper))
    seeds = eigvalsh_tridiagonal(np.asarray(system.shifts), off, lapack_driver="stebz")
    seeds = np.sort(seeds)
    roots = []
    for i, seed in enumerate(seeds):
        gaps = [abs(seed - other) for j, other in enumerate(seeds) if j != i]
        half = 0.5 * min(gaps)
        lo, hi = seed - half, seed + half
        f_lo, f_hi = system.determinant(lo), system.determinant(hi)
        if f_lo == 0.0:
            roots.append(lo)
        elif f_hi == 0.0:
            roots.append(hi)
        elif f_lo * f_hi < 0:
            roots.append(brentq(system.determinant, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps))
        else:
            logger.warning("no sign change around constraint root %r; keeping unpolished value", seed)
            roots.append(float(seed))
    return roots


def qes_solve(
    b: float,
    c: float,
    dim: DimensionSpec,
    phys: PhysicalParams,
    n: int,
    n_cap: int = DEFAULT_N_CAP,
) -> list[OracleSolution]:
    """All exact level-n states of the family, ascending in A."""
    if n > n_cap:
        raise ValueError(f"level {n} exceeds the oracle cap {n_cap}")
    system = oracle_reduce(b, c, dim, phys, n)
    energy = level_energy(b, c, dim, phys, n)
    solutions = []
    for root in _constraint_roots(system):
        p = system.null_vector(root)
        state = ClosedFormState(poly=tuple(p), q=system.q, lam=system.lam, kappa=system.kappa)
        solutions.append(OracleSolution(
            n=n,
            A_root=float(root),
            state=state,
            E=energy,
            node_count=state.node_count(),
        ))
    logger.debug("qes_solve n=%d roots=%r", n, [s.A_root for s in solutions])
    return solutions
