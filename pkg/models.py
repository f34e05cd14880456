import logging
import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

logger = logging.getLogger(__name__)

MIN_POWER = -2
MAX_POWER = 2


class LaurentRangeError(ValueError):
    """Raised when a Laurent form would carry a power outside [-2, 2]."""


# ---------- Units ----------
class PhysicalParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    mass: float = Field(1.0, gt=0)
    hbar: float = Field(1.0, gt=0)

    @property
    def kinetic(self) -> float:
        """ħ²/2m, the kinetic prefactor T."""
        return self.hbar ** 2 / (2.0 * self.mass)

    @property
    def susy_scale(self) -> float:
        """ħ/√(2m), the factor in front of every superpotential derivative."""
        return self.hbar / math.sqrt(2.0 * self.mass)


# ---------- Dimensional reduction ----------
class DimensionSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int = Field(..., ge=1)
    l: int = Field(..., ge=0)

    @computed_field
    @property
    def M(self) -> int:
        return self.N + 2 * self.l

    @computed_field
    @property
    def Lambda(self) -> float:
        # half-integers are exact in binary floating point
        return (self.M - 3) / 2.0

    @model_validator(mode="after")
    def _check_barrier(self):
        if self.N + 2 * self.l < 2:
            raise ValueError(
                f"M = N + 2l = {self.N + 2 * self.l} < 2: no normalizable barrier-regularized solution"
            )
        return self

    @property
    def barrier_factor(self) -> float:
        """Λ(Λ+1)."""
        return self.Lambda * (self.Lambda + 1.0)


# ---------- Potential parameters ----------
class PotentialParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: float = 0.0
    b: float = Field(0.0, ge=0)
    c: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def _check_nontrivial(self):
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise ValueError("at least one of a, b, c must be nonzero")
        return self


class Regime(str, Enum):
    COULOMB = "coulomb-dominant"
    OSCILLATOR = "oscillator-dominant"


# ---------- Laurent forms ----------
class LaurentForm(BaseModel):
    """Finite sum Σ c_p r^p over integer powers p in [-2, 2].

    Absent powers are exactly zero. Exact zeros are dropped on construction so
    that two forms compare equal iff their coefficient maps are identical.
    """

    model_config = ConfigDict(frozen=True)

    coefficients: dict[int, float] = Field(default_factory=dict)

    @field_validator("coefficients")
    @classmethod
    def _check_powers(cls, value: dict[int, float]) -> dict[int, float]:
        for power in value:
            if power < MIN_POWER or power > MAX_POWER:
                raise LaurentRangeError(f"power {power} outside [{MIN_POWER}, {MAX_POWER}]")
        return {p: float(value[p]) for p in sorted(value) if value[p] != 0.0}

    @classmethod
    def from_terms(cls, terms: dict[int, float]) -> "LaurentForm":
        # pydantic wraps validator errors in ValidationError; check here so callers get LaurentRangeError
        for power in terms:
            if power < MIN_POWER or power > MAX_POWER:
                raise LaurentRangeError(f"power {power} outside [{MIN_POWER}, {MAX_POWER}]")
        return cls(coefficients=terms)

    @classmethod
    def constant_form(cls, value: float) -> "LaurentForm":
        return cls(coefficients={0: value})

    @property
    def powers(self) -> list[int]:
        return list(self.coefficients)

    def coefficient(self, power: int) -> float:
        return self.coefficients.get(power, 0.0)

    @property
    def constant(self) -> float:
        return self.coefficient(0)

    def without_constant(self) -> "LaurentForm":
        return LaurentForm(coefficients={p: v for p, v in self.coefficients.items() if p != 0})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coefficients.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    # -------- Algebra --------
    def __add__(self, other) -> "LaurentForm":
        if isinstance(other, (int, float)):
            other = LaurentForm.constant_form(float(other))
        merged = dict(self.coefficients)
        for power, value in other.coefficients.items():
            merged[power] = merged.get(power, 0.0) + value
        return LaurentForm.from_terms(merged)

    __radd__ = __add__

    def __neg__(self) -> "LaurentForm":
        return self.scale(-1.0)

    def __sub__(self, other) -> "LaurentForm":
        if isinstance(other, (int, float)):
            other = LaurentForm.constant_form(float(other))
        return self + (-other)

    def __rsub__(self, other) -> "LaurentForm":
        return (-self) + other

    def scale(self, factor: float) -> "LaurentForm":
        return LaurentForm.from_terms({p: factor * v for p, v in self.coefficients.items()})

    def __mul__(self, other) -> "LaurentForm":
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        product: dict[int, float] = {}
        for p1, c1 in self.coefficients.items():
            for p2, c2 in other.coefficients.items():
                power = p1 + p2
                if power < MIN_POWER or power > MAX_POWER:
                    raise LaurentRangeError(f"product term r^{power} outside [{MIN_POWER}, {MAX_POWER}]")
                product[power] = product.get(power, 0.0) + c1 * c2
        return LaurentForm.from_terms(product)

    __rmul__ = __mul__

    def derivative(self) -> "LaurentForm":
        """d/dr term by term: c r^p -> p c r^(p-1)."""
        return LaurentForm.from_terms(
            {p - 1: p * v for p, v in self.coefficients.items() if p != 0}
        )

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        total = np.zeros_like(r)
        for power, value in self.coefficients.items():
            total = total + value * r ** power
        return total


# ---------- Operations ----------
def dimension_reduce(N: int, l: int) -> DimensionSpec:
    """Map (N, ℓ) to the three-dimensional form through M = N + 2ℓ, Λ = (M-3)/2."""
    dim = DimensionSpec(N=N, l=l)
    logger.debug("dimension_reduce N=%d l=%d -> M=%d Lambda=%s", N, l, dim.M, dim.Lambda)
    return dim


def effective_potential(params: PotentialParams, dim: DimensionSpec, phys: PhysicalParams) -> LaurentForm:
    """V_eff = Λ(Λ+1)ħ²/(2m r²) - a/r + b r + c r²."""
    return LaurentForm.from_terms({
        -2: dim.barrier_factor * phys.kinetic,
        -1: -params.a,
        1: params.b,
        2: params.c,
    })


def classify_regime(params: PotentialParams, prefer: Optional[Regime] = None) -> Regime:
    """Advisory tag: which exactly solvable piece is treated as unperturbed."""
    if prefer is not None:
        return Regime(prefer)
    if params.a > 0 and params.a >= max(params.b, params.c):
        return Regime.COULOMB
    return Regime.OSCILLATOR
