"""Superpotential algebra: Riccati images and residuals, partner potentials,
shape-invariance comparison and the first-order factorization operators.

Everything here works on exact Laurent coefficients; nothing is sampled on a grid.
"""
import logging
import math
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator

from models import LaurentForm, PhysicalParams

logger = logging.getLogger(__name__)

SUPERPOTENTIAL_POWERS = (-1, 0, 1)


class NotLaurentError(ValueError):
    """The log-derivative of a state with nodes is rational, not a Laurent form."""


class ShapeInvarianceError(ValueError):
    pass


# ---------- Types ----------
class Superpotential(BaseModel):
    model_config = ConfigDict(frozen=True)

    form: LaurentForm = Field(default_factory=LaurentForm)

    @field_validator("form")
    @classmethod
    def _check_shape(cls, value: LaurentForm) -> LaurentForm:
        extra = [p for p in value.powers if p not in SUPERPOTENTIAL_POWERS]
        if extra:
            raise ValueError(f"superpotential powers must lie in {{-1, 0, 1}}, got {extra}")
        return value

    @classmethod
    def from_terms(cls, terms: dict[int, float]) -> "Superpotential":
        return cls(form=LaurentForm.from_terms(terms))

    @property
    def alpha(self) -> float:
        """Coefficient of 1/r."""
        return self.form.coefficient(-1)

    @property
    def beta(self) -> float:
        return self.form.coefficient(0)

    @property
    def gamma(self) -> float:
        """Coefficient of r."""
        return self.form.coefficient(1)

    def __add__(self, other: "Superpotential") -> "Superpotential":
        return Superpotential(form=self.form + other.form)


class ClosedFormState(BaseModel):
    """P(r) r^q exp(-λr - κr²), optionally carrying a normalization N0."""

    model_config = ConfigDict(frozen=True)

    poly: tuple[float, ...] = (1.0,)
    q: float
    lam: float = Field(0.0, ge=0)
    kappa: float = Field(0.0, ge=0)
    norm: Optional[float] = Field(None, gt=0)

    @field_validator("poly")
    @classmethod
    def _check_poly(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if not value:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(math.isfinite(v) for v in value):
            raise ValueError("polynomial coefficients must be finite")
        # trailing zeros carry no information
        trimmed = list(value)
        while len(trimmed) > 1 and trimmed[-1] == 0.0:
            trimmed.pop()
        return tuple(float(v) for v in trimmed)

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.poly)

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def is_normalizable(self) -> bool:
        return self.q > -0.5 and (self.kappa > 0 or self.lam > 0)

    def node_count(self) -> int:
        """Number of positive real roots of P, i.e. nodes in r > 0."""
        if self.degree == 0:
            return 0
        roots = self.polynomial.roots()
        real = [z.real for z in roots if abs(z.imag) <= 1e-9 * max(1.0, abs(z))]
        return sum(1 for x in real if x > 0)

    def with_norm(self, norm: float) -> "ClosedFormState":
        return self.model_copy(update={"norm": norm})


class ShapeInvarianceComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    R: float
    mismatch: LaurentForm


class PartnerPotentials(BaseModel):
    """Both Riccati images of one superpotential and its ground energy E₀⁻."""

    model_config = ConfigDict(frozen=True)

    image_minus: LaurentForm
    image_plus: LaurentForm

    @property
    def ground_energy(self) -> float:
        return -self.image_minus.constant

    @property
    def v_minus(self) -> LaurentForm:
        return self.image_minus + self.ground_energy

    @property
    def v_plus(self) -> LaurentForm:
        return self.image_plus + self.ground_energy


# ---------- Superpotential <-> state ----------
def superpotential_from_state(state: ClosedFormState, phys: PhysicalParams) -> Superpotential:
    """W = -(ħ/√2m) χ'/χ for a nodeless closed form."""
    if state.degree >= 1:
        raise NotLaurentError("log-derivative not a Laurent form")
    s = phys.susy_scale
    return Superpotential.from_terms({
        -1: -s * state.q,
        0: s * state.lam,
        1: 2 * s * state.kappa,
    })


def state_from_superpotential(S: Superpotential, phys: PhysicalParams) -> ClosedFormState:
    """Integrate χ = exp(-(√2m/ħ)∫S) back into closed form."""
    s = phys.susy_scale
    return ClosedFormState(q=-S.alpha / s, lam=S.beta / s, kappa=S.gamma / (2 * s))


def product_state(f: ClosedFormState, g: ClosedFormState) -> ClosedFormState:
    """χ·φ: polynomials multiply, exponents add."""
    poly = (f.polynomial * g.polynomial).coef
    return ClosedFormState(
        poly=tuple(poly),
        q=f.q + g.q,
        lam=f.lam + g.lam,
        kappa=f.kappa + g.kappa,
    )


# ---------- Riccati ----------
def riccati_image(S: Superpotential, sign: int, phys: PhysicalParams) -> LaurentForm:
    """S² + sign·(ħ/√2m)S'; sign=-1 gives V⁻ - E₀⁻, sign=+1 gives V⁺ - E₀⁻."""
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    s = phys.susy_scale
    return S.form * S.form + S.form.derivative().scale(sign * s)


def riccati_residual(S: Superpotential, V_eff: LaurentForm, E: float, phys: PhysicalParams) -> LaurentForm:
    """Zero form iff S generates V_eff with eigenvalue E."""
    return riccati_image(S, -1, phys) - (V_eff - E)


def perturbation_residual(
    W: Superpotential,
    delta_W: Superpotential,
    delta_V: LaurentForm,
    delta_epsilon: float,
    phys: PhysicalParams,
) -> LaurentForm:
    """ΔW² - (ħ/√2m)ΔW' + 2WΔW - (ΔV - Δε)."""
    s = phys.susy_scale
    lhs = delta_W.form * delta_W.form - delta_W.form.derivative().scale(s) + (W.form * delta_W.form).scale(2.0)
    return lhs - (delta_V - delta_epsilon)


def partner_potentials(S: Superpotential, phys: PhysicalParams) -> PartnerPotentials:
    return PartnerPotentials(
        image_minus=riccati_image(S, -1, phys),
        image_plus=riccati_image(S, 1, phys),
    )


def shape_invariance_compare(
    S_at_0: Superpotential, S_at_1: Superpotential, phys: PhysicalParams
) -> ShapeInvarianceComparison:
    """Split V⁺(α₀) - V⁻(α₁) into its constant R and the nonconstant remainder."""
    if S_at_0.gamma != S_at_1.gamma:
        raise ShapeInvarianceError("b,c not held fixed")
    diff = partner_potentials(S_at_0, phys).v_plus - partner_potentials(S_at_1, phys).v_minus
    comparison = ShapeInvarianceComparison(R=diff.constant, mismatch=diff.without_constant())
    logger.debug("shape invariance R=%r mismatch=%r", comparison.R, comparison.mismatch.coefficients)
    return comparison


# ---------- Factorization operators ----------
def _factor_apply(S: Superpotential, state: ClosedFormState, phys: PhysicalParams, sign: int) -> ClosedFormState:
    # (sign·s d/dr + S) acting on P r^q e^(-λr-κr²), multiplied through by r:
    # Q = (α + sign·s·q)P + (β - sign·s·λ) rP + sign·s rP' + (γ - sign·2sκ) r²P
    s = phys.susy_scale
    P = state.polynomial
    X = Polynomial([0.0, 1.0])
    Q = (
        (S.alpha + sign * s * state.q) * P
        + (S.beta - sign * s * state.lam) * X * P
        + sign * s * X * P.deriv()
        + (S.gamma - sign * (2 * s * state.kappa)) * X * X * P
    )
    coef = np.asarray(Q.coef, dtype=float)
    if not np.any(coef):
        coef = np.zeros(1)
    return ClosedFormState(poly=tuple(coef), q=state.q - 1.0, lam=state.lam, kappa=state.kappa)


def ladder_apply(S_at_0: Superpotential, state: ClosedFormState, phys: PhysicalParams) -> ClosedFormState:
    """A⁺ = -(ħ/√2m) d/dr + S; result is unnormalized with power q-1."""
    if state.q <= 0:
        raise ValueError("ladder_apply needs a state regular at the origin (q > 0)")
    return _factor_apply(S_at_0, state, phys, sign=-1)


def annihilate_apply(S: Superpotential, state: ClosedFormState, phys: PhysicalParams) -> ClosedFormState:
    """A⁻ = +(ħ/√2m) d/dr + S; annihilates the ground state of S."""
    return _factor_apply(S, state, phys, sign=1)
