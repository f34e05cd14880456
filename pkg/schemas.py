from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

REPORT_VERSION = "1.0.0"


# ---------- Inputs ----------
class ParamsOut(BaseModel):
    a: float
    b: float
    c: float


class PhysOut(BaseModel):
    hbar: float
    mass: float


class DimensionOut(BaseModel):
    N: int
    l: int
    M: int
    Lambda: float


class GridOut(BaseModel):
    r_max: float
    h: float
    count: int
    centered: bool = False


class InputsOut(BaseModel):
    params: ParamsOut
    phys: PhysOut
    grid: Optional[GridOut] = None
    derived: Optional[str] = None


# ---------- Energies and states ----------
class EnergyOut(BaseModel):
    epsilon: float
    delta_epsilon: float
    E: float


class ViewsOut(BaseModel):
    coulomb: Optional[EnergyOut] = None
    oscillator: Optional[EnergyOut] = None


class PsiOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    q: float
    lambda_: float = Field(alias="lambda")
    kappa: float
    N0: Optional[float] = None
    poly: list[float] = [1.0]


class SpectrumLevelOut(BaseModel):
    n: int
    a_n: float
    E_n: float


class ConstraintOut(BaseModel):
    b_required: float
    violation: float
    relative: float


# ---------- Checks ----------
class CheckOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    kind: Literal["assert", "info"]
    value: Union[float, int, bool, str, list[Any], dict[str, Any], None] = None
    tol: Optional[float] = None
    pass_: Optional[bool] = Field(None, alias="pass")


class Metadata(BaseModel):
    version: str = REPORT_VERSION
    tool: str = "pcoulomb"


# ---------- Documents ----------
class SolveResponse(BaseModel):
    inputs: InputsOut
    dimension: DimensionOut
    regime: str
    constraint: ConstraintOut
    views: ViewsOut
    psi: Optional[PsiOut] = None
    spectrum: list[SpectrumLevelOut] = []
    metadata: Metadata = Metadata()


class VerificationReport(BaseModel):
    inputs: InputsOut
    dimension: DimensionOut
    views: ViewsOut
    psi: Optional[PsiOut] = None
    spectrum: list[SpectrumLevelOut] = []
    checks: list[CheckOut] = []
    metadata: Metadata = Metadata()

    @property
    def failed(self) -> list[str]:
        return [check.name for check in self.checks if check.kind == "assert" and not check.pass_]


class OracleSolutionOut(BaseModel):
    n: int
    A_root: float
    poly: list[float]
    E: float
    node_count: int
    residual: Optional[float] = None
    grid: Optional[GridOut] = None


class OracleResponse(BaseModel):
    inputs: InputsOut
    dimension: DimensionOut
    n: int
    constraint_polynomial: list[float]
    solutions: list[OracleSolutionOut]
    metadata: Metadata = Metadata()


class EigResponse(BaseModel):
    inputs: InputsOut
    dimension: DimensionOut
    richardson: bool
    energies: list[float]
    metadata: Metadata = Metadata()


SWEEP_HEADER = ("a", "b", "c", "N", "l", "n", "E_closed", "E_numeric", "abs_err", "constraint_residual")


class SweepRow(BaseModel):
    a: float
    b: float
    c: float
    N: int
    l: int
    n: int
    E_closed: Optional[float] = None
    E_numeric: float
    abs_err: Optional[float] = None
    constraint_residual: float

    def as_row(self) -> list[Any]:
        return [getattr(self, name) for name in SWEEP_HEADER]


DOCUMENTS = {
    "report": VerificationReport,
    "solve": SolveResponse,
    "oracle": OracleResponse,
    "eig": EigResponse,
}
