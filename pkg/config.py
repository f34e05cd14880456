import logging
from pathlib import Path
from typing import Union

from pydantic import BaseModel, ConfigDict, Field

from exceptions import UsageError

logger = logging.getLogger(__name__)

# keys a config file may set besides Settings fields
INPUT_KEYS = ("a", "b", "c", "N", "l", "hbar", "mass", "nmax", "k", "n", "rmax", "h", "derive")


class Settings(BaseModel):
    """Every tolerance and numeric default in one place."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tol_constraint: float = Field(1e-10, gt=0)
    tol_riccati: float = Field(1e-12, gt=0)
    tol_dual: float = Field(1e-12, gt=0)
    tol_eigen: float = Field(1e-4, gt=0)
    tol_residual: float = Field(1e-6, gt=0)
    tol_oracle_root: float = Field(1e-13, gt=0)
    grid_points: int = Field(20000, ge=100)
    boundary_skip: int = Field(3, ge=0)
    oracle_n_cap: int = Field(8, ge=0)
    length_scales: float = Field(10.0, gt=0)
    richardson: bool = False


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """`key = value` lines; `#` starts a comment; blank lines are skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise UsageError(f"{source}:{lineno}: empty key")
        if key not in INPUT_KEYS and key not in Settings.model_fields:
            raise UsageError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def load_config_file(path: Union[str, Path]) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    logger.debug("loaded config %s", path)
    return parse_config_text(text, source=str(path))
