import argparse
import logging
from typing import Any, Callable, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from config import Settings, load_config_file
from exact import derive_parameter
from exceptions import UsageError
from models import DimensionSpec, PhysicalParams, PotentialParams, dimension_reduce

logger = logging.getLogger(__name__)


class Inputs(BaseModel):
    """Validated physics inputs shared by every command."""

    model_config = ConfigDict(frozen=True)

    params: PotentialParams
    dim: DimensionSpec
    phys: PhysicalParams
    derived: Optional[str] = None


# -------- Config file --------
def get_config(args: argparse.Namespace) -> dict[str, str]:
    path = getattr(args, "config", None)
    return load_config_file(path) if path else {}


def pick(args: argparse.Namespace, config: dict[str, str], name: str, cast: Callable[[str], Any], default=None):
    """Flag value if given, else config file value, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        try:
            return cast(config[name])
        except ValueError as exc:
            raise UsageError(f"config value for {name!r} is not valid: {config[name]!r}") from exc
    return default


def _as_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


# -------- Settings --------
def get_settings(args: argparse.Namespace, config: dict[str, str]) -> Settings:
    values: dict[str, Any] = {}
    for name, field in Settings.model_fields.items():
        if name in config:
            values[name] = _as_bool(config[name]) if field.annotation is bool else config[name]
    if getattr(args, "richardson", False):
        values["richardson"] = True
    try:
        return Settings(**values)
    except (ValidationError, ValueError) as exc:
        raise UsageError(f"invalid settings: {exc}") from exc


# -------- Physics inputs --------
def resolve_inputs(args: argparse.Namespace, config: dict[str, str]) -> Inputs:
    """Merge flags over config, derive the constrained parameter if asked, validate."""
    a = pick(args, config, "a", float)
    b = pick(args, config, "b", float)
    c = pick(args, config, "c", float)
    derive = pick(args, config, "derive", str)
    try:
        dim = dimension_reduce(pick(args, config, "N", int, 3), pick(args, config, "l", int, 0))
        phys = PhysicalParams(
            hbar=pick(args, config, "hbar", float, 1.0),
            mass=pick(args, config, "mass", float, 1.0),
        )
        if derive:
            if {"a": a, "b": b, "c": c}.get(derive) is not None:
                raise UsageError(f"--derive {derive} conflicts with an explicit value for {derive}")
            params = derive_parameter(a, b, c, dim, phys, derive)
        else:
            params = PotentialParams(a=a or 0.0, b=b or 0.0, c=c or 0.0)
    except UsageError:
        raise
    except (ValidationError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    logger.info("inputs a=%r b=%r c=%r M=%d", params.a, params.b, params.c, dim.M)
    return Inputs(params=params, dim=dim, phys=phys, derived=derive)
