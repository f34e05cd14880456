from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from utils.formatting import format_float

TEMPLATES_DIR = Path(__file__).resolve().parent.parent / "templates"


def _sig(value: Any, digits: int = 10) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format(value, f".{digits}g")
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_sig(v, digits) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_sig(v, digits)}" for k, v in value.items()) + "}"
    return str(value)


def _environment() -> Environment:
    env = Environment(
        loader=FileSystemLoader(str(TEMPLATES_DIR)),
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        autoescape=False,
    )
    env.filters["sig"] = _sig
    env.filters["full"] = format_float
    return env


def render_table(template_name: str, **context: Any) -> str:
    return _environment().get_template(template_name).render(**context)
