import csv
import json
import math
from typing import IO, Any, Iterable, Sequence

from pydantic import BaseModel

SIGNIFICANT_DIGITS = 17


def format_float(value: float) -> str:
    """17 significant digits; non-finite values have no JSON spelling and become null."""
    if not math.isfinite(value):
        return "null"
    return format(value, f".{SIGNIFICANT_DIGITS}g")


def _encode(value: Any, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, level + 1, indent)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_encode(v, level + 1, indent)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot encode {type(value).__name__}")


def dump_json(document: Any, indent: int = 2) -> str:
    """Deterministic JSON: model field order, 17-digit floats, trailing newline."""
    if isinstance(document, BaseModel):
        document = document.model_dump(mode="json", by_alias=True)
    elif isinstance(document, list):
        document = [d.model_dump(mode="json", by_alias=True) if isinstance(d, BaseModel) else d for d in document]
    return _encode(document, 0, indent) + "\n"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if not math.isfinite(value) else format(value, f".{SIGNIFICANT_DIGITS}g")
    return str(value)


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
