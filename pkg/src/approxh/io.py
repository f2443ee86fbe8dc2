"""Reading and writing matrices and reports.

Sign matrices are stored as plain text, one row per line, ``+`` for +1 and
``-`` for -1, ``\\n`` line endings and nothing else. JSON reports use the
shortest round-trip decimal for floats and the string ``"inf"`` for infinite
values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

_SIGN = {"+": 1, "-": -1}


def is_sign_matrix(M) -> bool:
    M = np.asarray(M)
    return M.ndim == 2 and M.size > 0 and bool(np.all(np.abs(M) == 1))


def format_signs(M) -> str:
    M = np.asarray(M)
    if not is_sign_matrix(M):
        raise InvalidArgument("only ±1 matrices can be written as sign text")
    table = np.where(M > 0, "+", "-")
    return "".join("".join(row) + "\n" for row in table)


def parse_signs(text: str) -> np.ndarray:
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise InvalidArgument("empty sign matrix")
    width = len(lines[0])
    rows = []
    for i, ln in enumerate(lines):
        if len(ln) != width or set(ln) - _SIGN.keys():
            raise InvalidArgument(f"line {i + 1} is not a row of {width} '+'/'-' characters")
        rows.append([_SIGN[c] for c in ln])
    return np.array(rows, dtype=np.int8)


def write_signs(M, path) -> None:
    Path(path).write_text(format_signs(M), newline="\n")


def read_signs(path) -> np.ndarray:
    return parse_signs(Path(path).read_text())


def read_matrix(path) -> np.ndarray:
    """Sign text or comma / whitespace separated numbers, detected from the content."""
    text = Path(path).read_text()
    body = "".join(text.split())
    if body and set(body) <= _SIGN.keys():
        return parse_signs(text)
    rows = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in ln.replace(",", " ").split()])
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse matrix row {ln!r}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidArgument("matrix rows are missing or ragged")
    return np.array(rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj), newline="\n")
