# helper/json_helper.py
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from models.errors import ConfigError


def to_jsonable(value: Any) -> Any:
    """
    Converts models, numpy values and tuples into plain JSON types.

    Complex numbers become [real, imag] pairs.
    """
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dump_json(document: Any, indent: int | None = 2) -> str:
    """Stable text form: sorted keys, shortest round-trip floats."""
    separators = (',', ':') if indent is None else (',', ': ')
    return json.dumps(to_jsonable(document), sort_keys=True, indent=indent, separators=separators)


def load_json_document(path: str | Path) -> dict[str, Any]:
    """
    Reads a JSON object from disk.

    Raises:
        ConfigError: the file is missing, is not valid JSON or is not an object.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"cannot read file: {e.strerror}", key_path=str(path)) from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}", key_path=str(path)) from e
    if not isinstance(document, dict):
        raise ConfigError(f"must hold a JSON object, got {type(document).__name__}", key_path=str(path))
    return document
