"""Flat ``key = value`` configuration files mirroring ModelParams."""
from __future__ import annotations

import dataclasses
from pathlib import Path

from .errors import DataError
from .trajectory import PRESETS, ModelParams

_FIELDS = {f.name: f for f in dataclasses.fields(ModelParams)}
_CASTS = {"int": int, "float": float, "str": str}


def parse_config(text: str, source="<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError("expected key = value", source, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "preset":
            values[key] = int(value)
            continue
        if key not in _FIELDS:
            raise DataError(f"unknown key {key!r}", source, lineno)
        cast = _CASTS[_FIELDS[key].type]
        try:
            values[key] = cast(value)
        except ValueError:
            raise DataError(f"bad value for {key}: {value!r}", source, lineno) from None
    return values


def params_from_config(values: dict, overrides: dict | None = None) -> ModelParams:
    values = dict(values)
    values.update(overrides or {})
    preset = values.pop("preset", 1960)
    if preset not in PRESETS:
        raise DataError(f"unknown preset {preset}")
    try:
        return PRESETS[preset].with_(**values)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def load_params(path=None, overrides: dict | None = None) -> ModelParams:
    values = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise DataError("file not found", path)
        values = parse_config(path.read_text(), path)
    return params_from_config(values, overrides)


def dump_config(params: ModelParams) -> str:
    return "".join(f"{f} = {getattr(params, f)}\n" for f in _FIELDS)
