"""Flat key = value configuration files (SI units).

Material and gas parameters share one file; angles accept an explicit unit
suffix (``delta = 30 deg`` or ``delta = 0.5236 rad``, bare numbers are
radians) because tan-21-degree-style constants invite silent unit bugs.
Unknown keys are rejected, and every parse error carries its line number.
"""

from __future__ import annotations

import math
from dataclasses import fields

import numpy as np

from .materials import GasParams, MaterialParams

__all__ = [
    "ConfigError",
    "read_kv_file",
    "parse_angle",
    "load_parameters",
    "parameters_text",
    "read_symbol_config",
]

ANGLE_KEYS = {"delta"}
MATERIAL_KEYS = {f.name for f in fields(MaterialParams)}
GAS_KEYS = {f.name for f in fields(GasParams)}


class ConfigError(ValueError):
    """Malformed configuration input."""


def read_kv_file(path) -> dict[str, tuple[str, int]]:
    """Parse ``key = value`` lines into {key: (raw value, line number)}.

    Blank lines and ``#`` comments are ignored; duplicate keys are errors.
    """
    entries: dict[str, tuple[str, int]] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key or not value:
                raise ConfigError(f"{path}:{lineno}: empty key or value")
            if key in entries:
                raise ConfigError(
                    f"{path}:{lineno}: duplicate key {key!r} (first on line {entries[key][1]})"
                )
            entries[key] = (value, lineno)
    return entries


def parse_angle(raw: str, where: str = "") -> float:
    """Angle in radians from '<number>', '<number> rad' or '<number> deg'."""
    parts = raw.split()
    try:
        if len(parts) == 1:
            return float(parts[0])
        if len(parts) == 2 and parts[1] in ("rad", "deg"):
            value = float(parts[0])
            return math.radians(value) if parts[1] == "deg" else value
    except ValueError:
        pass
    raise ConfigError(f"{where}: cannot parse angle from {raw!r} (use e.g. '30 deg')")


def load_parameters(path) -> tuple[MaterialParams, GasParams]:
    """Material and gas parameters from one file, defaults filling the gaps.

    Raises:
        ConfigError: On unknown keys, bad numbers or invalid parameter
            combinations, always with the offending line number.
    """
    entries = read_kv_file(path)
    mat_kwargs, gas_kwargs = {}, {}
    for key, (raw, lineno) in entries.items():
        where = f"{path}:{lineno}"
        if key in ANGLE_KEYS:
            mat_kwargs[key] = parse_angle(raw, where)
            continue
        target = mat_kwargs if key in MATERIAL_KEYS else (
            gas_kwargs if key in GAS_KEYS else None
        )
        if target is None:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            target[key] = float(raw)
        except ValueError:
            raise ConfigError(f"{where}: cannot parse number from {raw!r}") from None
    try:
        return MaterialParams(**mat_kwargs), GasParams(**gas_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parameters_text(mat: MaterialParams, gas: GasParams) -> str:
    """Resolved parameters as key = value lines (report provenance block)."""
    lines = []
    for f in fields(MaterialParams):
        value = getattr(mat, f.name)
        if value is not None:
            lines.append(f"{f.name} = {value!r}")
    for f in fields(GasParams):
        lines.append(f"{f.name} = {getattr(gas, f.name)!r}")
    return "\n".join(lines)


def read_symbol_config(path) -> dict:
    """Extended-symbol input: the granular block, wavevector and diffusivity.

    Keys: ``n_matrix`` (rows separated by ';', entries by spaces; complex
    entries use Python syntax like ``1+2j``), ``xi`` (space-separated),
    ``momentum_rows`` (space-separated 0-based indices), ``c``.
    """
    entries = read_kv_file(path)
    required = {"n_matrix", "xi", "momentum_rows", "c"}
    unknown = set(entries) - required
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    missing = required - set(entries)
    if missing:
        raise ConfigError(f"{path}: missing keys {sorted(missing)}")

    raw, lineno = entries["n_matrix"]
    try:
        rows = [
            [complex(token) for token in row.split()]
            for row in raw.split(";")
        ]
        n_matrix = np.array(rows, dtype=complex)
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: cannot parse n_matrix from {raw!r}") from None
    raw, lineno = entries["xi"]
    try:
        xi = np.array([float(tok) for tok in raw.split()])
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: cannot parse xi from {raw!r}") from None
    raw, lineno = entries["momentum_rows"]
    try:
        momentum_rows = tuple(int(tok) for tok in raw.split())
    except ValueError:
        raise ConfigError(
            f"{path}:{lineno}: cannot parse momentum_rows from {raw!r}"
        ) from None
    raw, lineno = entries["c"]
    try:
        c = float(raw)
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: cannot parse c from {raw!r}") from None
    return {"N": n_matrix, "xi": xi, "momentum_rows": momentum_rows, "c": c}
