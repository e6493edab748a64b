"""TOML problem files.

A file looks like::

    n = 3
    r0 = 1.0
    sigma = 2.0

    [parameters]
    p = 2
    lambda = 3
    s = 0

    [phi]
    expr = "t^(p-1)"
    # optional; otherwise read off the expression
    profile = { at_zero = [1, 0, 0], at_infinity = [1, 0, 0] }

    [g]
    expr = "t^lambda"

    [f]
    expr = "r^s"          # or "zero"

``phi``, ``g`` and ``f`` may also be given as bare strings.  ``phi`` may be
``{ family = "power_log", p = "p", nu = "nu" }``, the standard
representative with ``phi ~ t^(p-1) log^nu t``; numeric fields of that
table, and ``n``, ``r0`` and ``sigma``, accept constant expressions in the
parameters.  An optional ``[check]`` table holds default ``theorem`` and
``engine`` values.
"""
from __future__ import annotations

import copy
from typing import Mapping, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .asymptotics import AsymptoticProfile, UnsupportedAsymptotics, infer_profile
from .criteria import ProblemSpec
from .families import power_log_phi
from .funcdsl import MonotoneFunction, parse_expression

__all__ = ["SpecFileError", "load_spec_data", "build_spec", "load_spec"]


class SpecFileError(ValueError):
    pass


def load_spec_data(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise SpecFileError(f"{path}: {exc}") from exc


def _number(value, params, what):
    if isinstance(value, bool):
        raise SpecFileError(f"{what} must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        expr = parse_expression(value, params, variables=())
        return float(expr(0.0))
    raise SpecFileError(f"{what} must be a number or a constant expression")


def _table(data, key):
    entry = data.get(key)
    if entry is None:
        raise SpecFileError(f"missing [{key}]")
    if isinstance(entry, str):
        return {"expr": entry}
    if not isinstance(entry, Mapping):
        raise SpecFileError(f"[{key}] must be a string or a table")
    return dict(entry)


def _profile(entry, expr, key):
    if "profile" in entry:
        try:
            return AsymptoticProfile.from_dict(entry["profile"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFileError(f"[{key}] profile needs at_zero and at_infinity triples") from exc
    try:
        return infer_profile(expr)
    except UnsupportedAsymptotics:
        return None


def _function(data, key, params, variables, direction):
    entry = _table(data, key)
    if "family" in entry:
        if key != "phi" or entry["family"] != "power_log":
            raise SpecFileError(f"unknown family {entry['family']!r} for {key}")
        p = _number(entry.get("p"), params, "phi.p")
        nu = _number(entry.get("nu", 0.0), params, "phi.nu")
        return power_log_phi(p, nu)
    text = entry.get("expr")
    if not isinstance(text, str):
        raise SpecFileError(f"[{key}] needs an expr string")
    expr = parse_expression(text, params, variables)
    return MonotoneFunction.from_expression(expr, _profile(entry, expr, key), direction, key)


def build_spec(data: Mapping, overrides: Optional[Mapping[str, float]] = None, name: str = "") -> ProblemSpec:
    """Turn parsed TOML into a :class:`ProblemSpec`; ``overrides`` replace parameters."""
    data = copy.deepcopy(dict(data))
    params = {k: _number(v, {}, f"parameter {k}") for k, v in dict(data.get("parameters", {})).items()}
    for k, v in (overrides or {}).items():
        if k not in params:
            raise SpecFileError(f"cannot vary unknown parameter {k!r}")
        params[k] = float(v)
    phi = _function(data, "phi", params, ("t",), "increasing")
    g = _function(data, "g", params, ("t",), "none")
    f_entry = data.get("f", "zero")
    if f_entry == "zero" or (isinstance(f_entry, Mapping) and f_entry.get("expr") == "zero"):
        f = None
    else:
        f = _function(data, "f", params, ("r", "t"), "none")
    n = _number(data.get("n", 3), params, "n")
    if n != int(n):
        raise SpecFileError("n must be an integer")
    return ProblemSpec(
        n=int(n),
        phi=phi,
        g=g,
        f=f,
        r0=_number(data.get("r0", 1.0), params, "r0"),
        sigma=_number(data.get("sigma", 2.0), params, "sigma"),
        name=name,
    )


def load_spec(path, overrides=None) -> ProblemSpec:
    return build_spec(load_spec_data(path), overrides, name=str(path))
