"""JSON problem files and bundled example fixtures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionError
from .model import SystemModel

DEFAULT_OPTIONS = {
    "bound_mode": "literal",
    "riccati": "standard",
    "rh_window": 2,
    "max_period": 10,
    "construction_cap": 1000,
    "tolerances": {},
}

FIXTURES = ("small_network", "large_state_space", "duty_cycle", "large_network")


@dataclass
class Problem:
    systems: list
    options: dict = field(default_factory=dict)


def _matrix(obj, where):
    if isinstance(obj, list):
        return np.atleast_2d(np.asarray(obj, dtype=float))
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected {{rows, cols, data}}") from exc
    if len(data) != rows * cols:
        raise DimensionError(f"{where}: {len(data)} entries for a {rows}x{cols} matrix")
    return np.asarray(data, dtype=float).reshape(rows, cols)


def parse_config(obj, overrides=None):
    if not isinstance(obj, dict) or "systems" not in obj:
        raise ConfigError("config needs a 'systems' list")
    opts = dict(DEFAULT_OPTIONS)
    opts.update(obj.get("options", {}) or {})
    opts.update({k: v for k, v in (overrides or {}).items() if v is not None})
    tol = opts.get("tolerances") or {}
    systems = []
    for k, s in enumerate(obj["systems"], start=1):
        sid = s.get("id", k)
        where = f"system {sid}"
        try:
            mats = {m: _matrix(s[m], f"{where}: {m}") for m in ("A", "C", "Q", "R")}
        except KeyError as exc:
            raise ConfigError(f"{where}: missing matrix {exc.args[0]}") from exc
        systems.append(
            SystemModel(
                **mats,
                id=sid,
                riccati=opts["riccati"],
                riccati_tol=float(tol.get("riccati", 1e-12)),
            )
        )
    if not systems:
        raise ConfigError("config has no systems")
    return Problem(systems, opts)


def load_config(path, overrides=None):
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(obj, overrides)


def fixture_path(name):
    if name not in FIXTURES:
        raise ConfigError(f"unknown fixture {name!r}")
    return resources.files("sensorsched") / "fixtures" / f"{name}.json"


def load_fixture(name, overrides=None):
    obj = json.loads(fixture_path(name).read_text())
    return parse_config(obj, overrides)
