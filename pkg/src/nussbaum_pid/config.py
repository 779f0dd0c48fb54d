"""JSON run configuration and named presets.

Document layout (every key optional, unknown keys rejected)::

    {
      "robot": {"m1", "m2", "l1", "l2", "lc1", "lc2", "I1", "I2", "gravity", "kappa": [[.,.],[.,.]]},
      "controller": {"kind", "gamma", "k_delta", "alpha", "sigma", "adapt_gain", "zeta0",
                     "network": {"nodes", "center_min", "center_max", "width"}},
      "sim": {"dt", "duration", "q0": [., .], "dq0": [., .], "decimation", "hold"},
      "output": {"csv_path"}
    }

Missing values come from the base preset (the two-link benchmark unless
another preset is chosen).
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from .controller import CONTROLLER_KINDS
from .dynamics import RobotParams
from .simulation import SimConfig


class ConfigError(ValueError):
    pass


class ConfigParseError(ConfigError):
    """Malformed document text."""


class ConfigValidationError(ConfigError):
    """Well-formed document that violates a schema rule or invariant."""


PRESET_KAPPA = {
    "paper": np.eye(2),
    "flip": -np.eye(2),
    "skew": np.diag([0.5, -2.0]),
}

_ROBOT_KEYS = ("m1", "m2", "l1", "l2", "lc1", "lc2", "I1", "I2", "gravity", "kappa")
_CONTROLLER_KEYS = ("kind", "gamma", "k_delta", "alpha", "sigma", "adapt_gain", "zeta0", "network")
_NETWORK_KEYS = ("nodes", "center_min", "center_max", "width")
_SIM_KEYS = ("dt", "duration", "q0", "dq0", "decimation", "hold")
_TOP_KEYS = ("robot", "controller", "sim", "output")


def preset(name: str = "paper") -> SimConfig:
    try:
        kappa = PRESET_KAPPA[name]
    except KeyError:
        raise ConfigValidationError(f"unknown preset {name!r}; choose from {sorted(PRESET_KAPPA)}") from None
    return SimConfig(robot=RobotParams(kappa=kappa.copy()))


def load_document(source: str | Path) -> dict[str, Any]:
    """Read JSON from a path, or from literal text starting with ``{``."""
    if isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"malformed config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigParseError("config must be a JSON object")
    return doc


def _section(doc: dict, key: str, allowed: tuple[str, ...], where: str) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict):
        raise ConfigValidationError(f"{where}{key} must be an object")
    unknown = sorted(set(sec) - set(allowed))
    if unknown:
        raise ConfigValidationError(f"unknown key(s) in {where}{key}: {', '.join(unknown)}")
    return sec


def _number(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigValidationError(f"{name} must be a number, got {v!r}")
    return float(v)


def _integer(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigValidationError(f"{name} must be an integer, got {v!r}")
    return v


def _matrix(v, shape: tuple[int, int], name: str) -> np.ndarray:
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigValidationError(f"{name} must be a numeric matrix") from None
    if a.shape != shape:
        raise ConfigValidationError(f"{name} must have shape {shape}, got {a.shape}")
    return a


def config_from_document(doc: dict[str, Any], base: SimConfig | None = None) -> SimConfig:
    base = preset("paper") if base is None else base
    unknown = sorted(set(doc) - set(_TOP_KEYS))
    if unknown:
        raise ConfigValidationError(f"unknown top-level key(s): {', '.join(unknown)}")

    rob = _section(doc, "robot", _ROBOT_KEYS, "")
    robot_kw = {k: _number(v, f"robot.{k}") for k, v in rob.items() if k != "kappa"}
    if "kappa" in rob:
        robot_kw["kappa"] = _matrix(rob["kappa"], (2, 2), "robot.kappa")
    robot = replace(base.robot, **robot_kw)

    ctl = _section(doc, "controller", _CONTROLLER_KEYS, "")
    net = _section(ctl, "network", _NETWORK_KEYS, "controller.")
    layout_kw: dict[str, Any] = {}
    for k, v in net.items():
        layout_kw[k] = _integer(v, "network.nodes") if k == "nodes" else _number(v, f"network.{k}")
    layout = replace(base.controller.layout, **layout_kw)
    ctl_kw: dict[str, Any] = {"layout": layout}
    for k in ("gamma", "k_delta", "alpha", "sigma", "zeta0"):
        if k in ctl:
            ctl_kw[k] = _number(ctl[k], f"controller.{k}")
    if "adapt_gain" in ctl:
        g = ctl["adapt_gain"]
        if isinstance(g, list):
            ctl_kw["adapt_gain"] = _matrix(g, (layout.nodes, layout.nodes), "controller.adapt_gain")
        else:
            ctl_kw["adapt_gain"] = _number(g, "controller.adapt_gain")
    controller = replace(base.controller, **ctl_kw)
    kind = ctl.get("kind", base.controller_kind)
    if kind not in CONTROLLER_KINDS:
        raise ConfigValidationError(f"controller.kind must be one of {CONTROLLER_KINDS}, got {kind!r}")

    sim = _section(doc, "sim", _SIM_KEYS, "")
    sim_kw: dict[str, Any] = {}
    for k in ("dt", "duration"):
        if k in sim:
            sim_kw[k] = _number(sim[k], f"sim.{k}")
    for k in ("q0", "dq0"):
        if k in sim:
            sim_kw[k] = tuple(_matrix([sim[k]], (1, 2), f"sim.{k}")[0])
    if "decimation" in sim:
        sim_kw["decimation"] = _integer(sim["decimation"], "sim.decimation")
    if "hold" in sim:
        if not isinstance(sim["hold"], bool):
            raise ConfigValidationError("sim.hold must be true or false")
        sim_kw["hold"] = sim["hold"]

    out = _section(doc, "output", ("csv_path",), "")
    if "csv_path" in out and not isinstance(out["csv_path"], str):
        raise ConfigValidationError("output.csv_path must be a string")

    cfg = replace(base, robot=robot, controller=controller, controller_kind=kind, **sim_kw)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigValidationError(str(exc)) from exc
    return cfg


def parse_config(source: str | Path, base: SimConfig | None = None) -> SimConfig:
    return config_from_document(load_document(source), base)


def csv_path_of(doc: dict[str, Any]) -> str | None:
    return doc.get("output", {}).get("csv_path")


def scale_kappa(cfg: SimConfig, factor: float) -> SimConfig:
    return replace(cfg, robot=cfg.robot.with_kappa(cfg.robot.kappa * factor))


def to_document(cfg: SimConfig) -> dict[str, Any]:
    """Inverse of ``config_from_document`` (without the output section)."""
    r, c, lay = cfg.robot, cfg.controller, cfg.controller.layout
    g = np.asarray(c.adapt_gain, dtype=float)
    return {
        "robot": {k: getattr(r, k) for k in _ROBOT_KEYS if k != "kappa"} | {"kappa": r.kappa.tolist()},
        "controller": {
            "kind": cfg.controller_kind, "gamma": c.gamma, "k_delta": c.k_delta, "alpha": c.alpha,
            "sigma": c.sigma, "adapt_gain": g.tolist() if g.ndim else float(g), "zeta0": c.zeta0,
            "network": {k: getattr(lay, k) for k in _NETWORK_KEYS},
        },
        "sim": {
            "dt": cfg.dt, "duration": cfg.duration, "q0": list(map(float, cfg.q0)),
            "dq0": list(map(float, cfg.dq0)), "decimation": int(cfg.decimation), "hold": cfg.hold,
        },
    }

