"""Strict JSON scenario files.

A scenario has five optional sections: ``path``, ``vehicle``, ``controller``,
``simulation`` and ``output``. Every omitted key takes its default; every
unknown key is an error that names the key. :func:`to_dict` emits the fully
resolved form, which loads back to an equal configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from .controller import ControllerConfig, ControllerGains, Mode
from .path_geometry import CurvatureSegment, PathPoint, SegmentKind, TargetPath, builtin_path
from .simulation import Guards, InitialState, ScenarioConfig
from .vehicle_model import VehicleParams


class ScenarioError(ValueError):
    """A scenario document is malformed or violates a parameter invariant."""


@dataclass(frozen=True)
class OutputOptions:
    svg: bool = False
    decimate: int = 1  # write every n-th sample to timeseries.csv

    def __post_init__(self):
        if isinstance(self.decimate, bool) or not isinstance(self.decimate, int) or self.decimate < 1:
            raise ValueError(f"decimate must be an integer >= 1, got {self.decimate!r}")


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    output: OutputOptions = OutputOptions()


_SECTIONS = ("path", "vehicle", "controller", "simulation", "output")
_VEHICLE_KEYS = tuple(f.name for f in fields(VehicleParams))
_GAIN_KEYS = tuple(f.name for f in fields(ControllerGains))
_INITIAL_KEYS = tuple(f.name for f in fields(InitialState))
_GUARD_KEYS = tuple(f.name for f in fields(Guards))
_SEGMENT_KEYS = ("s_start", "s_end", "kind", "c", "omega", "phi")


def _table(obj: Any, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object, got {type(obj).__name__}")
    return obj


def _reject_unknown(obj: dict, allowed: tuple[str, ...], where: str) -> None:
    for key in obj:
        if key not in allowed:
            name = f"{where}.{key}" if where else key
            raise ScenarioError(f"unknown key {name!r} (allowed: {', '.join(allowed)})")


def _number(obj: dict, key: str, where: str, default: float | None) -> float | None:
    if key not in obj:
        return default
    value = obj[key]
    if value is None and default is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}.{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError(f"{where}.{key}: must be finite")
    return value


def _mode(obj: dict, key: str, where: str, default: Mode) -> Mode:
    if key not in obj:
        return default
    try:
        return Mode(str(obj[key]).lower())
    except ValueError:
        raise ScenarioError(f"{where}.{key}: expected feedforward, mec or direct, "
                            f"got {obj[key]!r}") from None


def _bool(obj: dict, key: str, where: str, default: bool) -> bool:
    if key not in obj:
        return default
    if not isinstance(obj[key], bool):
        raise ScenarioError(f"{where}.{key}: expected true or false, got {obj[key]!r}")
    return obj[key]


def parse_path(source: Any, where: str = "path") -> TargetPath:
    """Parse a path section: ``{"builtin": 1}`` or a segment list with optional origin."""
    if isinstance(source, (int, str)) and not isinstance(source, bool):
        source = {"builtin": source}
    source = _table(source, where)
    _reject_unknown(source, ("builtin", "name", "segments", "origin"), where)
    if "builtin" in source:
        if "segments" in source:
            raise ScenarioError(f"{where}: give either builtin or segments, not both")
        try:
            return builtin_path(source["builtin"])
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{where}.builtin: {exc}") from None
    if "segments" not in source:
        return builtin_path(1)
    if not isinstance(source["segments"], list):
        raise ScenarioError(f"{where}.segments: expected a list")
    segs = []
    for i, rec in enumerate(source["segments"]):
        w = f"{where}.segments[{i}]"
        rec = _table(rec, w)
        _reject_unknown(rec, _SEGMENT_KEYS, w)
        for key in ("s_start", "s_end"):
            if key not in rec:
                raise ScenarioError(f"{w}.{key}: required")
        try:
            kind = SegmentKind.parse(str(rec.get("kind", "zero")))
            segs.append(CurvatureSegment(
                _number(rec, "s_start", w, None), _number(rec, "s_end", w, None), kind,
                _number(rec, "c", w, 0.0), _number(rec, "omega", w, 0.0),
                _number(rec, "phi", w, 0.0)))
        except ValueError as exc:
            raise ScenarioError(f"{w}: {exc}") from None
    origin = _table(source.get("origin", {}), f"{where}.origin")
    _reject_unknown(origin, ("xi", "eta", "theta"), f"{where}.origin")
    point = PathPoint(0.0, _number(origin, "xi", f"{where}.origin", 0.0),
                      _number(origin, "eta", f"{where}.origin", -3.0),
                      _number(origin, "theta", f"{where}.origin", 0.0))
    name = source.get("name", "custom")
    if not isinstance(name, str):
        raise ScenarioError(f"{where}.name: expected a string")
    try:
        return TargetPath(tuple(segs), point, name)
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def from_dict(doc: Any) -> Scenario:
    doc = _table(doc, "scenario")
    _reject_unknown(doc, _SECTIONS, "")
    try:
        path = parse_path(doc.get("path", {"builtin": 1}))

        veh = _table(doc.get("vehicle", {}), "vehicle")
        _reject_unknown(veh, _VEHICLE_KEYS, "vehicle")
        base = VehicleParams()
        plant = VehicleParams(**{k: _number(veh, k, "vehicle", getattr(base, k)) for k in _VEHICLE_KEYS})

        ctl = _table(doc.get("controller", {}), "controller")
        _reject_unknown(ctl, _GAIN_KEYS + ("c_nominal", "mode", "conventional", "shared_curvature"),
                        "controller")
        dflt = ControllerConfig()
        alphas = {k: _number(ctl, k, "controller", getattr(dflt.gains, k))
                  for k in ("alpha1", "alpha2", "alpha3")}
        # k_i default to the fixed multiple of whatever alphas were given
        scaled = ControllerGains.scaled(**alphas)
        gains = ControllerGains(**alphas, **{k: _number(ctl, k, "controller", getattr(scaled, k))
                                             for k in ("k1", "k2", "k3")})
        controller = ControllerConfig(
            gains=gains,
            c_nominal=_number(ctl, "c_nominal", "controller", dflt.c_nominal),
            mode=_mode(ctl, "mode", "controller", dflt.mode),
            conventional=_mode(ctl, "conventional", "controller", dflt.conventional),
            shared_curvature=_bool(ctl, "shared_curvature", "controller", dflt.shared_curvature),
        )

        sim = _table(doc.get("simulation", {}), "simulation")
        _reject_unknown(sim, ("dt", "t_max", "skip_arclength", "initial", "guards"), "simulation")
        ini = _table(sim.get("initial", {}), "simulation.initial")
        _reject_unknown(ini, _INITIAL_KEYS, "simulation.initial")
        ini_d = InitialState()
        initial = InitialState(**{k: _number(ini, k, "simulation.initial", getattr(ini_d, k))
                                  for k in _INITIAL_KEYS})
        grd = _table(sim.get("guards", {}), "simulation.guards")
        _reject_unknown(grd, _GUARD_KEYS, "simulation.guards")
        grd_d = Guards()
        guards = Guards(**{k: _number(grd, k, "simulation.guards", getattr(grd_d, k))
                           for k in _GUARD_KEYS})
        sc_d = ScenarioConfig.__dataclass_fields__
        config = ScenarioConfig(
            path=path, plant=plant, controller=controller, initial=initial,
            dt=_number(sim, "dt", "simulation", sc_d["dt"].default),
            t_max=_number(sim, "t_max", "simulation", None),
            guards=guards,
            skip_arclength=_number(sim, "skip_arclength", "simulation",
                                   sc_d["skip_arclength"].default),
        )

        out = _table(doc.get("output", {}), "output")
        _reject_unknown(out, ("svg", "decimate"), "output")
        decimate = out.get("decimate", 1)
        output = OutputOptions(svg=_bool(out, "svg", "output", False), decimate=decimate)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    return Scenario(config, output)


def load(path: str | Path) -> Scenario:
    """Read a UTF-8 scenario file.

    Raises:
        OSError: the file cannot be read.
        ScenarioError: the content is not a valid scenario.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(doc)


def path_to_dict(path: TargetPath) -> dict:
    o = path.origin
    return {"name": path.name, "segments": path.to_records(),
            "origin": {"xi": o.xi_r, "eta": o.eta_r, "theta": o.theta_r}}


def to_dict(scenario: Scenario) -> dict:
    """Fully resolved scenario, defaults included."""
    cfg = scenario.config
    ctl = cfg.controller
    return {
        "path": path_to_dict(cfg.path),
        "vehicle": {k: getattr(cfg.plant, k) for k in _VEHICLE_KEYS},
        "controller": {
            **{k: getattr(ctl.gains, k) for k in _GAIN_KEYS},
            "c_nominal": ctl.c_nominal,
            "mode": ctl.mode.value,
            "conventional": ctl.conventional.value,
            "shared_curvature": ctl.shared_curvature,
        },
        "simulation": {
            "dt": cfg.dt,
            "t_max": cfg.horizon,
            "skip_arclength": cfg.skip_arclength,
            "initial": {k: getattr(cfg.initial, k) for k in _INITIAL_KEYS},
            "guards": {k: getattr(cfg.guards, k) for k in _GUARD_KEYS},
        },
        "output": {"svg": scenario.output.svg, "decimate": scenario.output.decimate},
    }
