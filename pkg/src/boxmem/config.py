"""Flat key=value scenario files.

Format: a single ``[scenario]`` section, ``#`` comments, one key per line.
Keys carry their unit in the name (``_um``, ``_ms``, ...) so files diff
cleanly.  An optional ``preset`` key selects the base scenario; remaining
keys override it.
"""

import configparser
from dataclasses import replace

import numpy as np

from .errors import ConfigurationError
from .pipeline import PRESETS, ScenarioConfig

_SCALED = {
    "atoms": ("atoms", int, 1),
    "temperature_uK": ("temperature", float, 1e-6),
    "trap_radius_um": ("trap_radius", float, 1e-6),
    "trap_length_mm": ("trap_length", float, 1e-3),
    "wall_width_um": ("wall_width", float, 1e-6),
    "trap_depth_uK": ("trap_depth", float, 1e-6),
    "gravity_m_s2": ("gravity", float, 1),
    "mode_offset_x_um": ("mode_offset_x", float, 1e-6),
    "mode_offset_y_um": ("mode_offset_y", float, 1e-6),
    "mode_waist_um": ("mode_waist", float, 1e-6),
    "tau_dephase_ms": ("tau_dephase", float, 1e-3),
    "loss_fast_fraction": ("loss_fast_fraction", float, 1),
    "loss_tau_fast_ms": ("loss_tau_fast", float, 1e-3),
    "loss_tau_slow_ms": ("loss_tau_slow", float, 1e-3),
    "grid_extent_um": ("grid_extent", float, 1e-6),
    "grid_resolution": ("grid_resolution", int, 1),
    "kde_bandwidth_um": ("kde_bandwidth", float, 1e-6),
    "dt_us": ("dt", float, 1e-6),
    "seed": ("seed", int, 1),
    "workers": ("workers", int, 1),
}


def parse_scenario_file(path: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str        # unit-suffixed keys are case-sensitive
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"config: parse error in {path}: {exc}") from exc
    if not parser.has_section("scenario"):
        raise ConfigurationError("config: missing [scenario] section")
    items = dict(parser.items("scenario"))

    base_name = items.pop("preset", None)
    if base_name is not None and base_name not in PRESETS:
        raise ConfigurationError(f"preset: unknown preset '{base_name}'")
    cfg = PRESETS[base_name] if base_name else ScenarioConfig()

    t_keys = {k: items.pop(k, None)
              for k in ("t_start_ms", "t_stop_ms", "t_step_ms")}
    overrides = {}
    for key, raw in items.items():
        if key == "wall_model":
            if raw not in ("hard", "soft"):
                raise ConfigurationError("wall_model: must be 'hard' or 'soft'")
            overrides["wall_model"] = raw
            continue
        if key == "spatial":
            if raw not in ("thermal", "uniform"):
                raise ConfigurationError(
                    "spatial: must be 'thermal' or 'uniform'")
            overrides["spatial"] = raw
            continue
        if key == "gravity":
            if raw not in ("on", "off"):
                raise ConfigurationError("gravity: must be 'on' or 'off'")
            overrides["gravity_on"] = raw == "on"
            continue
        if key not in _SCALED:
            raise ConfigurationError(f"config: unknown key '{key}'")
        attr, conv, scale = _SCALED[key]
        try:
            overrides[attr] = conv(raw) * scale if scale != 1 else conv(raw)
        except ValueError as exc:
            raise ConfigurationError(f"{key}: {exc}") from exc

    if any(v is not None for v in t_keys.values()):
        if any(v is None for v in t_keys.values()):
            raise ConfigurationError(
                "times: t_start_ms, t_stop_ms, t_step_ms must be given together")
        try:
            t0, t1, dt = (float(t_keys[k])
                          for k in ("t_start_ms", "t_stop_ms", "t_step_ms"))
        except ValueError as exc:
            raise ConfigurationError(f"times: {exc}") from exc
        if dt <= 0 or t1 < t0:
            raise ConfigurationError("times: need t_step_ms > 0 and stop >= start")
        overrides["times"] = np.arange(t0, t1 + 0.5 * dt, dt) * 1e-3

    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg
