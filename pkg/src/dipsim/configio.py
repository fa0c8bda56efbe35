"""Experiment configuration: YAML loading, validation, normalization.

One config file describes one experiment.  Every physical quantity
carries its unit in the key name (``*_2piMHz``, ``*_mm``, ``*_nH``,
``*_fF``, ``*_2pikHz``); validation happens before any computation and
errors name the offending field.
"""

import copy
import hashlib
import json

import yaml

from .hamiltonian import MAX_L_DENSITY, MAX_L_PURE

EXPERIMENT_KINDS = (
    "coupling-map",
    "fit-dipole",
    "circuit-extract",
    "scan-j2",
    "disorder-scan",
    "ramp",
)


class ConfigError(ValueError):
    pass


def load_config(path):
    with open(path) as fh:
        cfg = yaml.safe_load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a mapping")
    return cfg


def _get(cfg, path, typ, required=True, default=None, minimum=None, maximum=None):
    node = cfg
    parts = path.split(".")
    for key in parts[:-1]:
        node = node.get(key, {}) if isinstance(node, dict) else {}
    if not isinstance(node, dict) or parts[-1] not in node:
        if required:
            raise ConfigError("missing required field %r" % path)
        return default
    value = node[parts[-1]]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if typ is float and isinstance(value, bool):
        raise ConfigError("field %r must be a number, got a boolean" % path)
    if not isinstance(value, typ):
        raise ConfigError(
            "field %r must be %s, got %s" % (path, typ.__name__, type(value).__name__)
        )
    if minimum is not None and value < minimum:
        raise ConfigError("field %r must be >= %r, got %r" % (path, minimum, value))
    if maximum is not None and value > maximum:
        raise ConfigError("field %r must be <= %r, got %r" % (path, maximum, value))
    return value


def _get_list(cfg, path, required=True, default=None):
    value = _get(cfg, path, list, required=required, default=default)
    if value is None:
        return default
    out = []
    for k, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError("field %r[%d] must be a number" % (path, k))
        out.append(float(v))
    return out


def _site_dict(cfg, path, default_angle_deg=90.0):
    return {
        "x_mm": _get(cfg, path + ".x_mm", float, required=False, default=0.0),
        "y_mm": _get(cfg, path + ".y_mm", float, required=False, default=0.0),
        "angle_deg": _get(cfg, path + ".angle_deg", float, required=False, default=default_angle_deg),
        "d_m": _get(cfg, path + ".d_m", float, required=False, default=1.0, minimum=1e-12),
        "phi_deg": _get(cfg, path + ".phi_deg", float, required=False, default=90.0),
    }


def _coupling_model_block(cfg, prefix, require_cavity=None):
    enabled = _get(cfg, prefix + ".cavity_enabled", bool, required=False, default=True)
    if require_cavity is not None:
        enabled = require_cavity
    block = {
        "J0_2piMHz_mm3": _get(cfg, prefix + ".J0_2piMHz_mm3", float, required=False, default=50.0),
        "r_m_mm": _get(cfg, prefix + ".r_m_mm", float, required=False, default=0.2, minimum=0.0),
        "g_max_2piMHz": _get(cfg, prefix + ".g_max_2piMHz", float, required=False, default=65.0),
        "Delta_2piMHz": _get(cfg, prefix + ".Delta_2piMHz", float, required=False, default=1500.0),
        "cavity_enabled": enabled,
    }
    if block["cavity_enabled"] and block["Delta_2piMHz"] == 0.0:
        raise ConfigError("field %r.Delta_2piMHz must be nonzero with the cavity enabled" % prefix)
    return block


def _validate_coupling_map(cfg):
    out = {
        "model": _coupling_model_block(cfg, "model"),
        "fixed_site": _site_dict(cfg, "fixed_site"),
        "grid": {
            "x_min_mm": _get(cfg, "grid.x_min_mm", float),
            "x_max_mm": _get(cfg, "grid.x_max_mm", float),
            "y_min_mm": _get(cfg, "grid.y_min_mm", float),
            "y_max_mm": _get(cfg, "grid.y_max_mm", float),
            "resolution": _get(cfg, "grid.resolution", int, required=False, default=81, minimum=2),
        },
        "probe": _site_dict(cfg, "probe"),
    }
    if out["grid"]["x_max_mm"] <= out["grid"]["x_min_mm"]:
        raise ConfigError("field 'grid.x_max_mm' must exceed grid.x_min_mm")
    if out["grid"]["y_max_mm"] <= out["grid"]["y_min_mm"]:
        raise ConfigError("field 'grid.y_max_mm' must exceed grid.y_min_mm")
    return out


def _validate_fit_dipole(cfg):
    samples = _get(cfg, "samples", list)
    if len(samples) < 3:
        raise ConfigError("field 'samples' needs at least 3 entries")
    rows = []
    for k, s in enumerate(samples):
        if not isinstance(s, dict):
            raise ConfigError("field 'samples[%d]' must be a mapping" % k)
        row = {}
        for key, required, default in (
            ("r_mm", True, None),
            ("theta1_deg", False, 90.0),
            ("theta2_deg", False, 90.0),
            ("theta_deg", False, 0.0),
            ("d_a", False, 1.0),
            ("d_b", False, 1.0),
            ("g_a_2piMHz", False, 0.0),
            ("g_b_2piMHz", False, 0.0),
            ("sin_phi_a", False, 1.0),
            ("sin_phi_b", False, 1.0),
            ("length_key", False, 1.0),
            ("J_2piMHz", True, None),
        ):
            if key in s:
                v = s[key]
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ConfigError("field 'samples[%d].%s' must be a number" % (k, key))
                row[key] = float(v)
            elif required:
                raise ConfigError("missing required field 'samples[%d].%s'" % (k, key))
            else:
                row[key] = default
        if row["r_mm"] <= 0:
            raise ConfigError("field 'samples[%d].r_mm' must be positive" % k)
        rows.append(row)
    out = {
        "samples": rows,
        "Delta_2piMHz": _get(cfg, "fixed.Delta_2piMHz", float, required=False, default=0.0),
    }
    curve = cfg.get("emit_curve")
    if curve is not None:
        out["emit_curve"] = {
            "r_min_mm": _get(cfg, "emit_curve.r_min_mm", float, minimum=1e-9),
            "r_max_mm": _get(cfg, "emit_curve.r_max_mm", float),
            "points": _get(cfg, "emit_curve.points", int, required=False, default=200, minimum=2),
        }
    return out


def _validate_circuit_extract(cfg):
    net = {
        "C1_fF": _get(cfg, "network.C1_fF", float, required=False, default=70.0, minimum=0.0),
        "C2_fF": _get(cfg, "network.C2_fF", float, required=False, default=70.0, minimum=0.0),
        "L1_nH": _get(cfg, "network.L1_nH", float, required=False, default=10.0),
        "L2_nH": _get(cfg, "network.L2_nH", float, required=False, default=10.0),
    }
    if net["L1_nH"] <= 0 or net["L2_nH"] <= 0:
        raise ConfigError("field 'network.L1_nH'/'L2_nH' must be positive")
    has_cq = isinstance(cfg.get("network"), dict) and "C_Q_fF" in cfg["network"]
    has_pads = isinstance(cfg.get("network"), dict) and "pads" in cfg["network"]
    if has_cq == has_pads:
        raise ConfigError("network needs exactly one of 'network.C_Q_fF' or 'network.pads'")
    if has_cq:
        net["C_Q_fF"] = _get(cfg, "network.C_Q_fF", float, minimum=0.0)
    else:
        net["pads"] = {
            "separation_mm": _get(cfg, "network.pads.separation_mm", float, minimum=1e-9),
            "a_fF_mm2": _get(cfg, "network.pads.a_fF_mm2", float, minimum=0.0),
            "q2_x_mm": _get(cfg, "network.pads.q2_x_mm", float),
            "q2_y_mm": _get(cfg, "network.pads.q2_y_mm", float),
            "q1_angle_deg": _get(cfg, "network.pads.q1_angle_deg", float, required=False, default=90.0),
            "q2_angle_deg": _get(cfg, "network.pads.q2_angle_deg", float, required=False, default=90.0),
        }
    cavity = {"enabled": _get(cfg, "network.cavity.enabled", bool, required=False, default=False)}
    if cavity["enabled"]:
        cavity.update(
            {
                "C_fF": _get(cfg, "network.cavity.C_fF", float, required=False, default=500.0, minimum=0.0),
                "L_nH": _get(cfg, "network.cavity.L_nH", float, required=False, default=2.0264),
                "C0_fF": _get(cfg, "network.cavity.C0_fF", float, required=False, default=5.0, minimum=0.0),
            }
        )
        if cavity["L_nH"] <= 0:
            raise ConfigError("field 'network.cavity.L_nH' must be positive")
    net["cavity"] = cavity
    sweep = {
        "L1_min_nH": _get(cfg, "sweep.L1_min_nH", float),
        "L1_max_nH": _get(cfg, "sweep.L1_max_nH", float),
        "points": _get(cfg, "sweep.points", int, required=False, default=121, minimum=5),
    }
    if not 0 < sweep["L1_min_nH"] < sweep["L1_max_nH"]:
        raise ConfigError("field 'sweep.L1_min_nH' must satisfy 0 < min < max")
    return {"network": net, "sweep": sweep}


def _scan_common(cfg, seed):
    block = {
        "L": _get(cfg, "scan.L", int, minimum=2, maximum=MAX_L_PURE),
        "j1_2piMHz": _get(cfg, "scan.j1_2piMHz", float),
        "mean_over_j1": _get(cfg, "scan.mean_over_j1", float, required=False, default=0.0),
        "realizations": _get(cfg, "scan.realizations", int, required=False, default=1, minimum=1),
        "master_seed": _get(cfg, "scan.master_seed", int, required=False, default=seed),
    }
    if block["j1_2piMHz"] == 0.0:
        raise ConfigError("field 'scan.j1_2piMHz' must be nonzero")
    if block["L"] % 2:
        raise ConfigError("field 'scan.L' must be even (half-filling sector)")
    return block


def _validate_scan_j2(cfg, seed):
    out = _scan_common(cfg, seed)
    out["j2_over_j1"] = _get_list(cfg, "scan.j2_over_j1")
    if not out["j2_over_j1"]:
        raise ConfigError("field 'scan.j2_over_j1' must be a nonempty list")
    return out


def _validate_disorder_scan(cfg, seed):
    out = _scan_common(cfg, seed)
    axis = _get(cfg, "scan.axis", str, required=False, default="spread_over_j1")
    if axis not in ("spread_over_j1", "j2_over_j1"):
        raise ConfigError("field 'scan.axis' must be 'spread_over_j1' or 'j2_over_j1'")
    out["axis"] = axis
    out["values"] = _get_list(cfg, "scan.values")
    if not out["values"]:
        raise ConfigError("field 'scan.values' must be a nonempty list")
    out["j2_over_j1"] = _get(cfg, "scan.j2_over_j1", float, required=False, default=0.5)
    out["spread_over_j1"] = _get(cfg, "scan.spread_over_j1", float, required=False, default=0.0, minimum=0.0)
    return out


def _validate_ramp(cfg, seed):
    system = {
        "L": _get(cfg, "system.L", int, minimum=2, maximum=MAX_L_DENSITY),
        "j1_2piMHz": _get(cfg, "system.j1_2piMHz", float),
        "j2_over_j1": _get(cfg, "system.j2_over_j1", float, required=False, default=0.5),
    }
    if system["L"] % 2:
        raise ConfigError("field 'system.L' must be even (staggered drive)")
    if system["j1_2piMHz"] == 0.0:
        raise ConfigError("field 'system.j1_2piMHz' must be nonzero")
    schedule = {
        "T_over_j1": _get(cfg, "schedule.T_over_j1", float, required=False, default=350.0),
        "omega_peak_over_j1": _get(cfg, "schedule.omega_peak_over_j1", float, required=False, default=1.0),
        "delta_init_over_j1": _get(cfg, "schedule.delta_init_over_j1", float, required=False, default=3.5),
    }
    if schedule["T_over_j1"] <= 0:
        raise ConfigError("field 'schedule.T_over_j1' must be positive")
    direction = _get(cfg, "noise.decay_direction", str, required=False, default="lower")
    if direction not in ("lower", "raise"):
        raise ConfigError("field 'noise.decay_direction' must be 'lower' or 'raise'")
    noise = {
        "kappa_2pikHz": _get(cfg, "noise.kappa_2pikHz", float, required=False, default=0.0, minimum=0.0),
        "gamma_2pikHz": _get(cfg, "noise.gamma_2pikHz", float, required=False, default=0.0, minimum=0.0),
        "decay_direction": direction,
    }
    disorder = {
        "spread_over_j1": _get(cfg, "disorder.spread_over_j1", float, required=False, default=0.0, minimum=0.0),
        "mean_over_j1": _get(cfg, "disorder.mean_over_j1", float, required=False, default=0.0),
        "realizations": _get(cfg, "disorder.realizations", int, required=False, default=1, minimum=1),
        "master_seed": _get(cfg, "disorder.master_seed", int, required=False, default=seed),
    }
    backend = _get(cfg, "backend", str, required=False, default="auto")
    if backend not in ("auto", "python", "cython"):
        raise ConfigError("field 'backend' must be auto, python, or cython")
    return {
        "system": system,
        "schedule": schedule,
        "noise": noise,
        "disorder": disorder,
        "samples": _get(cfg, "samples", int, required=False, default=41, minimum=2),
        "include_noiseless_reference": _get(
            cfg, "include_noiseless_reference", bool, required=False, default=True
        ),
        "per_realization_files": _get(
            cfg, "per_realization_files", bool, required=False, default=False
        ),
        "backend": backend,
    }


def validate_config(cfg):
    """Validate and normalize a parsed config; returns the resolved form."""
    kind = _get(cfg, "experiment", str)
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            "field 'experiment' must be one of %s, got %r" % (", ".join(EXPERIMENT_KINDS), kind)
        )
    output_dir = _get(cfg, "output_dir", str)
    seed = _get(cfg, "seed", int, required=False, default=0)
    resolved = {"experiment": kind, "output_dir": output_dir, "seed": seed}
    validators = {
        "coupling-map": lambda: _validate_coupling_map(cfg),
        "fit-dipole": lambda: _validate_fit_dipole(cfg),
        "circuit-extract": lambda: _validate_circuit_extract(cfg),
        "scan-j2": lambda: _validate_scan_j2(cfg, seed),
        "disorder-scan": lambda: _validate_disorder_scan(cfg, seed),
        "ramp": lambda: _validate_ramp(cfg, seed),
    }
    resolved[kind.replace("-", "_")] = validators[kind]()
    return resolved


def config_hash(resolved):
    """Stable identity of a resolved config (excludes wall time etc.)."""
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def resolved_copy(resolved):
    return copy.deepcopy(resolved)
