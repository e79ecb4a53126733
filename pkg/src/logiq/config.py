"""Scenario config: a JSON document validated section by section.

Unknown keys are rejected with the offending field path.  Quantities accept
suffixed literals ("11.33 Mb/s", "25 GB", "45 min"); bare numbers mean bits,
bits/second and seconds.
"""

import json

from .series import ParameterError
from .traffic import VideoUserParams
from .units import UnitError, parse_duration, parse_rate, parse_size


class ConfigError(ValueError):
    """Schema violation; the message carries the field path."""


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _get(obj, key, default, path, convert=None):
    value = obj.get(key, default)
    if convert is None or value is None:
        return value
    try:
        return convert(value)
    except (UnitError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{key}: {exc}") from None


def _auto(convert):
    def inner(value):
        if value == "auto":
            return None
        return convert(value)
    return inner


def load_config(path):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    return parse_config(raw)


def parse_config(raw):
    _check_keys(raw, {"traffic", "queue", "solver", "validation", "sweep",
                      "network", "workers"}, "config")
    cfg = {
        "traffic": _parse_traffic(raw.get("traffic", {})),
        "queue": _parse_queue(raw.get("queue", {})),
        "solver": _parse_solver(raw.get("solver", {})),
        "validation": _parse_validation(raw.get("validation", {})),
        "sweep": _parse_sweep(raw.get("sweep", {})),
        "network": _parse_network(raw.get("network")) if "network" in raw else None,
        "workers": _get(raw, "workers", 1, "config", int),
    }
    if cfg["workers"] < 1:
        raise ConfigError("config.workers: must be >= 1")
    return cfg


def _parse_user_params(obj, path):
    _check_keys(obj, {"packet_size", "burst_size_mean", "burst_size_dispersion",
                      "dispersion_is", "interburst", "interpacket", "interuse",
                      "sessions"}, path)
    kwargs = {}
    if "packet_size" in obj:
        kwargs["packet_size_bits"] = int(_get(obj, "packet_size", None, path, parse_size))
    for key, name in (("burst_size_mean", "burst_size_mean"),
                      ("burst_size_dispersion", "burst_size_dispersion")):
        if key in obj:
            kwargs[name] = _get(obj, key, None, path, float)
    for key, name in (("interburst", "interburst_mean_s"),
                      ("interpacket", "interpacket_mean_s"),
                      ("interuse", "interuse_mean_s")):
        if key in obj:
            kwargs[name] = _get(obj, key, None, path, parse_duration)
    if "dispersion_is" in obj:
        kwargs["dispersion_is"] = obj["dispersion_is"]
    if "sessions" in obj:
        try:
            kwargs["session_lengths"] = tuple(
                (parse_duration(d), float(p)) for d, p in obj["sessions"])
        except (UnitError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.sessions: {exc}") from None
    try:
        return VideoUserParams(**kwargs)
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_traffic(obj):
    path = "config.traffic"
    _check_keys(obj, {"users", "horizon", "dt", "seed", "params", "rate_scale"}, path)
    users = _get(obj, "users", 10, path, int)
    if users < 0:
        raise ConfigError(f"{path}.users: must be >= 0")
    return {
        "users": users,
        "horizon": _get(obj, "horizon", "48 h", path, parse_duration),
        "dt": _get(obj, "dt", "60 s", path, parse_duration),
        "seed": _get(obj, "seed", 0, path, int),
        "params": _parse_user_params(obj.get("params", {}), path + ".params"),
        "rate_scale": _get(obj, "rate_scale", 1.0, path, float),
    }


def _parse_queue(obj):
    path = "config.queue"
    _check_keys(obj, {"mu", "alpha", "q0", "capacity", "gate_h0", "gate_n"}, path)
    return {
        "mu": _get(obj, "mu", None, path, parse_rate),
        "alpha": _get(obj, "alpha", "auto", path, _auto(float)),
        "q0": _get(obj, "q0", 0.0, path, parse_size),
        "capacity": _get(obj, "capacity", None, path, parse_size),
        "gate_h0": _get(obj, "gate_h0", "auto", path, _auto(float)),
        "gate_n": _get(obj, "gate_n", "auto", path, _auto(float)),
    }


def _parse_solver(obj):
    path = "config.solver"
    _check_keys(obj, {"rel_tol", "abs_tol", "max_step", "output_dt"}, path)
    return {
        "rel_tol": _get(obj, "rel_tol", 1e-6, path, float),
        "abs_tol": _get(obj, "abs_tol", 1e-9, path, float),
        "max_step": _get(obj, "max_step", "auto", path, _auto(parse_duration)),
        "output_dt": _get(obj, "output_dt", "auto", path, _auto(parse_duration)),
    }


def _parse_validation(obj):
    path = "config.validation"
    _check_keys(obj, {"sample_dt", "des"}, path)
    return {
        "sample_dt": _get(obj, "sample_dt", "auto", path, _auto(parse_duration)),
        "des": bool(obj.get("des", True)),
    }


def _parse_sweep(obj):
    path = "config.sweep"
    _check_keys(obj, {"rho_targets"}, path)
    targets = obj.get("rho_targets", [0.45, 0.55, 0.65, 0.75, 0.85])
    try:
        targets = [float(v) for v in targets]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.rho_targets: {exc}") from None
    if any(not 0.0 < v < 1.0 for v in targets):
        raise ConfigError(f"{path}.rho_targets: intensities must be in (0, 1)")
    return {"rho_targets": targets}


def _parse_network(obj):
    path = "config.network"
    _check_keys(obj, {"access_mu", "core", "egress_xi", "routing",
                      "packet_size", "flows", "priority_rates",
                      "td_at_core_rate"}, path)
    core = obj.get("core", {})
    _check_keys(core, {"mu", "capacity", "gate_h0", "gate_n"}, path + ".core")
    flows = obj.get("flows", {})
    _check_keys(flows, {"users_per_flow", "target_rate", "horizon", "dt",
                        "seed", "warmup", "full_generation", "params"},
                path + ".flows")
    try:
        access_mu = [parse_rate(v) for v in obj["access_mu"]]
        egress_xi = [parse_rate(v) for v in obj["egress_xi"]]
        routing = [[float(v) for v in row] for row in obj["routing"]]
        priority = [parse_rate(v) for v in obj.get("priority_rates", [])]
    except KeyError as exc:
        raise ConfigError(f"{path}: missing required key {exc}") from None
    except (UnitError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return {
        "access_mu": access_mu,
        "core_mu": _get(core, "mu", None, path + ".core", parse_rate),
        "core_k": _get(core, "capacity", None, path + ".core", parse_size),
        "core_h0": _get(core, "gate_h0", "auto", path + ".core", _auto(float)),
        "core_n": _get(core, "gate_n", "auto", path + ".core", _auto(float)),
        "egress_xi": egress_xi,
        "routing": routing,
        "packet_size": _get(obj, "packet_size", 1464 * 8, path, parse_size),
        "td_at_core_rate": bool(obj.get("td_at_core_rate", True)),
        "priority_rates": priority,
        "flows": {
            "users_per_flow": _get(flows, "users_per_flow", 10, path + ".flows", int),
            "target_rate": _get(flows, "target_rate", None, path + ".flows", parse_rate),
            "horizon": _get(flows, "horizon", "1 d", path + ".flows", parse_duration),
            "dt": _get(flows, "dt", "60 s", path + ".flows", parse_duration),
            "seed": _get(flows, "seed", 0, path + ".flows", int),
            "warmup": _get(flows, "warmup", 0.0, path + ".flows", parse_duration),
            "full_generation": bool(flows.get("full_generation", False)),
            "params": _parse_user_params(flows.get("params", {}),
                                         path + ".flows.params"),
        },
    }
