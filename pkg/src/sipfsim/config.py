"""Run configuration: YAML with mandatory unit suffixes.

Every dimensioned value is written as ``"<number> <unit>"`` (for example
``c_sigma: 70 fF``); bare numbers are rejected for dimensioned keys so a
frequency can never be silently read as Hz when GHz was meant. Purely
dimensionless keys (eps_eff, tan_delta, q_intrinsic, n_sections, ...) take
bare numbers. Unknown keys are errors, never silently ignored. Omitted
keys fall back to the canonical device defaults, so an empty scenario body
of any kind resolves to a fully populated configuration.
"""
from __future__ import annotations

import math
import re
from dataclasses import replace

import yaml

from . import defaults as dflt
from .elements import TLineSpec
from .errors import ConfigError
from .purcell import (QubitSpec, ReadoutSpec, Scenario, ScenarioKind,
                      calibrate_readout)
from .results import make_grid
from .sipf import SipfSpec, calibrate_section_lengths

UNIT_SCALE = {
    "Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9,
    "m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9,
    "F": 1.0, "pF": 1e-12, "fF": 1e-15,
    "H": 1.0, "nH": 1e-9, "pH": 1e-12,
    "ohm": 1.0,
    "ohm/m": 1.0,
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9,
}

DIMENSION_UNITS = {
    "frequency": ("Hz", "kHz", "MHz", "GHz"),
    "length": ("m", "mm", "um", "nm"),
    "capacitance": ("F", "pF", "fF"),
    "inductance": ("H", "nH", "pH"),
    "resistance": ("ohm",),
    "resistance_per_length": ("ohm/m",),
    "time": ("s", "ms", "us", "ns"),
}

#: Base unit used when serializing, per dimension.
BASE_UNIT = {
    "frequency": "Hz", "length": "m", "capacitance": "F",
    "inductance": "H", "resistance": "ohm",
    "resistance_per_length": "ohm/m", "time": "s",
}

QUANTITIES = ("s11", "s21", "re_y", "t1_purcell", "t1_total", "delta")
FORMATS = ("csv", "touchstone", "plot")

_VALUE_RE = re.compile(r"^\s*([-+0-9.eE]+)\s+(\S+)\s*$")


def _parse_dimensioned(path, raw, dimension):
    if not isinstance(raw, str):
        raise ConfigError(
            f"{path}: dimensioned value needs a unit suffix, e.g. \"5 GHz\"; "
            f"got bare {raw!r}", field=path)
    m = _VALUE_RE.match(raw)
    if not m:
        raise ConfigError(f"{path}: cannot parse {raw!r} as '<number> <unit>'", field=path)
    num, unit = m.groups()
    if unit not in DIMENSION_UNITS[dimension]:
        raise ConfigError(
            f"{path}: unit {unit!r} is not a {dimension} unit "
            f"(expected one of {', '.join(DIMENSION_UNITS[dimension])})", field=path)
    try:
        value = float(num)
    except ValueError:
        raise ConfigError(f"{path}: bad number {num!r}", field=path)
    if not math.isfinite(value):
        raise ConfigError(f"{path}: value must be finite", field=path)
    return value * UNIT_SCALE[unit]


def _parse_number(path, raw):
    # YAML 1.1 reads exponents like "1e6" (no dot or sign) as strings;
    # accept them rather than forcing the "1.0e+6" spelling.
    if isinstance(raw, str):
        try:
            return float(raw)
        except ValueError:
            pass
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{path}: expected a bare number, got {raw!r}", field=path)
    return float(raw)


class _Field:
    """Leaf descriptor: dimension (or scalar type) plus its default."""

    def __init__(self, kind, default, choices=None, nullable=False):
        self.kind = kind          # a dimension name, 'number', 'int', 'str', 'list'
        self.default = default    # SI value, or callable(cfg_so_far) for late defaults
        self.choices = choices
        self.nullable = nullable

    def parse(self, path, raw):
        if raw is None and self.nullable:
            return None
        if self.kind in DIMENSION_UNITS:
            return _parse_dimensioned(path, raw, self.kind)
        if self.kind == "number":
            return _parse_number(path, raw)
        if self.kind == "int":
            v = _parse_number(path, raw)
            if v != int(v):
                raise ConfigError(f"{path}: expected an integer, got {raw!r}", field=path)
            return int(v)
        if self.kind == "bool":
            if not isinstance(raw, bool):
                raise ConfigError(f"{path}: expected true or false, got {raw!r}",
                                  field=path)
            return raw
        if self.kind == "str":
            if not isinstance(raw, str):
                raise ConfigError(f"{path}: expected a string, got {raw!r}", field=path)
            if self.choices and raw not in self.choices:
                raise ConfigError(
                    f"{path}: {raw!r} is not one of {', '.join(self.choices)}", field=path)
            return raw
        if self.kind == "list":
            if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
                raise ConfigError(f"{path}: expected a list of strings", field=path)
            bad = [x for x in raw if x not in self.choices]
            if bad:
                raise ConfigError(
                    f"{path}: unknown entries {bad}; allowed: {', '.join(self.choices)}",
                    field=path)
            return list(raw)
        raise AssertionError(self.kind)


_MISSING = object()  # sentinel: calibrate / derive downstream

SCHEMA = {
    "scenario": {
        "kind": _Field("str", ScenarioKind.NO_FILTER.value,
                       choices=tuple(k.value for k in ScenarioKind)),
        "qubit": {
            "c_sigma": _Field("capacitance", dflt.C_SIGMA),
            # absent -> per-kind default; explicit null -> no intrinsic loss
            "q_intrinsic": _Field("number", _MISSING, nullable=True),
        },
        "readout": {
            "f_r": _Field("frequency", dflt.F_RESONATOR),
            "z0": _Field("resistance", 50.0),
            "eps_eff": _Field("number", 5.7),
            "kappa_target": _Field("frequency", dflt.KAPPA_TARGET),
            "c_kappa": _Field("capacitance", _MISSING),  # absent -> calibrated
            "c_q": _Field("capacitance", _MISSING),      # absent -> calibrated
        },
        "filter": {
            "n_sections": _Field("int", dflt.N_SECTIONS),
            "z_lo": _Field("resistance", dflt.Z_LO),
            "z_hi": _Field("resistance", dflt.Z_HI),
            "eps_eff": _Field("number", dflt.FILTER_EPS_EFF),
            "stopband_entry": _Field("frequency", dflt.STOPBAND_ENTRY),
            "stopband_exit": _Field("frequency", dflt.STOPBAND_EXIT),
            "len_lo": _Field("length", _MISSING),  # absent -> calibrated
            "len_hi": _Field("length", _MISSING),
            "branch": _Field("str", _MISSING, choices=("minimal", "swapped")),
        },
        "trace": {
            "length": _Field("length", dflt.TRACE_LENGTH),
            "z0": _Field("resistance", dflt.TRACE_Z0),
            "eps_eff": _Field("number", dflt.TRACE_EPS),
            "tan_delta": _Field("number", dflt.TRACE_TAN_DELTA),
            "r_per_len": _Field("resistance_per_length", dflt.TRACE_R_PER_LEN),
        },
        "stub": {
            "z0": _Field("resistance", 50.0),
            "eps_eff": _Field("number", dflt.FILTER_EPS_EFF),
            "quarter_wave_at": _Field("frequency", dflt.STUB_QUARTER_WAVE_F),
        },
        "bandpass_q": _Field("number", dflt.BANDPASS_LOADED_Q),
        "wirebond_l": _Field("inductance", dflt.WIREBOND_L),
        "z_env": _Field("resistance", dflt.Z_ENV),
    },
    "calibration": {
        "t1_anchor_frequency": _Field("frequency", dflt.T1_ANCHOR[0]),
        "t1_anchor": _Field("time", dflt.T1_ANCHOR[1]),
    },
    "sweep": {
        "start": _Field("frequency", 4e9),
        "stop": _Field("frequency", 7e9),
        "step": _Field("frequency", 1e6),
    },
    "outputs": {
        "quantities": _Field("list", ["s21", "re_y", "t1_purcell", "t1_total"],
                             choices=QUANTITIES),
        "formats": _Field("list", list(FORMATS), choices=FORMATS),
        "include_intrinsic": _Field("bool", True),
        "workers": _Field("int", 1),
    },
}

#: Intrinsic quality factor assumed per scenario kind when not configured.
DEFAULT_Q_INTRINSIC = {
    ScenarioKind.NO_FILTER.value: None,
    ScenarioKind.INTEGRATED_SIPF.value: dflt.Q_INTRINSIC_INTEGRATED,
    ScenarioKind.STANDALONE_SIPF.value: dflt.Q_INTRINSIC_STANDALONE,
    ScenarioKind.QUARTER_WAVE_STUB.value: None,
    ScenarioKind.LOW_Q_BANDPASS.value: None,
}

#: Filter length branch assumed per scenario kind when not configured.
DEFAULT_BRANCH = {
    ScenarioKind.INTEGRATED_SIPF.value: "minimal",
    ScenarioKind.STANDALONE_SIPF.value: "swapped",
}


def _walk(schema, raw, path=""):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path or 'top level'}: expected a mapping, got {raw!r}",
                          field=path)
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(
            f"{path or 'top level'}: unknown key(s) {sorted(unknown)}; "
            f"allowed: {sorted(schema)}", field=path)
    out = {}
    for key, spec in schema.items():
        child_path = f"{path}.{key}" if path else key
        if isinstance(spec, dict):
            out[key] = _walk(spec, raw.get(key), child_path)
        elif key in raw:
            out[key] = spec.parse(child_path, raw[key])
        elif spec.default is _MISSING:
            pass  # resolved later from calibration or per-kind defaults
        else:
            out[key] = spec.default
    return out


def parse_config(text: str) -> dict:
    """YAML text -> resolved configuration dict (SI floats, defaults filled).

    Keys whose defaults depend on the scenario kind or on calibration
    (q_intrinsic, filter branch) are filled here; coupling capacitors and
    filter lengths stay absent when they are to be calibrated at run time.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}")
    if raw is None:
        raw = {}
    cfg = _walk(SCHEMA, raw)

    kind = cfg["scenario"]["kind"]
    qubit = cfg["scenario"]["qubit"]
    if "q_intrinsic" not in qubit:
        qubit["q_intrinsic"] = DEFAULT_Q_INTRINSIC[kind]
    filt = cfg["scenario"]["filter"]
    if "branch" not in filt:
        filt["branch"] = DEFAULT_BRANCH.get(kind, "minimal")
    if ("len_lo" in filt) != ("len_hi" in filt):
        raise ConfigError("scenario.filter: give both len_lo and len_hi or neither",
                          field="scenario.filter")
    ro = cfg["scenario"]["readout"]
    if ("c_kappa" in ro) != ("c_q" in ro):
        raise ConfigError("scenario.readout: give both c_kappa and c_q or neither",
                          field="scenario.readout")
    return cfg


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _emit(schema, cfg, path=""):
    out = {}
    for key, spec in schema.items():
        child_path = f"{path}.{key}" if path else key
        if isinstance(spec, dict):
            out[key] = _emit(spec, cfg.get(key, {}), child_path)
            continue
        if key not in cfg:
            continue
        value = cfg[key]
        if spec.kind in DIMENSION_UNITS and value is not None:
            out[key] = f"{value!r} {BASE_UNIT[spec.kind]}"
        else:
            out[key] = value
    return out


def serialize_config(cfg: dict) -> str:
    """Canonical YAML; parse_config(serialize_config(cfg)) == cfg."""
    return yaml.safe_dump(_emit(SCHEMA, cfg), sort_keys=False, default_flow_style=False)


def build_filter(cfg: dict) -> SipfSpec:
    """Filter spec from the config, calibrating lengths when omitted."""
    f = cfg["scenario"]["filter"]
    template = SipfSpec(f["n_sections"], f["z_lo"], f["z_hi"], 5e-3, 5e-3, f["eps_eff"])
    if "len_lo" in f:
        return replace(template, len_lo=f["len_lo"], len_hi=f["len_hi"])
    spec = calibrate_section_lengths(f["stopband_entry"], f["stopband_exit"], template)
    if f["branch"] == "swapped":
        spec = replace(spec, len_lo=spec.len_hi, len_hi=spec.len_lo)
    return spec


def build_scenario(cfg: dict) -> Scenario:
    """Scenario object from the config, calibrating couplers when omitted."""
    s = cfg["scenario"]
    kind = ScenarioKind(s["kind"])
    qubit = QubitSpec(s["qubit"]["c_sigma"], s["qubit"]["q_intrinsic"])
    ro_cfg = s["readout"]
    readout = ReadoutSpec(
        f_r=ro_cfg["f_r"], z0_res=ro_cfg["z0"], eps_eff_res=ro_cfg["eps_eff"],
        c_kappa=ro_cfg.get("c_kappa", 20e-15), c_q=ro_cfg.get("c_q", 5e-15),
        kappa_target=ro_cfg["kappa_target"])
    base = Scenario(kind=ScenarioKind.NO_FILTER, qubit=qubit, readout=readout,
                    wirebond_l=s["wirebond_l"], z_env=s["z_env"])
    if "c_kappa" not in ro_cfg:
        cal = cfg["calibration"]
        base = calibrate_readout(base, ro_cfg["kappa_target"],
                                 (cal["t1_anchor_frequency"], cal["t1_anchor"]))

    if kind is ScenarioKind.NO_FILTER:
        return base
    if kind is ScenarioKind.INTEGRATED_SIPF:
        return replace(base, kind=kind, filter=build_filter(cfg))
    if kind is ScenarioKind.STANDALONE_SIPF:
        t = s["trace"]
        trace = TLineSpec(t["z0"], t["eps_eff"], t["length"],
                          r_per_len=t["r_per_len"], tan_delta=t["tan_delta"])
        return replace(base, kind=kind, filter=build_filter(cfg), trace=trace)
    if kind is ScenarioKind.QUARTER_WAVE_STUB:
        st = s["stub"]
        length = TLineSpec(st["z0"], st["eps_eff"], 1.0).phase_velocity / (
            4.0 * st["quarter_wave_at"])
        return replace(base, kind=kind,
                       stub=TLineSpec(st["z0"], st["eps_eff"], length))
    return replace(base, kind=kind, bandpass_q=s["bandpass_q"])


def sweep_grid(cfg: dict):
    sw = cfg["sweep"]
    return make_grid(sw["start"], sw["stop"], sw["step"])
