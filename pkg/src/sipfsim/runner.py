"""Executes a resolved configuration and assembles output artifacts.

A run produces a dict of filename -> text content: CSV sweep tables
(frequency first, then quantities in request order, header row carries
units), a Touchstone .s2p for filter responses, a standalone plot script
plus the vector figure it renders, and a JSON manifest with all resolved
parameters, the tool version, and a content hash. Bodies are
deterministic; only the manifest timestamp varies between runs.

Figure presets bundle the sweeps behind the headline plots: the filter
transmission (figure-1c), the integrated-filter lifetime sweep
(figure-1d), the trace-length dip study (figure-2), and the comparison of
protection strategies (figure-3b).
"""
from __future__ import annotations

import datetime
import hashlib
import json
import runpy
import tempfile
from pathlib import Path

import numpy as np

from . import defaults as dflt
from .config import build_filter, build_scenario, parse_config, serialize_config
from .errors import UsageError, ValidationError
from .purcell import Scenario, ScenarioKind, find_dips, lifetime_bandwidth_fom, t1_sweep
from .results import SweepResult, make_grid
from .sipf import filter_response
from .touchstone import emit_touchstone
from .version import __version__

#: Columns emitted per requested quantity: (column name with unit, getter).
_QUANTITY_COLUMNS = {
    "s11": [("s11_re", lambda d: d["s11"].real), ("s11_im", lambda d: d["s11"].imag)],
    "s21": [("s21_re", lambda d: d["s21"].real), ("s21_im", lambda d: d["s21"].imag)],
    "re_y": [("re_y_S", lambda d: d["re_y"])],
    "t1_purcell": [("t1_purcell_s", lambda d: d["t1_purcell"])],
    "t1_total": [("t1_total_s", lambda d: d["t1_total"])],
    "delta": [("delta_Hz", lambda d: d["delta"])],
}

_S_QUANTITIES = ("s11", "s21")


def manifest_hash(cfg: dict) -> str:
    """Content hash over the resolved configuration (sha256 hex)."""
    canonical = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def make_manifest(cfg: dict, extra=None) -> str:
    doc = {
        "tool": "sipfsim",
        "version": __version__,
        "config_hash": manifest_hash(cfg),
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "resolved_config": json.loads(json.dumps(cfg, default=str)),
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def sweep_to_csv(sweep: SweepResult, quantities) -> str:
    """CSV body: frequency column first, quantities in request order.

    Values are written with repr so a re-read round-trips exactly.
    """
    cols = [("frequency_Hz", sweep.frequencies)]
    for q in quantities:
        if q not in _QUANTITY_COLUMNS:
            raise UsageError(f"sweep_to_csv: unknown quantity {q!r}")
        for name, getter in _QUANTITY_COLUMNS[q]:
            if q not in sweep.data:
                raise UsageError(f"sweep_to_csv: sweep lacks quantity {q!r}")
            cols.append((name, np.asarray(getter(sweep.data), dtype=float)))
    lines = [",".join(name for name, _ in cols)]
    for i in range(len(sweep)):
        lines.append(",".join(repr(float(arr[i])) for _, arr in cols))
    return "\n".join(lines) + "\n"


def read_csv(text: str):
    """Inverse of sweep_to_csv: header list plus a column-name -> array dict."""
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    raw = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    return header, {name: raw[:, j] for j, name in enumerate(header)}


def resonance_grid(start, stop, step, f_r, kappa):
    """Uniform grid refined to step/10 within +/- 20 kappa of the resonance."""
    base = make_grid(start, stop, step)
    lo, hi = f_r - 20.0 * kappa, f_r + 20.0 * kappa
    if hi <= start or lo >= stop:
        return base
    fine = make_grid(max(lo, start), min(hi, stop), step / 10.0)
    return np.unique(np.concatenate([base, fine]))


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Regenerates {svg_name} from the CSV tables beside this script."""
import csv
import json
import math
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

PANELS = json.loads(r"""{panels_json}""")
HERE = Path(__file__).resolve().parent

plt.rcParams["svg.hashsalt"] = "sipfsim"
fig, axes = plt.subplots(1, len(PANELS), figsize=(6.0 * len(PANELS), 4.5))
if len(PANELS) == 1:
    axes = [axes]
for ax, panel in zip(axes, PANELS):
    with open(HERE / panel["csv"], newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = [float(r[panel["x"]]) * panel.get("x_scale", 1.0) for r in rows]
    for series in panel["series"]:
        if series["kind"] == "db":
            y = [20.0 * math.log10(math.hypot(float(r[series["re"]]),
                                              float(r[series["im"]])) or 1e-300)
                 for r in rows]
        else:
            y = [float(r[series["col"]]) * series.get("scale", 1.0) for r in rows]
        ax.plot(x, y, label=series["label"], linewidth=1.2)
    if panel.get("log_y"):
        ax.set_yscale("log")
    ax.set_xlabel(panel["x_label"])
    ax.set_ylabel(panel["y_label"])
    ax.grid(True, alpha=0.3)
    if len(panel["series"]) > 1:
        ax.legend()
fig.tight_layout()
fig.savefig(HERE / "{svg_name}", metadata={{"Date": None}})
'''


def make_plot_script(panels, svg_name="plot.svg") -> str:
    return _PLOT_TEMPLATE.format(panels_json=json.dumps(panels), svg_name=svg_name)


def render_plot(files: dict, script_name="plot.py", svg_name="plot.svg") -> str:
    """Run the generated plot script against the in-memory artifacts."""
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        for name, text in files.items():
            (root / name).write_text(text)
        runpy.run_path(str(root / script_name), run_name="__main__")
        return (root / svg_name).read_text()


def _t1_quantity_list(quantities, include_intrinsic):
    wanted = [q for q in quantities if q not in _S_QUANTITIES]
    if not include_intrinsic:
        wanted = [q for q in wanted if q != "t1_total"]
    return wanted


def run(cfg: dict) -> dict:
    """Execute one configuration; returns filename -> text content."""
    out_cfg = cfg["outputs"]
    quantities = list(out_cfg["quantities"])
    scenario = build_scenario(cfg)
    grid = make_grid(cfg["sweep"]["start"], cfg["sweep"]["stop"], cfg["sweep"]["step"])

    notes = []
    s_wanted = [q for q in quantities if q in _S_QUANTITIES]
    if s_wanted and scenario.filter is None:
        notes.append(f"scenario kind {scenario.kind.value!r} has no filter; "
                     f"S-parameter quantities {s_wanted} dropped")
        quantities = [q for q in quantities if q not in _S_QUANTITIES]
        s_wanted = []

    data = {}
    annotations = {}
    if s_wanted:
        fr = filter_response(scenario.filter, grid)
        data.update(fr.data)
        annotations.update(fr.annotations)
    t1_wanted = _t1_quantity_list(quantities, out_cfg["include_intrinsic"])
    if t1_wanted:
        sw = t1_sweep(scenario, grid,
                      include_intrinsic=out_cfg["include_intrinsic"],
                      workers=out_cfg["workers"])
        data.update(sw.data)
        annotations.update(sw.annotations)
    quantities = s_wanted + t1_wanted
    if not quantities:
        raise UsageError("run: nothing to compute for this configuration")
    sweep = SweepResult(grid, data, annotations)

    files = {}
    extra = {
        "scenario": _scenario_summary(scenario),
        "quantities": quantities,
        "notes": notes,
        "annotations": {str(k): v for k, v in sorted(annotations.items())},
    }
    files["manifest.json"] = make_manifest(cfg, extra)
    formats = out_cfg["formats"]
    if "csv" in formats:
        files["sweep.csv"] = sweep_to_csv(sweep, quantities)
    if "touchstone" in formats and s_wanted:
        files["filter.s2p"] = emit_touchstone(
            sweep, 50.0, comments=[f"sipfsim {__version__}",
                                   f"manifest {manifest_hash(cfg)}"])
    if "plot" in formats and "csv" in formats:
        panels = _run_panels(quantities)
        files["plot.py"] = make_plot_script(panels)
        files["plot.svg"] = render_plot(files)
    return files


def _run_panels(quantities):
    panels = []
    if any(q in _S_QUANTITIES for q in quantities):
        series = [{"kind": "db", "re": f"{q}_re", "im": f"{q}_im",
                   "label": f"|{q.upper()}| (dB)"} for q in quantities
                  if q in _S_QUANTITIES]
        panels.append({"csv": "sweep.csv", "x": "frequency_Hz", "x_scale": 1e-9,
                       "x_label": "frequency (GHz)", "y_label": "magnitude (dB)",
                       "series": series})
    t1_series = [{"kind": "raw", "col": f"{q}_s", "scale": 1e6, "label": q}
                 for q in quantities if q.startswith("t1")]
    if t1_series:
        panels.append({"csv": "sweep.csv", "x": "frequency_Hz", "x_scale": 1e-9,
                       "x_label": "frequency (GHz)", "y_label": "T1 (us)",
                       "log_y": True, "series": t1_series})
    if any(q == "re_y" for q in quantities):
        panels.append({"csv": "sweep.csv", "x": "frequency_Hz", "x_scale": 1e-9,
                       "x_label": "frequency (GHz)", "y_label": "Re[Y] (S)",
                       "log_y": True,
                       "series": [{"kind": "raw", "col": "re_y_S", "label": "Re[Y]"}]})
    return panels


def _scenario_summary(sc: Scenario) -> dict:
    out = {
        "kind": sc.kind.value,
        "c_sigma_F": sc.qubit.c_sigma,
        "q_intrinsic": sc.qubit.q_intrinsic,
        "f_r_Hz": sc.readout.f_r,
        "c_kappa_F": sc.readout.c_kappa,
        "c_q_F": sc.readout.c_q,
        "wirebond_l_H": sc.wirebond_l,
        "z_env_ohm": sc.z_env,
    }
    if sc.filter is not None:
        out["filter_len_lo_m"] = sc.filter.len_lo
        out["filter_len_hi_m"] = sc.filter.len_hi
    if sc.trace is not None:
        out["trace_length_m"] = sc.trace.length
    if sc.stub is not None:
        out["stub_length_m"] = sc.stub.length
    return out


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

def _preset_cfg(body: str) -> dict:
    return parse_config(body)


def figure_1c() -> dict:
    """Filter transmission/reflection over 0.05-8 GHz (fabricated geometry)."""
    cfg = _preset_cfg("scenario:\n  kind: standalone-sipf\n"
                      "sweep: {start: 0.05 GHz, stop: 8 GHz, step: 1 MHz}\n"
                      "outputs:\n  quantities: [s11, s21]\n")
    spec = build_filter(cfg)
    grid = make_grid(0.05e9, 8e9, 1e6)
    fr = filter_response(spec, grid)
    files = {"manifest.json": make_manifest(cfg, {"preset": "figure-1c"})}
    files["figure-1c.csv"] = sweep_to_csv(fr, ["s11", "s21"])
    files["figure-1c.s2p"] = emit_touchstone(
        fr, 50.0, comments=[f"sipfsim {__version__}",
                            f"manifest {manifest_hash(cfg)}"])
    panels = [{"csv": "figure-1c.csv", "x": "frequency_Hz", "x_scale": 1e-9,
               "x_label": "frequency (GHz)", "y_label": "magnitude (dB)",
               "series": [
                   {"kind": "db", "re": "s21_re", "im": "s21_im", "label": "|S21| (dB)"},
                   {"kind": "db", "re": "s11_re", "im": "s11_im", "label": "|S11| (dB)"},
               ]}]
    files["plot.py"] = make_plot_script(panels, "figure-1c.svg")
    files["figure-1c.svg"] = render_plot(files, svg_name="figure-1c.svg")
    return files


def figure_1d() -> dict:
    """Lifetime sweep with and without the integrated filter, 4-7 GHz."""
    cfg = _preset_cfg("scenario:\n  kind: integrated-sipf\n"
                      "  qubit: {q_intrinsic: 1.0e+6}\n")
    sc = dflt.default_scenario(ScenarioKind.INTEGRATED_SIPF,
                               q_intrinsic=dflt.Q_INTRINSIC_INTEGRATED)
    sc_nf = dflt.default_scenario(ScenarioKind.NO_FILTER,
                                  q_intrinsic=dflt.Q_INTRINSIC_INTEGRATED)
    grid = resonance_grid(4e9, 7e9, 1e6, sc.readout.f_r, sc.readout.kappa_target)
    sw = t1_sweep(sc, grid)
    sw_nf = t1_sweep(sc_nf, grid)
    sw.data["t1_total_nofilter"] = sw_nf.data["t1_total"]
    files = {"manifest.json": make_manifest(cfg, {"preset": "figure-1d"})}
    cols = [("frequency_Hz", grid),
            ("t1_total_s", sw.data["t1_total"]),
            ("t1_purcell_s", sw.data["t1_purcell"]),
            ("t1_total_nofilter_s", sw_nf.data["t1_total"])]
    files["figure-1d.csv"] = _table_csv(cols)
    panels = [{"csv": "figure-1d.csv", "x": "frequency_Hz", "x_scale": 1e-9,
               "x_label": "frequency (GHz)", "y_label": "T1 (us)", "log_y": True,
               "series": [
                   {"kind": "raw", "col": "t1_total_s", "scale": 1e6,
                    "label": "with filter"},
                   {"kind": "raw", "col": "t1_total_nofilter_s", "scale": 1e6,
                    "label": "no filter"},
               ]}]
    files["plot.py"] = make_plot_script(panels, "figure-1d.svg")
    files["figure-1d.svg"] = render_plot(files, svg_name="figure-1d.svg")
    return files


def figure_2(trace_lengths_mm=(5.0, 10.0, 15.0, 20.0)) -> dict:
    """Standalone-filter lifetime vs PCB trace length; dip-frequency table."""
    cfg = _preset_cfg("scenario:\n  kind: standalone-sipf\n")
    grid = make_grid(1e9, 7e9, 1e6)
    cols = [("frequency_Hz", grid)]
    dip_rows = []
    for mm in trace_lengths_mm:
        sc = dflt.default_scenario(ScenarioKind.STANDALONE_SIPF,
                                   q_intrinsic=dflt.Q_INTRINSIC_STANDALONE,
                                   trace_length=mm * 1e-3)
        sw = t1_sweep(sc, grid)
        cols.append((f"t1_total_{mm:g}mm_s", sw.data["t1_total"]))
        below = [d for d in find_dips(sw, "t1_total", min_prominence=3.0)
                 if d[0] < 4e9]
        dip_f = min(below, key=lambda d: d[1])[0] if below else float("nan")
        dip_rows.append((mm, dip_f))
    files = {"manifest.json": make_manifest(cfg, {"preset": "figure-2"})}
    files["figure-2.csv"] = _table_csv(cols)
    dip_lines = ["trace_length_mm,dip_frequency_Hz"]
    dip_lines += [f"{mm!r},{f!r}" for mm, f in dip_rows]
    files["figure-2-dips.csv"] = "\n".join(dip_lines) + "\n"
    panels = [{"csv": "figure-2.csv", "x": "frequency_Hz", "x_scale": 1e-9,
               "x_label": "frequency (GHz)", "y_label": "T1 (us)", "log_y": True,
               "series": [{"kind": "raw", "col": name, "scale": 1e6,
                           "label": name.replace("t1_total_", "").replace("_s", "")}
                          for name, _ in cols[1:]]}]
    files["plot.py"] = make_plot_script(panels, "figure-2.svg")
    files["figure-2.svg"] = render_plot(files, svg_name="figure-2.svg")
    return files


def figure_3b() -> dict:
    """Purcell bound for competing protection strategies plus band FOM table."""
    cfg = _preset_cfg("scenario:\n  kind: standalone-sipf\n"
                      "outputs: {include_intrinsic: false}\n")
    kinds = [ScenarioKind.NO_FILTER, ScenarioKind.QUARTER_WAVE_STUB,
             ScenarioKind.LOW_Q_BANDPASS, ScenarioKind.STANDALONE_SIPF]
    grid = make_grid(4e9, 7e9, 1e6)
    cols = [("frequency_Hz", grid)]
    fom_rows = []
    for kind in kinds:
        sc = dflt.default_scenario(kind)
        sw = t1_sweep(sc, grid, include_intrinsic=False)
        cols.append((f"t1_purcell_{kind.value}_s", sw.data["t1_purcell"]))
        fom, divergent = lifetime_bandwidth_fom(sc, include_intrinsic=False)
        fom_rows.append((kind.value, fom, divergent))
    files = {"manifest.json": make_manifest(cfg, {"preset": "figure-3b"})}
    files["figure-3b.csv"] = _table_csv(cols)
    fom_lines = ["scenario,fom_us_MHz,divergent"]
    # s*Hz is numerically identical to us*MHz
    fom_lines += [f"{k},{fom!r},{str(d).lower()}" for k, fom, d in fom_rows]
    files["figure-3b-fom.csv"] = "\n".join(fom_lines) + "\n"
    panels = [{"csv": "figure-3b.csv", "x": "frequency_Hz", "x_scale": 1e-9,
               "x_label": "frequency (GHz)", "y_label": "Purcell T1 bound (us)",
               "log_y": True,
               "series": [{"kind": "raw", "col": name, "scale": 1e6,
                           "label": name.replace("t1_purcell_", "").replace("_s", "")}
                          for name, _ in cols[1:]]}]
    files["plot.py"] = make_plot_script(panels, "figure-3b.svg")
    files["figure-3b.svg"] = render_plot(files, svg_name="figure-3b.svg")
    return files


FIGURE_PRESETS = {
    "figure-1c": figure_1c,
    "figure-1d": figure_1d,
    "figure-2": figure_2,
    "figure-3b": figure_3b,
}


def _table_csv(cols) -> str:
    lines = [",".join(name for name, _ in cols)]
    n = len(cols[0][1])
    for i in range(n):
        lines.append(",".join(repr(float(arr[i])) for _, arr in cols))
    return "\n".join(lines) + "\n"
