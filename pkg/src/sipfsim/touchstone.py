"""Two-port Touchstone (.s2p) emission.

Format: ``# Hz S RI R <z_ref>`` option line, one row per frequency with
S11 S21 S12 S22 as real/imaginary pairs, nine significant digits.
"""
from __future__ import annotations

import numpy as np

from .errors import UsageError
from .results import SweepResult


def emit_touchstone(sweep: SweepResult, z_ref: float = 50.0, comments=()) -> str:
    """Render a full two-port sweep as Touchstone text.

    ``sweep.data`` must carry the four complex S-parameter arrays.
    ``comments`` lines (no leading ``!``) are placed before the option line.
    """
    f = np.asarray(sweep.frequencies, dtype=float)
    if f.size == 0:
        raise UsageError("emit_touchstone: empty sweep")
    missing = [k for k in ("s11", "s21", "s12", "s22") if k not in sweep.data]
    if missing:
        raise UsageError(f"emit_touchstone: sweep lacks S-parameter data {missing}")
    cols = [np.broadcast_to(np.asarray(sweep.data[name]), f.shape)
            for name in ("s11", "s21", "s12", "s22")]
    lines = [f"! {c}" for c in comments]
    lines.append(f"# Hz S RI R {z_ref:g}")
    for i in range(f.size):
        row = [f"{f[i]:.9g}"]
        for col in cols:
            v = complex(col[i])
            row.append(f"{v.real:.9g}")
            row.append(f"{v.imag:.9g}")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def read_touchstone(text: str):
    """Parse the subset of Touchstone emitted here; used for round-trip checks.

    Returns (frequencies, s_matrix) with s_matrix shaped (n, 2, 2) indexed
    [point, out, in] so s_matrix[:, 1, 0] is S21.
    """
    freq_scale = None
    z_ref = None
    freqs = []
    rows = []
    for line in text.splitlines():
        line = line.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            toks = line[1:].split()
            if len(toks) < 5 or toks[1].upper() != "S" or toks[2].upper() != "RI":
                raise UsageError(f"read_touchstone: unsupported option line {line!r}")
            freq_scale = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}[toks[0].upper()]
            z_ref = float(toks[4])
            continue
        vals = [float(t) for t in line.split()]
        if len(vals) != 9:
            raise UsageError(f"read_touchstone: expected 9 columns, got {len(vals)}")
        freqs.append(vals[0])
        rows.append(vals[1:])
    if freq_scale is None or not freqs:
        raise UsageError("read_touchstone: no option line or no data")
    f = np.asarray(freqs) * freq_scale
    raw = np.asarray(rows)
    s = np.empty((f.size, 2, 2), dtype=complex)
    s[:, 0, 0] = raw[:, 0] + 1j * raw[:, 1]   # S11
    s[:, 1, 0] = raw[:, 2] + 1j * raw[:, 3]   # S21
    s[:, 0, 1] = raw[:, 4] + 1j * raw[:, 5]   # S12
    s[:, 1, 1] = raw[:, 6] + 1j * raw[:, 7]   # S22
    return f, s, z_ref
