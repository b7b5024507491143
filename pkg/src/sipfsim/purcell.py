"""Qubit-environment scenarios: admittance at the qubit port, the
Purcell lifetime bound, coupling-capacitor calibration, lifetime sweeps,
dip detection, and the lifetime-bandwidth figure of merit."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .elements import (C0, LumpedElement, LumpedKind, TLineSpec, lumped_abcd,
                       open_stub_shunt_abcd, tline_abcd)
from .errors import (AmbiguousResonanceError, CalibrationError, PassivityError,
                     ValidationError)
from .results import SweepResult, make_grid
from .sipf import SipfSpec, sipf_abcd
from .twoport import OPEN, TwoPortABCD, cascade, input_impedance

#: Real admittance below this floor is treated as a lossless environment
#: (unbounded Purcell lifetime); well under any physically meaningful value.
RE_Y_FLOOR = 1e-30

#: Unbounded-lifetime marker.
UNBOUNDED = math.inf


@dataclass(frozen=True)
class QubitSpec:
    """Transmon as a harmonic oscillator with total capacitance c_sigma."""

    c_sigma: float = 70e-15           # F, shunt + Josephson capacitance
    q_intrinsic: Optional[float] = None  # None = no intrinsic loss

    def __post_init__(self):
        if not (1e-15 < self.c_sigma < 1e-12):
            raise ValidationError(
                f"QubitSpec: c_sigma outside (1 fF, 1 pF) sanity window: {self.c_sigma}")
        if self.q_intrinsic is not None and not (self.q_intrinsic > 0):
            raise ValidationError("QubitSpec: q_intrinsic must be > 0")


@dataclass(frozen=True)
class ReadoutSpec:
    """Half-wave open-open readout resonator plus its coupling capacitors."""

    f_r: float = 6.42e9        # Hz
    z0_res: float = 50.0       # ohm
    eps_eff_res: float = 5.7
    c_kappa: float = 20e-15    # F, feed-end coupler (calibrated)
    c_q: float = 5e-15         # F, qubit-end coupler (calibrated)
    kappa_target: float = 7e6  # Hz, design linewidth (FWHM)

    def __post_init__(self):
        if self.f_r <= 0 or self.z0_res <= 0 or self.eps_eff_res < 1:
            raise ValidationError("ReadoutSpec: bad resonator parameters")
        if self.c_kappa < 0 or self.c_q <= 0:
            raise ValidationError("ReadoutSpec: coupling capacitors must be > 0 (c_kappa may be 0)")

    @property
    def length(self):
        """Half-wave open-open line resonant at f_r."""
        return C0 / math.sqrt(self.eps_eff_res) / (2.0 * self.f_r)

    def line(self) -> TLineSpec:
        return TLineSpec(self.z0_res, self.eps_eff_res, self.length)


class ScenarioKind(enum.Enum):
    NO_FILTER = "no-filter"
    INTEGRATED_SIPF = "integrated-sipf"
    STANDALONE_SIPF = "standalone-sipf"
    QUARTER_WAVE_STUB = "quarter-wave-stub"
    LOW_Q_BANDPASS = "low-q-bandpass"


@dataclass(frozen=True)
class Scenario:
    """Full qubit-environment assembly, terminated in z_env."""

    kind: ScenarioKind
    qubit: QubitSpec
    readout: ReadoutSpec
    filter: Optional[SipfSpec] = None
    stub: Optional[TLineSpec] = None
    bandpass_q: float = 30.0
    trace: Optional[TLineSpec] = None
    wirebond_l: float = 2e-9   # H
    z_env: float = 50.0        # ohm

    def __post_init__(self):
        if self.z_env <= 0:
            raise ValidationError("Scenario: z_env must be > 0")
        if self.kind in (ScenarioKind.INTEGRATED_SIPF, ScenarioKind.STANDALONE_SIPF):
            if self.filter is None:
                raise ValidationError(f"Scenario: {self.kind.value} requires a filter spec")
        if self.kind is ScenarioKind.STANDALONE_SIPF:
            if self.trace is None or self.trace.length <= 0:
                raise ValidationError("Scenario: standalone-sipf requires trace_length > 0")
        if self.kind is ScenarioKind.QUARTER_WAVE_STUB and self.stub is None:
            raise ValidationError("Scenario: quarter-wave-stub requires a stub spec")
        if self.wirebond_l < 0:
            raise ValidationError("Scenario: wirebond inductance must be >= 0")


def _wirebond(sc: Scenario, f):
    return lumped_abcd(LumpedElement(LumpedKind.SERIES_INDUCTOR, sc.wirebond_l), f)


def _bandpass_shunt(sc: Scenario, f) -> TwoPortABCD:
    """Shunt parallel LC at f_r; loaded Q set by the z_env termination."""
    w0 = 2.0 * math.pi * sc.readout.f_r
    c = sc.bandpass_q / (w0 * sc.z_env)
    el_c = 1.0 / (w0 * w0 * c)  # inductance resonant at f_r
    f = np.asarray(f, dtype=float)
    w = 2.0 * np.pi * f
    y = 1j * (w * c - 1.0 / (w * el_c))
    one = np.ones_like(y)
    return TwoPortABCD(a=one, b=np.zeros_like(y), c=y, d=one)


def feed_sections(sc: Scenario, f):
    """ABCD sections between the C_kappa coupler and the z_env termination."""
    kind = sc.kind
    if kind is ScenarioKind.NO_FILTER:
        return []
    if kind is ScenarioKind.INTEGRATED_SIPF:
        out = [sipf_abcd(sc.filter, f)]
        if sc.wirebond_l > 0:
            out.append(_wirebond(sc, f))
        return out
    if kind is ScenarioKind.STANDALONE_SIPF:
        out = []
        if sc.wirebond_l > 0:
            out.append(_wirebond(sc, f))
        out.append(tline_abcd(sc.trace, f))
        if sc.wirebond_l > 0:
            out.append(_wirebond(sc, f))
        out.append(sipf_abcd(sc.filter, f))
        return out
    if kind is ScenarioKind.QUARTER_WAVE_STUB:
        return [open_stub_shunt_abcd(sc.stub, f)]
    if kind is ScenarioKind.LOW_Q_BANDPASS:
        return [_bandpass_shunt(sc, f)]
    raise ValidationError(f"unknown scenario kind {kind!r}")


def env_admittance(sc: Scenario, f):
    """Admittance looking out from the qubit terminals at frequency f (Hz).

    Chain: series C_q -> half-wave resonator -> series C_kappa ->
    scenario feed sections -> z_env. A zero C_kappa detaches the feed
    (open-circuit termination at the resonator's far end).
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValidationError("env_admittance: frequency must be > 0")
    ro = sc.readout
    sections = [
        lumped_abcd(LumpedElement(LumpedKind.SERIES_CAPACITOR, ro.c_q), f),
        tline_abcd(ro.line(), f),
    ]
    if ro.c_kappa > 0:
        sections.append(lumped_abcd(LumpedElement(LumpedKind.SERIES_CAPACITOR, ro.c_kappa), f))
        sections.extend(feed_sections(sc, f))
        z_load = sc.z_env + 0j
    else:
        z_load = OPEN
    z_in = input_impedance(cascade(sections), z_load)
    return 1.0 / z_in


def purcell_t1(y, f, qubit: QubitSpec):
    """Equation-of-motion lifetime bound T1 = C_sigma / Re[Y]."""
    re_y = np.real(y)
    if np.any(re_y < -1e-15):
        raise PassivityError(f"purcell_t1: Re[Y] = {np.min(re_y):.3e} S < 0")
    re_y = np.where(np.asarray(re_y) > RE_Y_FLOOR, re_y, 0.0)
    with np.errstate(divide="ignore"):
        t1 = np.where(re_y > 0, qubit.c_sigma / np.where(re_y > 0, re_y, 1.0), UNBOUNDED)
    return t1 if t1.ndim else float(t1)


def total_t1(t1_purcell, f, qubit: QubitSpec):
    """Combine the Purcell bound with intrinsic loss by rate addition."""
    if qubit.q_intrinsic is None:
        return t1_purcell
    f = np.asarray(f, dtype=float)
    rate_int = 2.0 * np.pi * f / qubit.q_intrinsic
    with np.errstate(divide="ignore"):
        rate_p = np.where(np.isfinite(t1_purcell), 1.0 / np.asarray(t1_purcell), 0.0)
    out = 1.0 / (rate_p + rate_int)
    return out if out.ndim else float(out)


def _re_y_peak(sc: Scenario, f_lo, f_hi, n=4001):
    grid = np.linspace(f_lo, f_hi, n)
    re_y = np.real(env_admittance(sc, grid))
    i = int(np.argmax(re_y))
    return grid, re_y, i


def _half_cross(sc, f_inside, f_outside, half, tol=1e3):
    """Bisect Re[Y](f) = half between a point above and a point below."""
    a, b = f_inside, f_outside
    while abs(b - a) > tol:
        mid = 0.5 * (a + b)
        if float(np.real(env_admittance(sc, mid))) >= half:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def linewidth_kappa(sc: Scenario) -> float:
    """FWHM (Hz) of Re[Y(f)] around the readout resonance.

    Searches f_r +/- 50 * kappa_target; raises AmbiguousResonanceError when
    there is no clear single interior peak (e.g. a detached resonator).
    """
    ro = sc.readout
    half_span = 50.0 * ro.kappa_target
    grid, re_y, i = _re_y_peak(sc, ro.f_r - half_span, ro.f_r + half_span)
    if i == 0 or i == grid.size - 1:
        raise AmbiguousResonanceError("linewidth_kappa: peak at window edge")
    peak = re_y[i]
    if peak <= RE_Y_FLOOR:
        raise AmbiguousResonanceError("linewidth_kappa: no external linewidth (Re[Y] ~ 0)")
    half = peak / 2.0
    below_lo = np.nonzero(re_y[:i] < half)[0]
    below_hi = np.nonzero(re_y[i:] < half)[0]
    if below_lo.size == 0 or below_hi.size == 0:
        raise AmbiguousResonanceError("linewidth_kappa: half-maximum not reached in window")
    f_lo = _half_cross(sc, grid[i], grid[below_lo[-1]], half)
    f_hi = _half_cross(sc, grid[i], grid[i + below_hi[0]], half)
    return f_hi - f_lo


def _bisect_param(eval_fn, target, lo, hi, rel_tol=1e-3, what="calibration"):
    """Monotone-increasing bisection of eval_fn(x) = target on [lo, hi]."""
    v_lo, v_hi = eval_fn(lo), eval_fn(hi)
    if not (min(v_lo, v_hi) <= target <= max(v_lo, v_hi)):
        raise CalibrationError(
            f"{what}: target {target:.4g} outside achievable "
            f"[{min(v_lo, v_hi):.4g}, {max(v_lo, v_hi):.4g}]")
    increasing = v_hi >= v_lo
    for _ in range(200):
        mid = math.sqrt(lo * hi)  # log-space midpoint; brackets span decades
        v = eval_fn(mid)
        if abs(v - target) <= rel_tol * abs(target):
            return mid
        if (v < target) == increasing:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(f"{what}: bisection did not converge")


def calibrate_readout(template: Scenario, kappa_target: float,
                      t1_anchor: tuple) -> Scenario:
    """Fix (C_kappa, C_q) so the no-filter scenario reproduces its observables.

    Stage 1 bisects C_kappa against the linewidth, stage 2 bisects C_q
    against the Purcell T1 at the anchor frequency; one outer refinement
    pass re-runs both and the residual kappa drift must stay under 1%.
    """
    if template.kind is not ScenarioKind.NO_FILTER:
        raise ValidationError("calibrate_readout: template must be the no-filter kind")
    if kappa_target <= 0 or t1_anchor[0] <= 0 or t1_anchor[1] <= 0:
        raise CalibrationError("calibrate_readout: targets must be positive")
    f_anchor, t1_target = t1_anchor
    c_lo, c_hi = 0.1e-15, 100e-15
    sc = template

    def kappa_of(c_kappa, base):
        trial = replace(base, readout=replace(base.readout, c_kappa=c_kappa))
        try:
            return linewidth_kappa(trial)
        except AmbiguousResonanceError:
            # over-coupled probe: resonance pushed out of the search window
            return math.inf

    def t1_of(c_q, base):
        trial = replace(base, readout=replace(base.readout, c_q=c_q))
        # T1 decreases with C_q; bisect on the decay rate, which increases
        return 1.0 / purcell_t1(env_admittance(trial, f_anchor), f_anchor, trial.qubit)

    for _pass in range(2):
        kappa_before = None
        if _pass == 1:
            kappa_before = linewidth_kappa(sc)
        ck = _bisect_param(lambda c: kappa_of(c, sc), kappa_target, c_lo, c_hi,
                           rel_tol=1e-3, what="calibrate_readout stage 1 (kappa)")
        sc = replace(sc, readout=replace(sc.readout, c_kappa=ck))
        if _pass == 1 and kappa_before is not None:
            drift = abs(linewidth_kappa(sc) - kappa_before) / kappa_target
            if drift >= 0.01:
                raise CalibrationError(
                    f"calibrate_readout: kappa drifted {drift:.2%} on the refinement pass")
        cq = _bisect_param(lambda c: t1_of(c, sc), 1.0 / t1_target, c_lo, c_hi,
                           rel_tol=1e-3, what="calibrate_readout stage 2 (t1 anchor)")
        sc = replace(sc, readout=replace(sc.readout, c_q=cq))
    return sc


def _sweep_chunk(sc, freqs, include_intrinsic):
    y = env_admittance(sc, freqs)
    re_y = np.real(y)
    t1p = purcell_t1(y, freqs, sc.qubit)
    out = {"re_y": re_y, "t1_purcell": np.asarray(t1p, dtype=float)}
    if include_intrinsic:
        out["t1_total"] = np.asarray(total_t1(t1p, freqs, sc.qubit), dtype=float)
    return out


def t1_sweep(sc: Scenario, grid, include_intrinsic: bool = True,
             workers: int = 1) -> SweepResult:
    """Per-point admittance -> Purcell bound -> optional intrinsic combination.

    Points evaluate independently; with workers > 1 the grid is split into
    chunks and reassembled in order, so results are identical for any
    worker count.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValidationError("t1_sweep: grid must be non-empty and strictly increasing")
    if workers < 1:
        raise ValidationError("t1_sweep: workers must be >= 1")
    chunks = np.array_split(grid, min(workers * 4, grid.size))
    if workers == 1:
        parts = [_sweep_chunk(sc, c, include_intrinsic) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _sweep_chunk(sc, c, include_intrinsic), chunks))
    data = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    data["delta"] = sc.readout.f_r - grid
    result = SweepResult(grid, data)
    bad = ~np.isfinite(data["t1_purcell"])
    for i in np.nonzero(bad)[0]:
        result.annotations[int(i)] = "unbounded lifetime (lossless or resonant-short point)"
    return result


def _prominence_ratio(v, i):
    """min(left barrier, right barrier) / v[i].

    A barrier is the largest value encountered walking away from the dip
    before reaching a point lower than the dip itself (or the grid edge).
    Nonfinite samples count as infinitely high barriers.
    """
    barriers = []
    for step in (-1, 1):
        barrier = v[i]
        j = i + step
        while 0 <= j < v.size:
            if not np.isfinite(v[j]):
                barrier = math.inf
                break
            if v[j] < v[i]:
                break
            barrier = max(barrier, v[j])
            j += step
        barriers.append(barrier)
    return min(barriers) / v[i] if v[i] > 0 else math.inf


def find_dips(sweep: SweepResult, quantity: str, min_prominence=None):
    """Strict interior local minima, refined by quadratic interpolation.

    ``min_prominence``, when given, drops shallow ripple minima: only dips
    whose surrounding values rise by at least that factor on both sides
    (before a lower point is reached) are kept.
    """
    if quantity not in sweep.data:
        raise ValidationError(f"find_dips: sweep has no quantity {quantity!r}")
    f = sweep.frequencies
    v = np.asarray(sweep.data[quantity], dtype=float)
    dips = []
    for i in range(1, f.size - 1):
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        if not (np.isfinite(y0) and np.isfinite(y1) and np.isfinite(y2)):
            continue
        if y1 < y0 and y1 < y2:
            if min_prominence is not None and _prominence_ratio(v, i) < min_prominence:
                continue
            denom = y0 - 2.0 * y1 + y2
            if denom > 0:
                shift = 0.5 * (y0 - y2) / denom
                f_star = f[i] + shift * (f[i + 1] - f[i])
                v_star = y1 - 0.125 * (y0 - y2) ** 2 / denom
            else:
                f_star, v_star = f[i], y1
            dips.append((float(f_star), float(v_star)))
    return sorted(dips)


def _band_integral(sc, band, include_intrinsic, step):
    grid = make_grid(band[0], band[1], step)
    sweep = t1_sweep(sc, grid, include_intrinsic=include_intrinsic)
    key = "t1_total" if include_intrinsic else "t1_purcell"
    t1 = sweep.data[key]
    finite = np.isfinite(t1)
    unbounded = not bool(finite.all())
    t1_f = np.where(finite, t1, 0.0)
    return float(np.trapezoid(t1_f, grid)), unbounded


def lifetime_bandwidth_fom(sc: Scenario, band=(4.75e9, 5.25e9),
                           include_intrinsic: bool = False):
    """Trapezoidal integral of T1 over the band; value in us*MHz.

    Divergence is flagged when unbounded-lifetime points fall inside the
    band or when halving the grid step grows the integral by more than 2x
    (the value returned is then the refined lower bound).
    """
    if not (0 < band[0] < band[1]):
        raise ValidationError("lifetime_bandwidth_fom: bad band")
    coarse, unb1 = _band_integral(sc, band, include_intrinsic, 1e6)
    fine, unb2 = _band_integral(sc, band, include_intrinsic, 0.5e6)
    divergent = unb1 or unb2 or (fine > 2.0 * coarse)
    return fine, divergent  # s*Hz == us*MHz numerically
