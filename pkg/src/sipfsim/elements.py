"""Physical circuit elements rendered as ABCD sections at a given frequency.

Covers lossy transmission lines, lumped reactances (wirebonds, coupling
capacitors), open shunt stubs, and the quasi-static CPW geometry model.
Frequencies may be scalars or numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .twoport import TwoPortABCD

#: Vacuum speed of light, m/s.
C0 = 299_792_458.0


@dataclass(frozen=True)
class TLineSpec:
    """Transmission-line segment: impedance, permittivity, length, loss."""

    z0: float                 # ohm
    eps_eff: float            # effective relative permittivity
    length: float             # m
    r_per_len: float = 0.0    # ohm/m, series conductor resistance
    tan_delta: float = 0.0    # dielectric loss tangent

    def __post_init__(self):
        if not (self.z0 > 0):
            raise ValidationError(f"TLineSpec: z0 must be > 0, got {self.z0}")
        if not (self.eps_eff >= 1):
            raise ValidationError(f"TLineSpec: eps_eff must be >= 1, got {self.eps_eff}")
        if self.length < 0:
            raise ValidationError(f"TLineSpec: negative length {self.length}")
        if self.r_per_len < 0 or self.tan_delta < 0:
            raise ValidationError("TLineSpec: loss parameters must be >= 0")

    @property
    def phase_velocity(self):
        return C0 / math.sqrt(self.eps_eff)


@dataclass(frozen=True)
class CpwGeometry:
    """Coplanar waveguide cross-section: center width w, gap s, substrate."""

    center_width: float   # m
    gap_width: float      # m
    substrate_eps_r: float

    def __post_init__(self):
        if self.center_width <= 0 or self.gap_width <= 0:
            raise ValidationError("CpwGeometry: widths must be > 0")
        if self.substrate_eps_r < 1:
            raise ValidationError("CpwGeometry: substrate_eps_r must be >= 1")

    @property
    def modulus(self):
        """k = w/(w + 2s), strictly inside (0, 1) for valid geometry."""
        return self.center_width / (self.center_width + 2.0 * self.gap_width)


class LumpedKind(enum.Enum):
    SERIES_INDUCTOR = "series-inductor"
    SERIES_CAPACITOR = "series-capacitor"
    SERIES_RESISTOR = "series-resistor"
    SHUNT_INDUCTOR = "shunt-inductor"
    SHUNT_CAPACITOR = "shunt-capacitor"
    SHUNT_RESISTOR = "shunt-resistor"


@dataclass(frozen=True)
class LumpedElement:
    kind: LumpedKind
    value: float  # H, F or ohm

    def __post_init__(self):
        if not (self.value > 0):
            raise ValidationError(f"LumpedElement: value must be > 0, got {self.value}")


def _check_freq(f):
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)) or not np.all(f > 0):
        raise ValidationError("frequency must be finite and > 0")
    return f if f.ndim else float(f)


def propagation_constant(spec: TLineSpec, f):
    """gamma = alpha_c + alpha_d + j*beta for the low-frequency loss model."""
    f = _check_freq(f)
    beta = 2.0 * np.pi * f * math.sqrt(spec.eps_eff) / C0
    alpha = spec.r_per_len / (2.0 * spec.z0) + beta * spec.tan_delta / 2.0
    return alpha + 1j * beta


def tline_abcd(spec: TLineSpec, f) -> TwoPortABCD:
    """ABCD of a (possibly lossy) line section at frequency ``f`` (Hz)."""
    gl = propagation_constant(spec, f) * spec.length
    ch = np.cosh(gl)
    sh = np.sinh(gl)
    return TwoPortABCD(a=ch, b=spec.z0 * sh, c=sh / spec.z0, d=ch)


def lumped_impedance(el: LumpedElement, f):
    """Branch impedance Z(f) of the element, ignoring series/shunt placement."""
    f = _check_freq(f)
    w = 2.0 * np.pi * f
    k = el.kind
    if k in (LumpedKind.SERIES_INDUCTOR, LumpedKind.SHUNT_INDUCTOR):
        return 1j * w * el.value
    if k in (LumpedKind.SERIES_CAPACITOR, LumpedKind.SHUNT_CAPACITOR):
        return 1.0 / (1j * w * el.value)
    return el.value + 0j * w  # resistor; 0j*w keeps array shape


def lumped_abcd(el: LumpedElement, f) -> TwoPortABCD:
    """Series kinds -> [[1, Z], [0, 1]]; shunt kinds -> [[1, 0], [Y, 1]]."""
    z = lumped_impedance(el, f)
    one = np.ones_like(z)
    zero = np.zeros_like(z)
    if el.kind.value.startswith("series"):
        return TwoPortABCD(a=one, b=z, c=zero, d=one)
    return TwoPortABCD(a=one, b=zero, c=1.0 / z, d=one)


def elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind K(k), by AGM iteration.

    Converges quadratically; relative accuracy better than 1e-12 over
    0 <= k < 1, with the logarithmic divergence returned as a large
    finite value as k -> 1.
    """
    if not (0.0 <= k < 1.0):
        raise ValidationError(f"elliptic_k: modulus must satisfy 0 <= k < 1, got {k}")
    a = 1.0
    b = math.sqrt(1.0 - k * k)
    # quadratic convergence: ~6 iterations suffice; the cap guards against
    # last-ulp oscillation of the stopping test
    for _ in range(60):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = (a + b) / 2.0, math.sqrt(a * b)
    return math.pi / (2.0 * a)


def cpw_characteristics(geom: CpwGeometry):
    """(z0, eps_eff) of a zero-thickness CPW on an infinite substrate.

    Quasi-static conformal-mapping result: eps_eff = (1 + eps_r)/2 and
    z0 = 30*pi/sqrt(eps_eff) * K(k')/K(k) with k = w/(w + 2s).
    """
    k = geom.modulus
    if not (0.0 < k < 1.0):
        raise ValidationError(f"cpw_characteristics: degenerate geometry, k = {k}")
    kp = math.sqrt(1.0 - k * k)
    eps_eff = (1.0 + geom.substrate_eps_r) / 2.0
    z0 = 30.0 * math.pi / math.sqrt(eps_eff) * elliptic_k(kp) / elliptic_k(k)
    return z0, eps_eff


def open_stub_admittance(stub: TLineSpec, f):
    """Input admittance of an open-ended line: Y = tanh(gamma*l)/z0."""
    gl = propagation_constant(stub, f) * stub.length
    return np.tanh(gl) / stub.z0


def open_stub_shunt_abcd(stub: TLineSpec, f) -> TwoPortABCD:
    """Open-circuited stub hung in shunt across the through line.

    Near the quarter-wave frequency the stub admittance diverges and the
    shunt approaches a short circuit; an exact tan singularity at a sampled
    frequency surfaces as a SingularityError from the ABCD constructor.
    """
    y = open_stub_admittance(stub, f)
    one = np.ones_like(y)
    zero = np.zeros_like(y)
    return TwoPortABCD(a=one, b=zero, c=y, d=one)
