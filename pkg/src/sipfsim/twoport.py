"""Exact complex two-port algebra on ABCD (chain) matrices.

Entries may be complex scalars or equal-shaped complex numpy arrays
(one entry per frequency point), so a whole sweep cascades in one call.
All functions are pure; values are immutable and safe to share across
sweep workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, UsageError, ValidationError

# Tolerances for the algebraic identities, fixed here for the whole package.
TOL_RECIPROCITY = 1e-9   # relative, on a*d - b*c = 1
TOL_ASSOCIATIVITY = 1e-12  # relative, elementwise on cascade regrouping


class _OpenCircuit:
    """Distinguished open-circuit termination marker."""

    def __repr__(self):
        return "OPEN"


#: Pass as ``z_load`` to get the analytic a/c limit instead of a large number.
OPEN = _OpenCircuit()


def _check_finite(name, *values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValidationError(f"{name}: non-finite entry")


@dataclass(frozen=True)
class TwoPortABCD:
    """Chain matrix [[a, b], [c, d]]; b in ohm, c in siemens."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        _check_finite("TwoPortABCD", self.a, self.b, self.c, self.d)

    @property
    def determinant(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "TwoPortABCD") -> "TwoPortABCD":
        return TwoPortABCD(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )


IDENTITY = TwoPortABCD(1.0 + 0j, 0j, 0j, 1.0 + 0j)


@dataclass(frozen=True)
class SParams2:
    """Two-port scattering parameters at reference impedance ``z_ref``."""

    s11: complex
    s12: complex
    s21: complex
    s22: complex
    z_ref: float


def cascade(sections) -> TwoPortABCD:
    """Multiply chain matrices in list order (first element nearest the source)."""
    sections = list(sections)
    if not sections:
        raise UsageError("cascade: empty section list")
    total = sections[0]
    for m in sections[1:]:
        total = total @ m
    return total


def abcd_to_sparams(m: TwoPortABCD, z_ref: float) -> SParams2:
    """Standard ABCD -> S conversion at a real positive reference impedance."""
    if not (np.isscalar(z_ref) and np.isfinite(z_ref) and z_ref > 0):
        raise ValidationError(f"abcd_to_sparams: z_ref must be positive, got {z_ref}")
    a, b, c, d = m.a, m.b, m.c, m.d
    den = a + b / z_ref + c * z_ref + d
    if np.any(den == 0):
        raise SingularityError("abcd_to_sparams: degenerate denominator a + b/z0 + c*z0 + d = 0")
    return SParams2(
        s11=(a + b / z_ref - c * z_ref - d) / den,
        s12=2.0 * (a * d - b * c) / den,
        s21=2.0 / den,
        s22=(-a + b / z_ref - c * z_ref + d) / den,
        z_ref=float(z_ref),
    )


def input_impedance(m: TwoPortABCD, z_load) -> complex:
    """Impedance seen at port 1 with port 2 terminated in ``z_load``.

    ``z_load`` may be the OPEN marker, which takes the analytic a/c limit
    (never a large stand-in number, to avoid cancellation near resonances).
    """
    if z_load is OPEN:
        den = m.c
        num = m.a
    else:
        _check_finite("input_impedance: z_load", z_load)
        den = m.c * z_load + m.d
        num = m.a * z_load + m.b
    if np.any(den == 0):
        raise SingularityError("input_impedance: resonant short/open (zero denominator)")
    return num / den
