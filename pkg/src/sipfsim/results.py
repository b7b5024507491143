"""Sweep result container shared by filter and lifetime sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass
class SweepResult:
    """A frequency grid plus per-point quantity arrays.

    ``data`` maps quantity name (``s11``, ``s21``, ``re_y``, ``t1_purcell``,
    ``t1_total``, ...) to an array of the same length as ``frequencies``.
    ``annotations`` maps grid index -> note for points where a network
    singularity was detected; such points never abort a sweep.
    """

    frequencies: np.ndarray
    data: dict = field(default_factory=dict)
    annotations: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        if f.size == 0:
            raise ValidationError("SweepResult: empty frequency grid")
        if np.any(np.diff(f) <= 0):
            raise ValidationError("SweepResult: frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", f)
        for name, arr in self.data.items():
            if len(arr) != f.size:
                raise ValidationError(f"SweepResult: length mismatch for {name!r}")

    def __len__(self):
        return self.frequencies.size


def make_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive uniform grid; endpoints are always sample points."""
    if not (0 < start < stop):
        raise ValidationError(f"grid: need 0 < start < stop, got [{start}, {stop}]")
    if step <= 0:
        raise ValidationError(f"grid: step must be > 0, got {step}")
    n = int(round((stop - start) / step))
    n = max(n, 1)
    grid = start + step * np.arange(n + 1)
    grid[-1] = stop
    return grid
