import numpy as np
import pytest

from sipfsim.elements import TLineSpec, tline_abcd
from sipfsim.errors import SingularityError, UsageError, ValidationError
from sipfsim.twoport import (IDENTITY, OPEN, TwoPortABCD, abcd_to_sparams,
                             cascade, input_impedance)

RNG = np.random.default_rng(20260823)


def random_line(rng=RNG):
    return TLineSpec(
        z0=float(rng.uniform(5, 200)),
        eps_eff=float(rng.uniform(1, 12)),
        length=float(rng.uniform(1e-4, 5e-2)),
        r_per_len=float(rng.uniform(0, 1e-1)),
        tan_delta=float(rng.uniform(0, 0.05)),
    )


def test_identity_is_neutral():
    m = tline_abcd(random_line(), 5e9)
    left = IDENTITY @ m
    right = m @ IDENTITY
    for attr in "abcd":
        assert getattr(left, attr) == pytest.approx(getattr(m, attr))
        assert getattr(right, attr) == pytest.approx(getattr(m, attr))


def test_cascade_empty_is_usage_error():
    with pytest.raises(UsageError):
        cascade([])


def test_nonfinite_entries_rejected():
    with pytest.raises(ValidationError):
        TwoPortABCD(float("nan"), 0j, 0j, 1.0)
    with pytest.raises(ValidationError):
        TwoPortABCD(1.0, complex("inf"), 0j, 1.0)


def test_matched_line_sparams_oracle():
    # a line at its own reference impedance: s11 = 0, s21 = exp(-gamma*l)
    line = TLineSpec(50.0, 4.0, 8e-3)
    f = 3e9
    sp = abcd_to_sparams(tline_abcd(line, f), 50.0)
    beta = 2 * np.pi * f * np.sqrt(4.0) / 299_792_458.0
    assert abs(sp.s11) < 1e-12
    assert sp.s21 == pytest.approx(np.exp(-1j * beta * line.length), abs=1e-12)


def test_quarter_wave_transformer_oracle():
    # z_in = z0^2 / z_load at the quarter-wave frequency
    z0, z_load = 70.0, 30.0
    f = 5e9
    length = 299_792_458.0 / np.sqrt(2.25) / (4 * f)
    line = TLineSpec(z0, 2.25, length)
    z_in = input_impedance(tline_abcd(line, f), z_load)
    assert z_in == pytest.approx(z0 * z0 / z_load, rel=1e-9)


def test_input_impedance_open_termination():
    line = TLineSpec(50.0, 6.0, 3e-3)
    f = 2e9
    m = tline_abcd(line, f)
    z_open = input_impedance(m, OPEN)
    assert z_open == pytest.approx(m.a / m.c, rel=1e-12)


def test_singular_conversion_detected():
    # a + b/z0 + c*z0 + d = 0 for this (non-reciprocal) matrix
    m = TwoPortABCD(1.0 + 0j, 0j, 0j, -1.0 + 0j)
    with pytest.raises(SingularityError):
        abcd_to_sparams(m, 50.0)


def test_sparams_z_ref_validated():
    m = tline_abcd(random_line(), 1e9)
    with pytest.raises(ValidationError):
        abcd_to_sparams(m, -50.0)


def test_cascade_matches_manual_product():
    rng = np.random.default_rng(7)
    lines = [random_line(rng) for _ in range(4)]
    f = 4.2e9
    ms = [tline_abcd(ln, f) for ln in lines]
    total = cascade(ms)
    manual = ms[0] @ ms[1] @ ms[2] @ ms[3]
    for attr in "abcd":
        assert getattr(total, attr) == pytest.approx(getattr(manual, attr), rel=1e-12)


def test_reciprocity_of_line_cascades():
    rng = np.random.default_rng(11)
    for _ in range(50):
        lines = [random_line(rng) for _ in range(rng.integers(1, 5))]
        f = float(rng.uniform(1e8, 1e10))
        det = cascade(tline_abcd(ln, f) for ln in lines).determinant
        assert det == pytest.approx(1.0, abs=1e-9)


def test_vectorized_matches_scalar():
    line = random_line(np.random.default_rng(3))
    freqs = np.linspace(1e9, 9e9, 17)
    mv = tline_abcd(line, freqs)
    for i, f in enumerate(freqs):
        ms = tline_abcd(line, float(f))
        assert np.asarray(mv.a)[i] == pytest.approx(ms.a, rel=1e-13)
        assert np.asarray(mv.b)[i] == pytest.approx(ms.b, rel=1e-13)
