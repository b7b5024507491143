import math

import numpy as np
import pytest

from sipfsim.elements import C0
from sipfsim.errors import ValidationError
from sipfsim.sipf import (BandTransition, SipfSpec, band_edges,
                          calibrate_section_lengths, dispersion_lhs,
                          filter_response, sipf_abcd)
from sipfsim.results import make_grid

TEMPLATE = SipfSpec(5, 25.0, 120.0, 5e-3, 5e-3, 5.7)


def closed_form_equal_length_edges(spec):
    """First stopband entry/exit for len_lo == len_hi, solved analytically.

    With equal section lengths l, F(theta) = 2cos^2(theta) - A sin^2(theta)
    where theta = k*l; F = -2 gives cos^2(theta) = (A - 2)/(A + 2).
    """
    assert spec.len_lo == spec.len_hi
    big_a = spec.asymmetry + 1.0 / spec.asymmetry
    theta_entry = math.acos(math.sqrt((big_a - 2.0) / (big_a + 2.0)))
    theta_exit = math.pi - theta_entry
    scale = C0 / (2.0 * math.pi * spec.len_lo * math.sqrt(spec.eps_eff))
    return theta_entry * scale, theta_exit * scale


def test_dispersion_closed_form_equal_lengths():
    spec = SipfSpec(5, 25.0, 120.0, 7.5e-3, 7.5e-3, 5.7)
    f_entry, f_exit = closed_form_equal_length_edges(spec)
    edges = band_edges(spec, 0.2e9, f_exit * 1.1)
    entries = [f for f, t in edges if t is BandTransition.STOPBAND_ENTRY]
    exits = [f for f, t in edges if t is BandTransition.STOPBAND_EXIT]
    assert min(abs(f - f_entry) for f in entries) < 1e6
    assert min(abs(f - f_exit) for f in exits) < 1e6


def test_dispersion_value_at_dc():
    assert dispersion_lhs(TEMPLATE, 0.0) == pytest.approx(2.0)


def test_dispersion_array_matches_scalar():
    freqs = np.linspace(1e9, 8e9, 23)
    vec = dispersion_lhs(TEMPLATE, freqs)
    for i, f in enumerate(freqs):
        assert vec[i] == pytest.approx(dispersion_lhs(TEMPLATE, float(f)), rel=1e-13)


def test_calibration_round_trip():
    spec = calibrate_section_lengths(2.6e9, 5.7e9, TEMPLATE)
    edges = band_edges(spec, 1e9, 7e9)
    entries = [f for f, t in edges if t is BandTransition.STOPBAND_ENTRY]
    exits = [f for f, t in edges if t is BandTransition.STOPBAND_EXIT]
    assert min(abs(f - 2.6e9) for f in entries) < 1e6
    assert min(abs(f - 5.7e9) for f in exits) < 1e6


def test_calibration_prefers_smallest_total_length():
    spec = calibrate_section_lengths(2.6e9, 5.7e9, TEMPLATE)
    # the swapped solution solves the same edge equations but is longer
    assert spec.len_lo < spec.len_hi


def test_calibration_random_targets_round_trip():
    rng = np.random.default_rng(17)
    for _ in range(8):
        entry = float(rng.uniform(1.8e9, 3.2e9))
        exit_ = entry * float(rng.uniform(1.6, 2.4))
        spec = calibrate_section_lengths(entry, exit_, TEMPLATE)
        edges = band_edges(spec, 0.5 * entry, 1.2 * exit_)
        entries = [f for f, t in edges if t is BandTransition.STOPBAND_ENTRY]
        exits = [f for f, t in edges if t is BandTransition.STOPBAND_EXIT]
        assert min(abs(f - entry) for f in entries) < 1e6
        assert min(abs(f - exit_) for f in exits) < 1e6


def test_band_edges_alternate_no_asymmetry():
    # alpha = 1 is a uniform line: no stopband, no edges
    uniform = SipfSpec(5, 50.0, 50.0, 5e-3, 5e-3, 5.7)
    assert band_edges(uniform, 1e9, 8e9) == []


def test_band_edges_validates_window():
    with pytest.raises(ValidationError):
        band_edges(TEMPLATE, 5e9, 2e9)


def test_palindromic_chain_is_symmetric():
    # lo-hi-lo-hi-lo reads the same in both directions: a == d
    f = np.linspace(1e9, 7e9, 31)
    m = sipf_abcd(TEMPLATE, f)
    np.testing.assert_allclose(np.asarray(m.a), np.asarray(m.d), rtol=1e-12)


def test_more_sections_deepen_stopband():
    spec5 = calibrate_section_lengths(2.6e9, 5.7e9, TEMPLATE)
    mags = []
    for n in (5, 7, 9):
        spec = SipfSpec(n, spec5.z_lo, spec5.z_hi, spec5.len_lo, spec5.len_hi,
                        spec5.eps_eff)
        resp = filter_response(spec, np.array([4.15e9]))
        mags.append(abs(resp.data["s21"][0]))
    assert mags[0] > mags[1] > mags[2]


def _stopband_skirts(spec, grid):
    """-3 dB crossings adjacent to the deepest attenuation point."""
    s21_db = filter_response(spec, grid).data["s21_db"]
    i = j = int(np.argmin(s21_db))
    while i > 0 and s21_db[i] <= -3.0:
        i -= 1
    while j < grid.size - 1 and s21_db[j] <= -3.0:
        j += 1
    return grid[i], grid[j]


def test_dispersion_consistent_with_finite_filter():
    # a long finite chain's -3 dB skirts converge onto the infinite-chain
    # band edges: within 100 MHz by 21 sections, monotonically improving
    spec5 = calibrate_section_lengths(2.6e9, 5.7e9, TEMPLATE)
    grid = make_grid(1.5e9, 6.5e9, 1e6)
    errs = []
    for n in (9, 15, 21):
        spec = SipfSpec(n, spec5.z_lo, spec5.z_hi, spec5.len_lo, spec5.len_hi,
                        spec5.eps_eff)
        entry, exit_ = _stopband_skirts(spec, grid)
        errs.append(max(abs(entry - 2.6e9), abs(exit_ - 5.7e9)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 100e6


def test_filter_response_rejects_bad_grid():
    with pytest.raises(ValidationError):
        filter_response(TEMPLATE, np.array([2e9, 1e9]))
    with pytest.raises(ValidationError):
        filter_response(TEMPLATE, np.array([]))


def test_spec_validation():
    with pytest.raises(ValidationError):
        SipfSpec(4, 25.0, 120.0, 5e-3, 5e-3, 5.7)   # even section count
    with pytest.raises(ValidationError):
        SipfSpec(5, 120.0, 25.0, 5e-3, 5e-3, 5.7)   # z_lo > z_hi
    with pytest.raises(ValidationError):
        SipfSpec(5, 25.0, 120.0, 0.0, 5e-3, 5.7)    # zero length


def test_total_length_counts_sections():
    spec = SipfSpec(5, 25.0, 120.0, 4e-3, 10e-3, 5.7)
    assert spec.total_length == pytest.approx(3 * 4e-3 + 2 * 10e-3)
