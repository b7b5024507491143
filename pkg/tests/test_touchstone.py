import types

import numpy as np
import pytest

from sipfsim.errors import UsageError, ValidationError
from sipfsim.results import SweepResult
from sipfsim.sipf import SipfSpec, filter_response
from sipfsim.touchstone import emit_touchstone, read_touchstone


def sweep_with_sparams(f, s11, s21, s12, s22):
    return SweepResult(np.asarray(f, dtype=float),
                       {"s11": np.asarray(s11), "s21": np.asarray(s21),
                        "s12": np.asarray(s12), "s22": np.asarray(s22)})


def test_single_point_matched_through():
    sweep = sweep_with_sparams([1e9], [0j], [1 + 0j], [1 + 0j], [0j])
    text = emit_touchstone(sweep, 50.0)
    lines = text.strip().splitlines()
    assert lines[0] == "# Hz S RI R 50"
    assert lines[1] == "1e+09 0 0 1 0 1 0 0 0"


def test_empty_sweep_is_usage_error():
    fake = types.SimpleNamespace(frequencies=np.array([]), data={})
    with pytest.raises(UsageError):
        emit_touchstone(fake, 50.0)
    # the result type itself refuses empty grids outright
    with pytest.raises(ValidationError):
        SweepResult(np.array([]), {})


def test_sweep_without_sdata_is_usage_error():
    sweep = SweepResult(np.array([1e9, 2e9]), {"t1_purcell": np.ones(2)})
    with pytest.raises(UsageError):
        emit_touchstone(sweep, 50.0)


def test_comment_header_lines():
    sweep = sweep_with_sparams([1e9], [0j], [1 + 0j], [1 + 0j], [0j])
    text = emit_touchstone(sweep, 50.0, comments=["alpha", "beta"])
    lines = text.splitlines()
    assert lines[0] == "! alpha"
    assert lines[1] == "! beta"
    assert lines[2] == "# Hz S RI R 50"


def test_round_trip_randomized():
    rng = np.random.default_rng(99)
    for _ in range(120):
        n = int(rng.integers(1, 40))
        f = np.sort(rng.uniform(1e8, 2e10, n))
        f = np.unique(f)
        mk = lambda: rng.uniform(-1, 1, f.size) + 1j * rng.uniform(-1, 1, f.size)
        sweep = sweep_with_sparams(f, mk(), mk(), mk(), mk())
        z_ref = float(rng.uniform(10, 100))
        f2, s, z2 = read_touchstone(emit_touchstone(sweep, z_ref))
        assert z2 == pytest.approx(z_ref, rel=1e-5)  # option line uses %g
        np.testing.assert_allclose(f2, f, rtol=1e-8)
        np.testing.assert_allclose(np.abs(s[:, 1, 0]), np.abs(sweep.data["s21"]),
                                   rtol=1e-8, atol=1e-8)
        np.testing.assert_allclose(s[:, 0, 0], sweep.data["s11"],
                                   rtol=1e-7, atol=1e-8)
        np.testing.assert_allclose(s[:, 0, 1], sweep.data["s12"],
                                   rtol=1e-7, atol=1e-8)
        np.testing.assert_allclose(s[:, 1, 1], sweep.data["s22"],
                                   rtol=1e-7, atol=1e-8)


def test_filter_response_round_trip():
    spec = SipfSpec(5, 25.0, 120.0, 4e-3, 10e-3, 5.7)
    grid = np.linspace(1e9, 7e9, 61)
    fr = filter_response(spec, grid)
    f2, s, _ = read_touchstone(emit_touchstone(fr, 50.0))
    np.testing.assert_allclose(np.abs(s[:, 1, 0]), np.abs(fr.data["s21"]),
                               rtol=1e-8, atol=1e-10)


def test_reader_rejects_malformed_documents():
    with pytest.raises(UsageError):
        read_touchstone("")
    with pytest.raises(UsageError):
        read_touchstone("# Hz S MA R 50\n1e9 1 0 0 0 0 0 1 0\n")
    with pytest.raises(UsageError):
        read_touchstone("# Hz S RI R 50\n1e9 1 0\n")
