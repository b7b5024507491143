import numpy as np
import pytest

from sipfsim.config import (build_filter, build_scenario, parse_config,
                            serialize_config, sweep_grid)
from sipfsim.errors import ConfigError, ValidationError
from sipfsim.purcell import ScenarioKind


def test_empty_document_resolves_defaults():
    cfg = parse_config("")
    s = cfg["scenario"]
    assert s["kind"] == "no-filter"
    assert s["qubit"]["c_sigma"] == pytest.approx(70e-15)
    assert s["readout"]["f_r"] == pytest.approx(6.42e9)
    assert s["readout"]["kappa_target"] == pytest.approx(7e6)
    assert s["wirebond_l"] == pytest.approx(2e-9)


def test_integrated_defaults_fully_populated():
    cfg = parse_config("scenario:\n  kind: integrated-sipf\n")
    s = cfg["scenario"]
    assert s["filter"]["z_lo"] == 25.0
    assert s["filter"]["z_hi"] == 120.0
    assert s["filter"]["n_sections"] == 5
    assert s["filter"]["eps_eff"] == 5.7
    assert s["trace"]["eps_eff"] == 3.66
    assert s["trace"]["tan_delta"] == 0.0127
    assert s["trace"]["r_per_len"] == pytest.approx(8.7e-3)
    assert s["trace"]["length"] == pytest.approx(10e-3)
    assert s["qubit"]["q_intrinsic"] == pytest.approx(1e6)


def test_standalone_intrinsic_default():
    cfg = parse_config("scenario: {kind: standalone-sipf}")
    assert cfg["scenario"]["qubit"]["q_intrinsic"] == pytest.approx(2.4e6)


def test_missing_unit_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("scenario:\n  trace:\n    length: 10\n")
    assert "unit" in str(err.value)
    assert err.value.field == "scenario.trace.length"


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("scenario:\n  trace_lenght: 10 mm\n")
    assert "unknown" in str(err.value)


def test_wrong_dimension_rejected():
    with pytest.raises(ConfigError):
        parse_config("scenario:\n  readout:\n    f_r: 6.42 fF\n")


def test_unit_conversions():
    cfg = parse_config(
        "scenario:\n  readout: {f_r: 6420 MHz}\n  wirebond_l: 2000 pH\n"
        "  qubit: {c_sigma: 0.07 pF}\n")
    assert cfg["scenario"]["readout"]["f_r"] == pytest.approx(6.42e9)
    assert cfg["scenario"]["wirebond_l"] == pytest.approx(2e-9)
    assert cfg["scenario"]["qubit"]["c_sigma"] == pytest.approx(70e-15)


def test_explicit_null_disables_intrinsic():
    cfg = parse_config("scenario:\n  kind: integrated-sipf\n"
                       "  qubit: {q_intrinsic: null}\n")
    assert cfg["scenario"]["qubit"]["q_intrinsic"] is None


def test_paired_overrides_enforced():
    with pytest.raises(ConfigError):
        parse_config("scenario:\n  readout: {c_kappa: 20 fF}\n")
    with pytest.raises(ConfigError):
        parse_config("scenario:\n  filter: {len_lo: 4 mm}\n")


def test_round_trip_fixed_example():
    text = ("scenario:\n  kind: standalone-sipf\n"
            "  trace: {length: 12.5 mm}\n"
            "sweep: {start: 2 GHz, stop: 6 GHz, step: 0.5 MHz}\n")
    cfg = parse_config(text)
    assert parse_config(serialize_config(cfg)) == cfg


def test_round_trip_randomized():
    rng = np.random.default_rng(41)
    kinds = ["no-filter", "integrated-sipf", "standalone-sipf",
             "quarter-wave-stub", "low-q-bandpass"]
    for _ in range(120):
        body = (
            f"scenario:\n"
            f"  kind: {kinds[rng.integers(len(kinds))]}\n"
            f"  qubit: {{c_sigma: {rng.uniform(10, 200):.6g} fF}}\n"
            f"  readout: {{f_r: {rng.uniform(4, 9):.6g} GHz, "
            f"kappa_target: {rng.uniform(1, 20):.6g} MHz}}\n"
            f"  wirebond_l: {rng.uniform(0, 5):.6g} nH\n"
            f"  trace: {{length: {rng.uniform(1, 30):.6g} mm, "
            f"tan_delta: {rng.uniform(0, 0.05):.6g}}}\n"
            f"sweep: {{start: {rng.uniform(1, 3):.6g} GHz, "
            f"stop: {rng.uniform(5, 9):.6g} GHz, "
            f"step: {rng.uniform(0.5, 20):.6g} MHz}}\n"
        )
        cfg = parse_config(body)
        again = parse_config(serialize_config(cfg))
        assert again == cfg


def test_sweep_grid_rejects_inverted_range():
    cfg = parse_config("sweep: {start: 5 GHz, stop: 5 GHz, step: 1 MHz}")
    with pytest.raises(ValidationError):
        sweep_grid(cfg)


def test_build_filter_calibrates_lengths():
    cfg = parse_config("scenario: {kind: integrated-sipf}")
    spec = build_filter(cfg)
    assert spec.len_lo < spec.len_hi  # minimal-length branch
    cfg2 = parse_config("scenario:\n  kind: integrated-sipf\n"
                        "  filter: {branch: swapped}\n")
    spec2 = build_filter(cfg2)
    assert (spec2.len_lo, spec2.len_hi) == (spec.len_hi, spec.len_lo)


def test_build_filter_explicit_lengths():
    cfg = parse_config("scenario:\n  kind: integrated-sipf\n"
                       "  filter: {len_lo: 4 mm, len_hi: 10 mm}\n")
    spec = build_filter(cfg)
    assert spec.len_lo == pytest.approx(4e-3)
    assert spec.len_hi == pytest.approx(10e-3)


def test_build_scenario_explicit_couplers_skip_calibration():
    cfg = parse_config("scenario:\n  readout: {c_kappa: 21 fF, c_q: 9.7 fF}\n")
    sc = build_scenario(cfg)
    assert sc.readout.c_kappa == pytest.approx(21e-15)
    assert sc.readout.c_q == pytest.approx(9.7e-15)


def test_build_scenario_kinds():
    for kind in ScenarioKind:
        cfg = parse_config(f"scenario:\n  kind: {kind.value}\n"
                           "  readout: {c_kappa: 21 fF, c_q: 9.7 fF}\n")
        sc = build_scenario(cfg)
        assert sc.kind is kind
