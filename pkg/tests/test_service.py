import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from sipfsim.service import app
from sipfsim.version import __version__

CALIBRATED = "  readout: {c_kappa: 21.156 fF, c_q: 9.666 fF}\n"


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "version": __version__}


def test_run_endpoint(client):
    cfg = ("scenario:\n  kind: integrated-sipf\n" + CALIBRATED +
           "sweep: {start: 4 GHz, stop: 7 GHz, step: 50 MHz}\n")
    resp = client.post("/run", json={"config": cfg})
    assert resp.status_code == 200
    files = resp.json()["files"]
    assert "sweep.csv" in files and "manifest.json" in files


def test_validation_error_maps_to_422(client):
    resp = client.post("/run", json={"config": "scenario:\n  bogus: 1\n"})
    assert resp.status_code == 422
    body = resp.json()
    assert body["category"] == "validation"
    assert "bogus" in body["error"]


def test_calibration_error_maps_to_409(client):
    cfg = "calibration: {t1_anchor: 1 ns}\nsweep: {start: 5 GHz, stop: 6 GHz, step: 100 MHz}\n"
    resp = client.post("/scenario/t1-sweep", json={"config": cfg})
    assert resp.status_code == 409
    assert resp.json()["category"] == "calibration"


def test_band_edges_endpoint(client):
    resp = client.post("/filter/band-edges", json={"config": ""})
    assert resp.status_code == 200
    body = resp.json()
    transitions = {(round(e["frequency_hz"] / 1e8), e["transition"])
                   for e in body["edges"]}
    assert (26, "stopband-entry") in transitions
    assert (57, "stopband-exit") in transitions
    assert body["len_lo_m"] < body["len_hi_m"]


def test_filter_response_endpoint(client):
    cfg = "sweep: {start: 4 GHz, stop: 4.5 GHz, step: 100 MHz}\n"
    body = client.post("/filter/response", json={"config": cfg}).json()
    assert len(body["frequencies_hz"]) == 6
    assert set(body["data"]) >= {"s11_re", "s21_re", "s21_db"}


def test_calibrate_endpoint(client):
    body = client.post("/scenario/calibrate", json={"config": ""}).json()
    assert body["kappa_hz"] == pytest.approx(7e6, rel=0.01)
    assert 1e-15 < body["c_kappa_f"] < 1e-13
    assert 1e-15 < body["c_q_f"] < 1e-13


def test_t1_sweep_endpoint(client):
    cfg = ("scenario:\n  kind: no-filter\n" + CALIBRATED +
           "sweep: {start: 4.9 GHz, stop: 5.1 GHz, step: 50 MHz}\n")
    body = client.post("/scenario/t1-sweep", json={"config": cfg}).json()
    assert len(body["frequencies_hz"]) == 5
    assert "t1_purcell" in body["data"]
    t1_5ghz = body["data"]["t1_purcell"][2]
    assert t1_5ghz == pytest.approx(5e-6, rel=0.02)


def test_unknown_figure_is_404(client):
    resp = client.post("/figure/figure-9z", json={"config": ""})
    assert resp.status_code == 404
    assert resp.json()["category"] == "validation"
