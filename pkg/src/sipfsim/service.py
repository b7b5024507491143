"""HTTP service exposing the simulator.

The CLI is a thin client of this app; every computation goes through the
same endpoints whether the app is mounted in-process or served remotely.

Endpoints:
  GET  /health                 liveness and version
  POST /run                    full artifact run for a config document
  POST /figure/{name}          figure presets (figure-1c, -1d, -2, -3b)
  POST /filter/band-edges      dispersion band edges for the config's filter
  POST /filter/response        filter S-parameters over the config's sweep grid
  POST /scenario/calibrate     resolved coupling capacitors and linewidth
  POST /scenario/t1-sweep      lifetime sweep arrays for the config's scenario

Errors carry a JSON body {"error", "category", "field"}; the category maps
onto the CLI exit codes (validation 2, calibration 3, numerical 4).
"""
from __future__ import annotations

import math
from typing import Dict, List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import runner
from .config import build_filter, build_scenario, parse_config, sweep_grid
from .errors import SimulationError
from .purcell import linewidth_kappa, t1_sweep
from .sipf import band_edges, filter_response
from .version import __version__

_HTTP_STATUS = {"validation": 422, "calibration": 409, "numerical": 500}


class ConfigRequest(BaseModel):
    config: str = ""


class RunResponse(BaseModel):
    files: Dict[str, str]


class BandEdge(BaseModel):
    frequency_hz: float
    transition: str


class BandEdgesResponse(BaseModel):
    len_lo_m: float
    len_hi_m: float
    total_length_m: float
    edges: List[BandEdge]


class CalibrationResponse(BaseModel):
    c_kappa_f: float
    c_q_f: float
    kappa_hz: float


class SweepResponse(BaseModel):
    """Sweep arrays; non-finite samples (unbounded lifetimes) come as null."""

    frequencies_hz: List[float]
    data: Dict[str, List[Optional[float]]]
    annotations: Dict[int, str]


def _clean(values):
    return [float(v) if math.isfinite(v) else None for v in values]


class HealthResponse(BaseModel):
    status: str
    version: str


app = FastAPI(title="sipfsim", version=__version__)


@app.exception_handler(SimulationError)
async def _simulation_error(request: Request, exc: SimulationError):
    body = {"error": str(exc), "category": exc.category,
            "field": getattr(exc, "field", None)}
    return JSONResponse(status_code=_HTTP_STATUS.get(exc.category, 500), content=body)


@app.get("/health", response_model=HealthResponse)
async def health():
    return HealthResponse(status="ok", version=__version__)


@app.post("/run", response_model=RunResponse)
async def run_endpoint(req: ConfigRequest):
    cfg = parse_config(req.config)
    return RunResponse(files=runner.run(cfg))


@app.post("/figure/{name}", response_model=RunResponse)
async def figure_endpoint(name: str, req: Optional[ConfigRequest] = None):
    preset = runner.FIGURE_PRESETS.get(name)
    if preset is None:
        return JSONResponse(status_code=404, content={
            "error": f"unknown figure preset {name!r}",
            "category": "validation",
            "field": None,
        })
    return RunResponse(files=preset())


@app.post("/filter/band-edges", response_model=BandEdgesResponse)
async def band_edges_endpoint(req: ConfigRequest):
    cfg = parse_config(req.config)
    spec = build_filter(cfg)
    f = cfg["scenario"]["filter"]
    edges = band_edges(spec, 0.25 * f["stopband_entry"], 1.3 * f["stopband_exit"])
    return BandEdgesResponse(
        len_lo_m=spec.len_lo, len_hi_m=spec.len_hi,
        total_length_m=spec.total_length,
        edges=[BandEdge(frequency_hz=fr, transition=t.value) for fr, t in edges])


@app.post("/filter/response", response_model=SweepResponse)
async def filter_response_endpoint(req: ConfigRequest):
    cfg = parse_config(req.config)
    spec = build_filter(cfg)
    sweep = filter_response(spec, sweep_grid(cfg))
    data = {"s11_re": _clean(sweep.data["s11"].real),
            "s11_im": _clean(sweep.data["s11"].imag),
            "s21_re": _clean(sweep.data["s21"].real),
            "s21_im": _clean(sweep.data["s21"].imag),
            "s21_db": _clean(sweep.data["s21_db"])}
    return SweepResponse(frequencies_hz=list(sweep.frequencies), data=data,
                         annotations=sweep.annotations)


@app.post("/scenario/calibrate", response_model=CalibrationResponse)
async def calibrate_endpoint(req: ConfigRequest):
    cfg = parse_config(req.config)
    sc = build_scenario(cfg)
    return CalibrationResponse(c_kappa_f=sc.readout.c_kappa, c_q_f=sc.readout.c_q,
                               kappa_hz=linewidth_kappa(sc))


@app.post("/scenario/t1-sweep", response_model=SweepResponse)
async def t1_sweep_endpoint(req: ConfigRequest):
    cfg = parse_config(req.config)
    sc = build_scenario(cfg)
    sweep = t1_sweep(sc, sweep_grid(cfg),
                     include_intrinsic=cfg["outputs"]["include_intrinsic"],
                     workers=cfg["outputs"]["workers"])
    return SweepResponse(frequencies_hz=list(sweep.frequencies),
                         data={k: _clean(v) for k, v in sweep.data.items()},
                         annotations=sweep.annotations)
