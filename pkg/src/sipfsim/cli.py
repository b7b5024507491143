"""Command-line front end.

The CLI is a thin client of the HTTP service: by default the FastAPI app
is mounted in-process, and ``--server URL`` points the same commands at a
remote instance instead. Exit codes: 0 success, 2 validation, 3
calibration failure, 4 numerical failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .version import __version__

EXIT_CODES = {"validation": 2, "calibration": 3, "numerical": 4}


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app)


def _post(ctx_server, path, payload):
    with _client(ctx_server) as client:
        resp = client.post(path, json=payload)
        body = resp.json()
        if resp.status_code != 200:
            message = body.get("error", f"HTTP {resp.status_code}")
            category = body.get("category", "numerical")
            click.echo(f"error ({category}): {message}", err=True)
            sys.exit(EXIT_CODES.get(category, 4))
        return body


def _write_files(files: dict, out_dir: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(files.items()):
        (out / name).write_text(text)
        click.echo(f"wrote {out / name}")


def _read_config(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error (validation): cannot read config: {exc}", err=True)
        sys.exit(EXIT_CODES["validation"])


@click.group()
@click.version_option(__version__, prog_name="sipfsim")
@click.option("--server", default=None, metavar="URL",
              help="Use a remote service instead of running in-process.")
@click.pass_context
def main(ctx, server):
    """Two-port microwave simulator for Purcell-filtered qubit readout."""
    ctx.obj = server


@main.command()
@click.argument("config", type=click.Path())
@click.option("-o", "--out-dir", default=".", show_default=True,
              help="Directory for output artifacts.")
@click.pass_obj
def run(server, config, out_dir):
    """Run a config file; writes CSV, Touchstone, plot, and manifest."""
    body = _post(server, "/run", {"config": _read_config(config)})
    _write_files(body["files"], out_dir)


def _register_figure(name):
    @main.command(name=name)
    @click.option("-o", "--out-dir", default=".", show_default=True,
                  help="Directory for output artifacts.")
    @click.pass_obj
    def _figure(server, out_dir):
        body = _post(server, f"/figure/{name}", {"config": ""})
        _write_files(body["files"], out_dir)

    _figure.__doc__ = f"Reproduce the {name} dataset and plot."
    return _figure


for _name in ("figure-1c", "figure-1d", "figure-2", "figure-3b"):
    _register_figure(_name)


@main.command("band-edges")
@click.argument("config", type=click.Path())
@click.pass_obj
def band_edges_cmd(server, config):
    """Print the filter's propagating/evanescent band transitions."""
    body = _post(server, "/filter/band-edges", {"config": _read_config(config)})
    click.echo(f"len_lo = {body['len_lo_m'] * 1e3:.4f} mm, "
               f"len_hi = {body['len_hi_m'] * 1e3:.4f} mm, "
               f"total = {body['total_length_m'] * 1e3:.4f} mm")
    for edge in body["edges"]:
        click.echo(f"{edge['frequency_hz'] / 1e9:.6f} GHz  {edge['transition']}")


@main.command()
@click.argument("config", type=click.Path())
@click.pass_obj
def calibrate(server, config):
    """Print the calibrated coupling capacitors and achieved linewidth."""
    body = _post(server, "/scenario/calibrate", {"config": _read_config(config)})
    click.echo(f"c_kappa = {body['c_kappa_f'] * 1e15:.4f} fF")
    click.echo(f"c_q     = {body['c_q_f'] * 1e15:.4f} fF")
    click.echo(f"kappa   = {body['kappa_hz'] / 1e6:.4f} MHz")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
