"""
Batch front end::

    nesskubo <command> --config <file> [--out <file>] [--format csv|json] [--threads n]

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures or violated assumptions (e.g. degenerate bands).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bloch, kubo, ness, oracles
from .config import COMMANDS, RunConfig, parse_config
from .errors import ConfigError, NessKuboError, NumericalError, SiteRangeError, UnsupportedOperationError
from .lattice import build_field_hamiltonian, build_position
from .spectral import eig_hermitian

logger = logging.getLogger("nesskubo")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _echo(config: RunConfig) -> dict:
    """Inputs that identify a parameter point."""
    th = config.thermo
    row = {"command": config.command, "beta": th.beta, "mu": th.mu, "lambda": th.lam, "E": th.E}
    if config.command in ("ness", "current", "conductivity"):
        lat = config.lattice
        row.update(dimension=lat.dimension, N=lat.half_width, boundary=lat.boundary,
                   potential=config.potential.describe(), direction=config.observable.direction)
    if config.command in ("bands", "bloch-conductivity"):
        row.update(potential=config.potential.describe(), k_points=" ".join(map(str, config.bloch.k_points)),
                   direction=config.observable.direction)
    if config.command == "solvable":
        row.update(dispersion=f"{config.dispersion.kind}({config.dispersion.amplitude:g})")
    return row


def _site(config: RunConfig):
    return tuple(config.observable.site) if config.observable.site is not None else config.lattice.center


def _problem(config: RunConfig) -> bloch.PeriodicProblem:
    pot = config.potential
    periods = pot.periods if pot.kind == "periodic" else (1,) * len(config.bloch.k_points)
    values = pot.values if pot.kind == "periodic" else [0.0]
    kp = config.bloch.k_points
    kp = kp * len(periods) if len(kp) == 1 else kp
    return bloch.PeriodicProblem(periods, values, kp)


def _ness(config):
    lat, ob, th = config.lattice, config.observable, config.thermo
    potential = config.potential.build(lat)
    site = _site(config)
    h, F = ness.equilibrium_operator(lat, potential, th)
    if ob.time is None:
        state = ness.steady_state(lat, potential, th, ob.direction, F=F)
    else:
        hE = build_field_hamiltonian(h, build_position(lat, ob.direction), th.E)
        zero = ness.CovarianceState(np.zeros_like(F))
        state = ness.evolve_covariance(zero, ob.time, eig_hermitian(hE), F, th.lam)
    lo, hi = state.spectrum_bounds
    return [{"site": " ".join(map(str, site)), "time": "inf" if ob.time is None else ob.time,
             "density": state.density(lat.index(site)),
             "j": ness.site_current(state, lat, site, ob.direction, ob.convention),
             "total_density": float(np.real(np.trace(state.R))) / lat.n_sites,
             "R_min_eig": lo, "R_max_eig": hi}]


def _current(config):
    lat, ob = config.lattice, config.observable
    site = _site(config)
    j = ness.steady_current(lat, config.potential.build(lat), config.thermo, site, ob.direction, ob.convention)
    return [{"site": " ".join(map(str, site)), "convention": ob.convention, "j": j}]


def _conductivity(config):
    lat, ob, th = config.lattice, config.observable, config.thermo
    potential = config.potential.build(lat)
    if ob.cell_average:
        sigma = kubo.cell_conductivity(lat, potential, th, ob.direction)
        return [{"site": "cell", "sigma": sigma}]
    site = _site(config)
    sigma = kubo.site_conductivity(lat, potential, th, site, ob.direction)
    return [{"site": " ".join(map(str, site)), "sigma": sigma}]


def _bands(config):
    bs = bloch.band_structure(_problem(config))
    buf = io.StringIO()
    bloch.write_bands_csv(bs, buf, config.observable.direction)
    reader = csv.DictReader(io.StringIO(buf.getvalue()))
    rows = []
    for rec in reader:
        rows.append({k: (int(v) if k == "n" else float(v)) for k, v in rec.items()})
    return rows


def _bloch_conductivity(config):
    th, ob = config.thermo, config.observable
    bs = bloch.band_structure(_problem(config))
    parts = bloch.conductivity_bloch_parts(bs, th.beta, th.mu, th.lam, ob.direction)
    leading = bloch.conductivity_bloch_leading(bs, th.beta, th.mu, th.lam, ob.direction, config.bloch.curvature)
    gap = bloch.gap_check(bs, th.mu)
    return [{"sigma": parts.total, "sigma_leading": leading, "sigma_intraband": parts.diagonal,
             "sigma_interband": parts.off_diagonal, "interband_bound": parts.bound, "margin": bs.margin,
             "phase": gap.kind, "gap": "" if gap.gap is None else gap.gap}]


def _solvable(config):
    disp = (oracles.cosine_dispersion(config.dispersion.amplitude) if config.dispersion.kind == "cosine"
            else oracles.quadratic_dispersion())
    if config.dispersion.kind == "quadratic":
        return [{"rho": oracles.drude_density(config.thermo.beta, config.thermo.mu),
                 "j": oracles.drude_current(config.thermo)}]
    weight = oracles.curvature_weight(config.thermo, disp)
    logger.info("band integral (1/2pi) int f eps'' dk = %.17g", weight)
    return [{"j": oracles.solvable_current(config.thermo, disp),
             "sigma": oracles.solvable_conductivity(config.thermo, disp)}]


def _drude(config):
    return [{"rho": oracles.drude_density(config.thermo.beta, config.thermo.mu),
             "j": oracles.drude_current(config.thermo)}]


HANDLERS = {"ness": _ness, "current": _current, "conductivity": _conductivity, "bands": _bands,
            "bloch-conductivity": _bloch_conductivity, "solvable": _solvable, "drude": _drude}


def evaluate(config: RunConfig) -> list:
    """Rows (input echo followed by outputs) for one parameter point."""
    echo = _echo(config)
    return [{**echo, **row} for row in HANDLERS[config.command](config)]


def _log_convergence(axis, values, rows):
    if axis != "N":
        return
    for key in ("sigma", "j"):
        series = [r[key] for r in rows if key in r]
        if len(series) == len(values) and len(series) > 1:
            for n, a, b in zip(values[1:], series[:-1], series[1:]):
                logger.info("N-convergence: %s(N=%d) - %s(previous) = %.3e", key, int(n), key, b - a)


def compute(config: RunConfig) -> list:
    if config.command != "sweep":
        return evaluate(config)
    axis, values = config.sweep.axis, config.sweep.values
    points = [config.at(axis, v) for v in values]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        # map keeps input order whatever the completion order
        chunks = list(pool.map(evaluate, points))
    rows = []
    for value, chunk in zip(values, chunks):
        for row in chunk:
            rows.append({"sweep_axis": axis, "sweep_value": value, **row})
    _log_convergence(axis, values, [c[0] for c in chunks])
    return rows


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def format_rows(rows: list, fmt: str = "csv") -> str:
    if fmt == "json":
        def clean(v):
            if isinstance(v, (float, np.floating)):
                return float(v) if math.isfinite(v) else _cell(v)
            if isinstance(v, np.integer):
                return int(v)
            return v
        return json.dumps([{k: clean(v) for k, v in row.items()} for row in rows], indent=1) + "\n"
    header = []
    for row in rows:
        header += [k for k in row if k not in header]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[k]) if k in row else "" for k in header])
    return buf.getvalue()


def run(config: RunConfig) -> int:
    """Evaluate ``config`` and write the result to ``config.out`` (stdout if unset); returns the exit status."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", bloch.DegenerateBandWarning)
            rows = compute(config)
    except bloch.DegenerateBandWarning as exc:
        logger.error("assumption violated: %s", exc)
        return EXIT_NUMERICAL
    except (ConfigError, SiteRangeError, UnsupportedOperationError, OSError) as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    text = format_rows(rows, config.format)
    if config.out:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nesskubo", description="Dissipative steady states and conductivity of "
                                                             "lattice fermions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="run configuration file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threads", type=int)
    p.add_argument("-v", "--verbose", action="store_true", help="log diagnostics at INFO level")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logger.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        text = Path(args.config).read_text()
        config = parse_config(text, args.command)
        overrides = {k: v for k, v in (("out", args.out), ("format", args.format), ("threads", args.threads))
                     if v is not None}
        if overrides.get("threads", 1) < 1:
            raise ConfigError("--threads must be at least 1")
        config = replace(config, **overrides)
    except OSError as exc:
        logger.error("cannot read config: %s", exc)
        return EXIT_CONFIG
    except NessKuboError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
