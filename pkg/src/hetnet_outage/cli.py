"""``hetnet-outage`` command-line front end.

Exit codes: 0 success, 2 bad configuration, 3 numerical failure,
4 analytic path unavailable for the requested combination.  Errors are
written to stderr as one JSON record.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

import numpy as np

from hetnet_outage import analytic, montecarlo
from hetnet_outage.config import COMMANDS, ConfigError, JobSpec, apply_axis, parse_config
from hetnet_outage.fading import pdf_power
from hetnet_outage.quadrature import IntegrationError
from hetnet_outage.scenario import Scenario, UnsupportedCombination

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_UNSUPPORTED = 0, 2, 3, 4

CURVE_COLUMNS = ("axis_value", "outage_direct", "outage_offload", "method", "ci_halfwidth",
                 "formula_mode", "seed", "trials", "p_serve", "axis")
PDF_COLUMNS = ("h", "density")
VALIDATE_COLUMNS = ("mode", "analytic", "analytic_method", "monte_carlo", "ci_halfwidth", "gap",
                    "tolerance", "status", "formula_mode", "seed", "trials", "p_serve")


class NumericFailure(RuntimeError):
    def __init__(self, message: str, context: dict):
        super().__init__(message)
        self.context = context


@dataclasses.dataclass(frozen=True)
class Table:
    command: str
    columns: tuple[str, ...]
    rows: list[tuple]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if v is None else _fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [dict(zip(self.columns, row)) for row in self.rows]
        return json.dumps({"command": self.command, "columns": list(self.columns), "rows": rows}, indent=2) + "\n"


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


# -- job execution -----------------------------------------------------------

def _analytic_pair(sc: Scenario):
    return analytic.outage_direct(sc), analytic.outage_offload(sc)


def _simulated_pair(sc: Scenario, job: JobSpec):
    sim = job.simulation
    cfg = montecarlo.SimConfig(sc, trials=sim.trials, master_seed=sim.seed, workers=sim.workers)
    return montecarlo.simulate_direct(cfg).outage, montecarlo.simulate_offload(cfg).outage


def _curve_row(axis: str, value: float, sc: Scenario, job: JobSpec, method: str) -> tuple:
    if method == "monte_carlo":
        d, o = _simulated_pair(sc, job)
    else:
        try:
            d, o = _analytic_pair(sc)
        except UnsupportedCombination:
            if method == "analytic":
                raise
            d, o = _simulated_pair(sc, job)
    stochastic = d.method == "monte_carlo"
    ci = max(d.ci_halfwidth, o.ci_halfwidth) if stochastic else None
    return (value, d.value, o.value, d.method, ci, sc.formula_mode,
            job.simulation.seed if stochastic else None,
            job.simulation.trials if stochastic else None, sc.p_serve, axis)


def _guard(fn, context: dict):
    try:
        return fn()
    except (IntegrationError, FloatingPointError, OverflowError, MemoryError) as exc:
        raise NumericFailure(str(exc), context) from exc


def run_job(job: JobSpec) -> Table:
    """Compute the output table of ``job``; raises on failure (see :func:`main` for exit codes)."""
    sc = job.scenario
    if job.command == "pdf":
        h = np.linspace(0.0, job.pdf.h_max, job.pdf.points)
        dens = _guard(lambda: np.asarray(pdf_power(sc.fading_desired, h, job.pdf.method), dtype=float),
                      {"command": "pdf"})
        return Table("pdf", PDF_COLUMNS, [(float(a), float(b)) for a, b in zip(h, dens)])
    if job.command == "validate":
        rep = _guard(lambda: montecarlo.validate(sc, job.simulation.trials, job.simulation.seed,
                                                 workers=job.simulation.workers), {"command": "validate"})
        rows = [(r.mode, r.analytic, r.analytic_method, r.monte_carlo, r.ci_halfwidth, r.gap, r.tolerance,
                 r.status, sc.formula_mode, rep.seed, rep.trials, sc.p_serve) for r in rep.rows]
        return Table("validate", VALIDATE_COLUMNS, rows)
    if job.command in ("outage", "simulate"):
        method = "analytic" if job.command == "outage" else "monte_carlo"
        row = _guard(lambda: _curve_row("sir_dB", sc.sir_threshold_dB, sc, job, method), {"command": job.command})
        return Table(job.command, CURVE_COLUMNS, [row])
    sw = job.sweep
    rows = []
    for value in sw.values():
        point = apply_axis(sc, sw.axis, value)
        rows.append(_guard(lambda: _curve_row(sw.axis, value, point, job, sw.method),
                           {"command": "sweep", "axis": sw.axis, "value": value}))
    return Table("sweep", CURVE_COLUMNS, rows)


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hetnet-outage", description="Macro-user outage in a two-tier Poisson HetNet.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="TOML job file (defaults apply when omitted)")
    p.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--mode", choices=("paper-literal", "corrected"))
    return p


def _apply_overrides(job: JobSpec, args) -> JobSpec:
    sim = job.simulation
    if args.trials is not None:
        if args.trials < montecarlo.MIN_TRIALS:
            raise ConfigError("--trials", f"need at least {montecarlo.MIN_TRIALS} trials")
        sim = dataclasses.replace(sim, trials=args.trials)
    if args.seed is not None:
        sim = dataclasses.replace(sim, seed=args.seed)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers", "must be >= 1")
        sim = dataclasses.replace(sim, workers=args.workers)
    sc = job.scenario
    if args.mode is not None:
        sc = dataclasses.replace(sc, formula_mode=args.mode.replace("-", "_"))
    out = job.output
    if args.out is not None:
        out = dataclasses.replace(out, path=str(args.out))
    if args.format is not None:
        out = dataclasses.replace(out, format=args.format)
    return dataclasses.replace(job, scenario=sc, simulation=sim, output=out)


def _fail(code: int, record: dict) -> int:
    print(json.dumps(record), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config is not None else ""
    except OSError as exc:
        return _fail(EXIT_CONFIG, {"error": "config", "field": "--config", "line": None, "message": str(exc)})
    try:
        job = _apply_overrides(parse_config(text, args.command), args)
        table = run_job(job)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc.record())
    except UnsupportedCombination as exc:
        return _fail(EXIT_UNSUPPORTED, {"error": "unsupported", "message": str(exc),
                                        "suggestion": "run `hetnet-outage simulate` for a Monte Carlo estimate"})
    except NumericFailure as exc:
        return _fail(EXIT_NUMERIC, {"error": "numeric", "message": str(exc), "context": exc.context})
    except ValueError as exc:
        return _fail(EXIT_CONFIG, {"error": "config", "field": None, "line": None, "message": str(exc)})
    payload = table.to_json() if job.output.format == "json" else table.to_csv()
    if job.output.path is None:
        sys.stdout.write(payload)
    else:
        Path(job.output.path).write_text(payload)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
