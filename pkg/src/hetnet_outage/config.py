"""TOML job files: parsing with strict key checking, validation and round-trip serialisation.

Units are converted once here (dBm -> W, dB -> linear happens inside
Scenario); nothing downstream sees dB values except for reporting.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field

import tomli
import tomli_w

from hetnet_outage.fading import NakagamiLognormal, RayleighLognormal, RicianPower, TimeShared
from hetnet_outage.scenario import ASSOCIATIONS, FORMULA_MODES, Scenario, Tier, dbm_to_watts

COMMANDS = ("pdf", "outage", "sweep", "simulate", "validate")
SWEEP_AXES = ("sir_dB", "lambda_S", "K", "T", "zeta_dB")
SWEEP_METHODS = ("auto", "analytic", "monte_carlo")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
        self.field = field
        self.message = message
        self.line = line

    def record(self) -> dict:
        return {"error": "config", "field": self.field, "line": self.line, "message": self.message}


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    step: float
    method: str = "auto"

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(n)]


@dataclass(frozen=True)
class SimulationSpec:
    trials: int = 100_000
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class PdfSpec:
    h_max: float = 5.0
    points: int = 501
    method: str = "exact"


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class JobSpec:
    command: str
    scenario: Scenario = field(default_factory=Scenario)
    sweep: SweepSpec | None = None
    simulation: SimulationSpec = field(default_factory=SimulationSpec)
    pdf: PdfSpec = field(default_factory=PdfSpec)
    output: OutputSpec = field(default_factory=OutputSpec)


# -- parsing -----------------------------------------------------------------

_SCENARIO_KEYS = {"lambda_M", "lambda_S", "P_M_dBm", "P_S_dBm", "P_M_W", "P_S_W", "eta", "d",
                  "sir_dB", "p_serve", "association", "formula_mode"}
_MODEL_KEYS = {
    "nakagami_lognormal": {"model", "m", "mu_dB", "zeta_dB"},
    "rayleigh": {"model"},
    "rician": {"model", "K", "Theta"},
    "rayleigh_lognormal": {"model", "mu_dB", "zeta_dB"},
    "time_shared": {"model", "T", "rician", "shadowed"},
}


class _Reader:
    def __init__(self, text: str):
        self.lines = text.splitlines()

    def line_of(self, section: str | None, key: str | None = None) -> int | None:
        """Best-effort 1-based line of ``key`` inside ``[section]``."""
        in_section = section is None
        for i, raw in enumerate(self.lines, 1):
            s = raw.strip()
            if s.startswith("["):
                name = s.strip("[]").strip()
                in_section = name == section
                if in_section and key is None:
                    return i
                continue
            if in_section and key is not None and re.match(rf"{re.escape(key)}\s*=", s):
                return i
        return None

    def error(self, section: str | None, key: str | None, message: str) -> ConfigError:
        name = ".".join(p for p in (section, key) if p)
        return ConfigError(name or "<root>", message, self.line_of(section, key))


def _number(rd: _Reader, section: str, table: dict, key: str, default=None, *, integer=False):
    if key not in table:
        if default is None:
            raise rd.error(section, key, "required key missing")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise rd.error(section, key, f"expected a number, got {v!r}")
    if integer and not isinstance(v, int):
        raise rd.error(section, key, f"expected an integer, got {v!r}")
    if not integer and not math.isfinite(v):
        raise rd.error(section, key, "must be finite")
    return int(v) if integer else float(v)


def _string(rd: _Reader, section: str, table: dict, key: str, default: str, choices) -> str:
    v = table.get(key, default)
    if not isinstance(v, str) or v.replace("-", "_") not in choices:
        raise rd.error(section, key, f"must be one of {list(choices)}, got {v!r}")
    return v.replace("-", "_")


def _check_keys(rd: _Reader, section: str | None, table: dict, allowed: set):
    for key in table:
        if key not in allowed:
            raise rd.error(section, key, "unknown key")


def _build(rd: _Reader, section: str, key: str | None, ctor, **kwargs):
    try:
        return ctor(**kwargs)
    except ValueError as exc:
        raise rd.error(section, key, str(exc)) from None


def _parse_model(rd: _Reader, section: str, table: dict):
    if not isinstance(table, dict):
        raise rd.error(section, None, "expected a table")
    kind = table.get("model", "nakagami_lognormal")
    if kind not in _MODEL_KEYS:
        raise rd.error(section, "model", f"must be one of {list(_MODEL_KEYS)}, got {kind!r}")
    _check_keys(rd, section, table, _MODEL_KEYS[kind])
    if kind == "rayleigh":
        return NakagamiLognormal()
    if kind == "nakagami_lognormal":
        m = _number(rd, section, table, "m", 1.0)
        if m < 0.5:
            raise rd.error(section, "m", f"Nakagami m must be >= 0.5, got {m}")
        zeta = _number(rd, section, table, "zeta_dB", 0.0)
        if zeta < 0:
            raise rd.error(section, "zeta_dB", f"standard deviation must be >= 0, got {zeta}")
        return _build(rd, section, None, NakagamiLognormal, m=m, mu_dB=_number(rd, section, table, "mu_dB", 0.0), zeta_dB=zeta)
    if kind == "rician":
        return _parse_rician(rd, section, table)
    if kind == "rayleigh_lognormal":
        return _parse_shadowed(rd, section, table)
    T = _number(rd, section, table, "T")
    if not 0.0 <= T <= 1.0:
        raise rd.error(section, "T", f"time-share factor must lie in [0, 1], got {T}")
    rician = shadowed = None
    if "rician" in table:
        sub = f"{section}.rician"
        _check_keys(rd, sub, table["rician"], {"K", "Theta"})
        rician = _parse_rician(rd, sub, table["rician"])
    if "shadowed" in table:
        sub = f"{section}.shadowed"
        _check_keys(rd, sub, table["shadowed"], {"mu_dB", "zeta_dB"})
        shadowed = _parse_shadowed(rd, sub, table["shadowed"])
    return _build(rd, section, None, TimeShared, T=T, rician=rician, shadowed=shadowed)


def _parse_rician(rd, section, table):
    K = _number(rd, section, table, "K", 0.0)
    if K < 0:
        raise rd.error(section, "K", f"Rician factor must be >= 0, got {K}")
    Theta = _number(rd, section, table, "Theta", 1.0)
    if Theta <= 0:
        raise rd.error(section, "Theta", f"total power must be > 0, got {Theta}")
    return RicianPower(K, Theta)


def _parse_shadowed(rd, section, table):
    zeta = _number(rd, section, table, "zeta_dB", 0.0)
    if zeta < 0:
        raise rd.error(section, "zeta_dB", f"standard deviation must be >= 0, got {zeta}")
    return RayleighLognormal(_number(rd, section, table, "mu_dB", 0.0), zeta)


def _tier(rd, table, key_lam, key_dbm, key_w, lam_default, dbm_default) -> Tier:
    lam = _number(rd, "scenario", table, key_lam, lam_default)
    if lam <= 0:
        raise rd.error("scenario", key_lam, f"density must be positive, got {lam}")
    if key_dbm in table and key_w in table:
        raise rd.error("scenario", key_w, f"give either {key_dbm} or {key_w}, not both")
    if key_w in table:
        power = _number(rd, "scenario", table, key_w)
        if power <= 0:
            raise rd.error("scenario", key_w, "power must be positive")
    else:
        power = dbm_to_watts(_number(rd, "scenario", table, key_dbm, dbm_default))
    return Tier(lam, power)


def _parse_scenario(rd: _Reader, doc: dict) -> Scenario:
    table = doc.get("scenario", {})
    _check_keys(rd, "scenario", table, _SCENARIO_KEYS)
    d = _number(rd, "scenario", table, "d", 2.0)
    if d != 2:
        raise rd.error("scenario", "d", "only the plane (d = 2) is supported")
    eta = _number(rd, "scenario", table, "eta", 4.0)
    if eta <= 2:
        raise rd.error("scenario", "eta", f"path-loss exponent must exceed 2, got {eta}")
    p_serve = _number(rd, "scenario", table, "p_serve", 0.25)
    if not 0 < p_serve <= 1:
        raise rd.error("scenario", "p_serve", f"must lie in (0, 1], got {p_serve}")
    fading = doc.get("fading", {})
    if not isinstance(fading, dict):
        raise rd.error("fading", None, "expected a table")
    _check_keys(rd, "fading", fading, {"desired", "interferers"})
    desired = _parse_model(rd, "fading.desired", fading.get("desired", {}))
    interferers = _parse_model(rd, "fading.interferers", fading["interferers"]) if "interferers" in fading else None
    return Scenario(
        macro=_tier(rd, table, "lambda_M", "P_M_dBm", "P_M_W", 4.0, 43.0),
        small=_tier(rd, table, "lambda_S", "P_S_dBm", "P_S_W", 50.0, 23.0),
        eta=eta,
        sir_threshold_dB=_number(rd, "scenario", table, "sir_dB", 5.0),
        p_serve=p_serve,
        fading_desired=desired,
        fading_interferers=interferers,
        association=_string(rd, "scenario", table, "association", "nearest", ASSOCIATIONS),
        formula_mode=_string(rd, "scenario", table, "formula_mode", "corrected", FORMULA_MODES),
    )


def _models(sc: Scenario):
    return [sc.fading_desired] + ([sc.fading_interferers] if sc.fading_interferers != sc.fading_desired else [])


def _has_rician(model) -> bool:
    if isinstance(model, RicianPower):
        return True
    return isinstance(model, TimeShared) and model.rician is not None


def _has_lognormal(model) -> bool:
    if isinstance(model, (NakagamiLognormal, RayleighLognormal)):
        return True
    return isinstance(model, TimeShared) and model.shadowed is not None


def _parse_sweep(rd: _Reader, doc: dict, sc: Scenario) -> SweepSpec | None:
    if "sweep" not in doc:
        return None
    table = doc["sweep"]
    _check_keys(rd, "sweep", table, {"axis", "start", "stop", "step", "method"})
    axis = table.get("axis")
    if axis not in SWEEP_AXES:
        raise rd.error("sweep", "axis", f"must be one of {list(SWEEP_AXES)}, got {axis!r}")
    start = _number(rd, "sweep", table, "start")
    stop = _number(rd, "sweep", table, "stop")
    step = _number(rd, "sweep", table, "step")
    if step <= 0:
        raise rd.error("sweep", "step", "must be positive")
    if stop < start:
        raise rd.error("sweep", "stop", "sweep range is empty (stop < start)")
    method = _string(rd, "sweep", table, "method", "auto", SWEEP_METHODS)
    models = _models(sc)
    shared = [m for m in models if isinstance(m, TimeShared)]
    if axis == "K" and (not any(_has_rician(m) for m in models) or any(m.rician is None for m in shared)):
        raise rd.error("sweep", "axis", "sweeping K needs every fading model that time-shares to have a rician member")
    if axis == "T" and (not shared or any(m.rician is None or m.shadowed is None for m in shared)):
        raise rd.error("sweep", "axis", "sweeping T needs time_shared models with both rician and shadowed members")
    if axis == "zeta_dB" and not any(_has_lognormal(m) for m in models):
        raise rd.error("sweep", "axis", "sweeping zeta_dB needs a lognormal-shadowed fading model")
    if axis == "T" and not (0 <= start and stop <= 1):
        raise rd.error("sweep", "stop", "T must stay within [0, 1]")
    if axis in ("K", "zeta_dB") and start < 0:
        raise rd.error("sweep", "start", f"{axis} must be nonnegative")
    if axis == "lambda_S" and start <= 0:
        raise rd.error("sweep", "start", "density must be positive")
    return SweepSpec(axis, start, stop, step, method)


def parse_config(text: str, command: str | None = None) -> JobSpec:
    """Parse and fully validate a TOML job description.

    ``command`` (from the command line) overrides a top-level ``command`` key.
    """
    rd = _Reader(text)
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("<syntax>", str(exc), getattr(exc, "lineno", None)) from None
    _check_keys(rd, None, doc, {"command", "scenario", "fading", "sweep", "simulation", "pdf", "output"})
    cmd = command or doc.get("command")
    if cmd not in COMMANDS:
        raise rd.error(None, "command", f"must be one of {list(COMMANDS)}, got {cmd!r}")
    sc = _parse_scenario(rd, doc)
    sweep = _parse_sweep(rd, doc, sc)
    if cmd == "sweep" and sweep is None:
        raise rd.error("sweep", None, "the sweep command needs a [sweep] section")

    sim_t = doc.get("simulation", {})
    _check_keys(rd, "simulation", sim_t, {"trials", "seed", "workers"})
    trials = _number(rd, "simulation", sim_t, "trials", 100_000, integer=True)
    if trials < 100:
        raise rd.error("simulation", "trials", "need at least 100 trials")
    workers = _number(rd, "simulation", sim_t, "workers", 1, integer=True)
    if workers < 1:
        raise rd.error("simulation", "workers", "must be >= 1")
    sim = SimulationSpec(trials, _number(rd, "simulation", sim_t, "seed", 0, integer=True), workers)

    pdf_t = doc.get("pdf", {})
    _check_keys(rd, "pdf", pdf_t, {"h_max", "points", "method"})
    h_max = _number(rd, "pdf", pdf_t, "h_max", 5.0)
    points = _number(rd, "pdf", pdf_t, "points", 501, integer=True)
    if h_max <= 0:
        raise rd.error("pdf", "h_max", "must be positive")
    if points < 2:
        raise rd.error("pdf", "points", "need at least 2 grid points")
    pdf = PdfSpec(h_max, points, _string(rd, "pdf", pdf_t, "method", "exact", ("exact", "approx")))

    out_t = doc.get("output", {})
    _check_keys(rd, "output", out_t, {"path", "format"})
    path = out_t.get("path")
    if path is not None and not isinstance(path, str):
        raise rd.error("output", "path", "must be a string")
    output = OutputSpec(path, _string(rd, "output", out_t, "format", "csv", FORMATS))
    return JobSpec(cmd, sc, sweep, sim, pdf, output)


# -- serialisation -----------------------------------------------------------

def model_to_table(model) -> dict:
    if isinstance(model, NakagamiLognormal):
        return {"model": "nakagami_lognormal", "m": model.m, "mu_dB": model.mu_dB, "zeta_dB": model.zeta_dB}
    if isinstance(model, RicianPower):
        return {"model": "rician", "K": model.K, "Theta": model.Theta}
    if isinstance(model, RayleighLognormal):
        return {"model": "rayleigh_lognormal", "mu_dB": model.mu_dB, "zeta_dB": model.zeta_dB}
    out = {"model": "time_shared", "T": model.T}
    if model.rician is not None:
        out["rician"] = {"K": model.rician.K, "Theta": model.rician.Theta}
    if model.shadowed is not None:
        out["shadowed"] = {"mu_dB": model.shadowed.mu_dB, "zeta_dB": model.shadowed.zeta_dB}
    return out


def job_to_dict(job: JobSpec) -> dict:
    sc = job.scenario
    doc = {
        "command": job.command,
        "scenario": {
            "lambda_M": sc.macro.lam, "lambda_S": sc.small.lam,
            "P_M_W": sc.macro.power, "P_S_W": sc.small.power,
            "eta": sc.eta, "sir_dB": sc.sir_threshold_dB, "p_serve": sc.p_serve,
            "association": sc.association, "formula_mode": sc.formula_mode,
        },
        "fading": {"desired": model_to_table(sc.fading_desired)},
        "simulation": dataclasses.asdict(job.simulation),
        "pdf": dataclasses.asdict(job.pdf),
        "output": {k: v for k, v in dataclasses.asdict(job.output).items() if v is not None},
    }
    if sc.fading_interferers != sc.fading_desired:
        doc["fading"]["interferers"] = model_to_table(sc.fading_interferers)
    if job.sweep is not None:
        doc["sweep"] = dataclasses.asdict(job.sweep)
    return doc


def dump_config(job: JobSpec) -> str:
    return tomli_w.dumps(job_to_dict(job))


# -- sweep application -------------------------------------------------------

def _with_K(model, K):
    if isinstance(model, RicianPower):
        return RicianPower(K, model.Theta)
    if isinstance(model, TimeShared) and model.rician is not None:
        return TimeShared(model.T, RicianPower(K, model.rician.Theta), model.shadowed)
    return model


def _with_T(model, T):
    if isinstance(model, TimeShared):
        return TimeShared(T, model.rician, model.shadowed)
    return model


def _with_zeta(model, zeta):
    if isinstance(model, NakagamiLognormal):
        return NakagamiLognormal(model.m, model.mu_dB, zeta)
    if isinstance(model, RayleighLognormal):
        return RayleighLognormal(model.mu_dB, zeta)
    if isinstance(model, TimeShared) and model.shadowed is not None:
        return TimeShared(model.T, model.rician, RayleighLognormal(model.shadowed.mu_dB, zeta))
    return model


def apply_axis(sc: Scenario, axis: str, value: float) -> Scenario:
    """Scenario with one sweep coordinate replaced (fading edits touch desired and interferer models)."""
    if axis == "sir_dB":
        return dataclasses.replace(sc, sir_threshold_dB=value)
    if axis == "lambda_S":
        return dataclasses.replace(sc, small=Tier(value, sc.small.power))
    edit = {"K": _with_K, "T": _with_T, "zeta_dB": _with_zeta}[axis]
    return dataclasses.replace(
        sc, fading_desired=edit(sc.fading_desired, value), fading_interferers=edit(sc.fading_interferers, value)
    )
