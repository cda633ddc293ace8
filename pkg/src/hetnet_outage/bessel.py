"""Reference I0 evaluation and finite exponential-series approximations of it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares, minimize

SERIES_FORMAT_VERSION = 1
DEFAULT_SERIES_FILE = "bessel_i0_series_v1.txt"
_SERIES_CUTOVER = 20.0


class BesselFitError(RuntimeError):
    def __init__(self, achieved: float, target: float):
        super().__init__(f"exponential-series fit reached max relative error {achieved:.3e} > {target:.3e}")
        self.achieved = achieved
        self.target = target


def _i0_series(x: float) -> float:
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if term < 1e-17 * total:
            return total


def _i0e_asymptotic(x: float) -> float:
    # sum_k ((2k-1)!!)^2 / (k! (8x)^k); terms shrink until k ~ 2x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (k * 8.0 * x)
        if nxt >= term or nxt < 1e-17 * total:
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_i0e_reference(x: float) -> float:
    """exp(-x) * I0(x) for x >= 0, valid for any finite x."""
    if x < 0 or not math.isfinite(x):
        raise ValueError(f"x must be finite and nonnegative, got {x!r}")
    if x <= _SERIES_CUTOVER:
        return _i0_series(x) * math.exp(-x)
    return _i0e_asymptotic(x)


def bessel_i0_reference(x: float) -> float:
    """Modified Bessel function I0(x) for 0 <= x <= 700.

    Power series up to x = 20, asymptotic expansion beyond.  Larger
    arguments overflow; use :func:`bessel_i0e_reference` there.
    """
    if x < 0 or not math.isfinite(x):
        raise ValueError(f"x must be finite and nonnegative, got {x!r}")
    if x > 700.0:
        raise OverflowError("I0 overflows beyond x = 700; use bessel_i0e_reference")
    if x <= _SERIES_CUTOVER:
        return _i0_series(x)
    return _i0e_asymptotic(x) * math.exp(x)


@dataclass(frozen=True)
class BesselSeries:
    """I0(x) ~ sum_k alphas[k] * exp(betas[k] * x)."""

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    x_max: float = 20.0
    fit_error: float = float("nan")
    name: str = "i0_exp_series"

    def __post_init__(self):
        if len(self.alphas) != len(self.betas) or not self.alphas:
            raise ValueError("alphas and betas must be nonempty and of equal length")

    @property
    def terms(self) -> int:
        return len(self.alphas)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(np.multiply.outer(x, np.asarray(self.betas))) @ np.asarray(self.alphas)
        return float(out) if out.ndim == 0 else out

    def scaled(self, x, shift):
        """sum_k alphas[k] * exp(betas[k] * x - shift), computed without overflow."""
        x = np.asarray(x, dtype=float)
        shift = np.asarray(shift, dtype=float)
        expo = np.multiply.outer(x, np.asarray(self.betas)) - shift[..., None]
        out = np.exp(expo) @ np.asarray(self.alphas)
        return float(out) if out.ndim == 0 else out

    def to_text(self) -> str:
        fmt = lambda v: " ".join(repr(float(a)) for a in v)
        return (
            "# exponential-series approximation of the modified Bessel function I0\n"
            f"format_version = {SERIES_FORMAT_VERSION}\n"
            f"name = {self.name}\n"
            f"terms = {self.terms}\n"
            f"x_max = {self.x_max!r}\n"
            f"fit_max_rel_error = {self.fit_error!r}\n"
            f"alphas = {fmt(self.alphas)}\n"
            f"betas = {fmt(self.betas)}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "BesselSeries":
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        version = int(fields.get("format_version", -1))
        if version != SERIES_FORMAT_VERSION:
            raise ValueError(f"unsupported series format version {version}")
        alphas = tuple(float(v) for v in fields["alphas"].split())
        betas = tuple(float(v) for v in fields["betas"].split())
        if len(alphas) != int(fields["terms"]):
            raise ValueError("term count does not match coefficient list")
        return cls(
            alphas=alphas,
            betas=betas,
            x_max=float(fields["x_max"]),
            fit_error=float(fields["fit_max_rel_error"]),
            name=fields.get("name", "i0_exp_series"),
        )


def save_series(series: BesselSeries, path: str | Path) -> None:
    Path(path).write_text(series.to_text())


def load_series(path: str | Path) -> BesselSeries:
    return BesselSeries.from_text(Path(path).read_text())


@lru_cache(maxsize=1)
def default_series() -> BesselSeries:
    """The frozen 4-term series shipped with the package."""
    text = resources.files("hetnet_outage").joinpath("data", DEFAULT_SERIES_FILE).read_text()
    return BesselSeries.from_text(text)


def _fit_grid(x_max: float, points: int = 400) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-3 * x_max / 20.0, x_max, points)])


def series_max_rel_error(series: BesselSeries, x_max: float | None = None) -> float:
    x = _fit_grid(series.x_max if x_max is None else x_max)
    ref = np.array([bessel_i0_reference(v) for v in x])
    return float(np.max(np.abs(series(x) / ref - 1.0)))


def fit_bessel_series(terms: int = 4, x_max: float = 20.0, tol: float = 0.01, restarts: int = 12) -> BesselSeries:
    """Fit sum_k a_k exp(b_k x) to I0 on a log-spaced grid of [0, x_max].

    For fixed exponents the amplitudes solve a linear least-squares problem in
    relative error; the exponents are then tuned to minimise the maximum
    relative error.  Starts are deterministic, so the result is reproducible.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    x = _fit_grid(x_max)
    ref = np.array([bessel_i0_reference(v) for v in x])

    def amplitudes(b):
        A = np.exp(np.outer(x, b)) / ref[:, None]
        a, *_ = np.linalg.lstsq(A, np.ones_like(x), rcond=None)
        return a

    def residual(b):
        return np.exp(np.outer(x, b)) @ amplitudes(b) / ref - 1.0

    def worst(b):
        return float(np.max(np.abs(residual(b))))

    rng = np.random.default_rng(20240607)
    starts = [np.linspace(-0.8, 1.0, terms)]
    starts += [np.sort(rng.uniform(-1.0, 1.0, terms)) for _ in range(restarts - 1)]
    best_b, best_err = None, np.inf
    for b0 in starts:
        b = least_squares(residual, b0).x
        b = minimize(worst, b, method="Nelder-Mead", options={"maxiter": 4000, "xatol": 1e-10, "fatol": 1e-13}).x
        err = worst(b)
        if err < best_err:
            best_b, best_err = b, err
    if best_err > tol:
        raise BesselFitError(best_err, tol)
    a = amplitudes(best_b)
    order = np.argsort(best_b)
    return BesselSeries(
        alphas=tuple(float(v) for v in a[order]),
        betas=tuple(float(v) for v in best_b[order]),
        x_max=float(x_max),
        fit_error=best_err,
    )
