"""Channel fading power laws: composite Nakagami-lognormal, Rician, Rayleigh-lognormal and their time-shared mixture.

All densities are for the fading *power* h = z**2 (z the amplitude).
Lognormal shadowing parameters are given in dB and converted to natural-log
units with ln(10)/10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from hetnet_outage.bessel import BesselSeries, bessel_i0e_reference, default_series
from hetnet_outage.quadrature import integrate_semi_infinite, normal_nodes, paired_form, gauss_hermite

DB_TO_NEPER = math.log(10.0) / 10.0

# closed-form density: 10-point rule, outermost pair dropped; the Laplace/outage
# pipeline uses a full, higher-order rule (see laplace_power)
PDF_ORDER = 10
PDF_DROP_PAIRS = 1
LAPLACE_ORDER = 32


def _check_finite(name, value):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class NakagamiLognormal:
    """Nakagami-m fast fading whose local mean power is lognormal."""

    m: float = 1.0
    mu_dB: float = 0.0
    zeta_dB: float = 0.0

    def __post_init__(self):
        for name in ("m", "mu_dB", "zeta_dB"):
            _check_finite(name, getattr(self, name))
        if self.m < 0.5:
            raise ValueError(f"Nakagami m must be >= 0.5, got {self.m}")
        if self.zeta_dB < 0:
            raise ValueError(f"zeta_dB must be >= 0, got {self.zeta_dB}")

    @property
    def mu(self) -> float:
        return DB_TO_NEPER * self.mu_dB

    @property
    def zeta(self) -> float:
        return DB_TO_NEPER * self.zeta_dB


@dataclass(frozen=True)
class RicianPower:
    """Power of a Rician amplitude with factor K and total power Theta."""

    K: float = 0.0
    Theta: float = 1.0

    def __post_init__(self):
        _check_finite("K", self.K)
        _check_finite("Theta", self.Theta)
        if self.K < 0:
            raise ValueError(f"Rician K must be >= 0, got {self.K}")
        if self.Theta <= 0:
            raise ValueError(f"Theta must be > 0, got {self.Theta}")

    @property
    def gamma2(self) -> float:
        """Specular power."""
        return self.K * self.Theta / (1.0 + self.K)

    @property
    def psi2(self) -> float:
        """Per-dimension scatter variance (scatter power is 2 * psi2)."""
        return self.Theta / (2.0 * (1.0 + self.K))


@dataclass(frozen=True)
class RayleighLognormal:
    """Exponential power with a lognormal local mean (Suzuki power)."""

    mu_dB: float = 0.0
    zeta_dB: float = 0.0

    def __post_init__(self):
        _check_finite("mu_dB", self.mu_dB)
        _check_finite("zeta_dB", self.zeta_dB)
        if self.zeta_dB < 0:
            raise ValueError(f"zeta_dB must be >= 0, got {self.zeta_dB}")

    @property
    def mu(self) -> float:
        return DB_TO_NEPER * self.mu_dB

    @property
    def zeta(self) -> float:
        return DB_TO_NEPER * self.zeta_dB


@dataclass(frozen=True)
class TimeShared:
    """Shadowed (Rayleigh-lognormal) a fraction T of the time, unshadowed Rician otherwise.

    A member may be omitted only when its share of time is zero.
    """

    T: float
    rician: RicianPower | None = None
    shadowed: RayleighLognormal | None = None

    def __post_init__(self):
        _check_finite("T", self.T)
        if not 0.0 <= self.T <= 1.0:
            raise ValueError(f"time-share factor T must lie in [0, 1], got {self.T}")
        if self.rician is None and self.T < 1.0:
            raise ValueError("time-shared model needs a rician member unless T = 1")
        if self.shadowed is None and self.T > 0.0:
            raise ValueError("time-shared model needs a shadowed member unless T = 0")

    def members(self):
        """(weight, model) pairs with nonzero weight."""
        out = []
        if self.T < 1.0:
            out.append((1.0 - self.T, self.rician))
        if self.T > 0.0:
            out.append((self.T, self.shadowed))
        return out


FadingModel = Union[NakagamiLognormal, RicianPower, RayleighLognormal, TimeShared]


def lognormal_params(model) -> tuple[float, float, float]:
    """(m, mu, zeta) for the two lognormal-mixture families."""
    if isinstance(model, NakagamiLognormal):
        return model.m, model.mu, model.zeta
    if isinstance(model, RayleighLognormal):
        return 1.0, model.mu, model.zeta
    raise TypeError(f"{type(model).__name__} is not a lognormal mixture")


def _as_array(h):
    arr = np.asarray(h, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("fading power h must be nonnegative")
    return arr


def _ret(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _gamma_logpdf(h: float, m: float, log_mean: float) -> float:
    # Gamma(shape m, mean exp(log_mean)) density at h > 0
    return (
        m * math.log(m) + (m - 1.0) * math.log(h) - math.lgamma(m)
        - m * log_mean - m * h * math.exp(-log_mean)
    )


def _gamma_pdf_scalar(h: float, m: float, log_mean: float) -> float:
    if h == 0.0:
        if m < 1.0:
            return math.inf
        return math.exp(-log_mean) if m == 1.0 else 0.0
    if m * h * math.exp(min(-log_mean, 700.0)) > 1e4:
        return 0.0
    lp = _gamma_logpdf(h, m, log_mean)
    return math.exp(lp) if lp > -745.0 else 0.0


def _lognormal_mixture_pdf_exact(h: float, m: float, mu: float, zeta: float) -> float:
    if zeta == 0.0:
        return _gamma_pdf_scalar(h, m, mu)
    if h == 0.0 and m < 1.0:
        return math.inf
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def integrand(u):
        if u > 38.0:
            return 0.0
        return norm * math.exp(-0.5 * u * u) * (
            _gamma_pdf_scalar(h, m, mu + zeta * u) + _gamma_pdf_scalar(h, m, mu - zeta * u)
        )

    return integrate_semi_infinite(integrand, 0.0, 1e-11, split=4.0, abs_tol=1e-300)


def _lognormal_mixture_pdf_approx(h: np.ndarray, m: float, mu: float, zeta: float, order: int, drop_pairs: int):
    """Paired Gauss-Hermite closed form with the outer pairs dropped."""
    paired = paired_form(gauss_hermite(order), drop_pairs)
    a = paired.alphas
    b = paired.betas
    hh = h[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        upper = a * np.exp(-m * hh * np.exp(b * zeta - mu)) * np.exp(m * (b * zeta - mu))
        lower = a * np.exp(-m * hh * np.exp(-b * zeta - mu)) * np.exp(m * (-b * zeta - mu))
        pref = m ** m * np.power(h, m - 1.0) / math.gamma(m)
    return pref * (upper.sum(axis=-1) + lower.sum(axis=-1))


def _rician_pdf_exact_scalar(h: float, K: float, Theta: float) -> float:
    c = (K + 1.0) / Theta
    if K == 0.0:
        return c * math.exp(-c * h)
    x = 2.0 * math.sqrt(K * c * h)
    # exp(x) * i0e(x) = I0(x)
    return c * math.exp(x - K - c * h) * bessel_i0e_reference(x)


def _rician_pdf_approx(h: np.ndarray, K: float, Theta: float, series: BesselSeries):
    c = (K + 1.0) / Theta
    x = 2.0 * np.sqrt(K * c * h)
    return c * series.scaled(x, K + c * h)


def pdf_power(model: FadingModel, h, method: str = "exact", *, order: int = PDF_ORDER,
              drop_pairs: int = PDF_DROP_PAIRS, series: BesselSeries | None = None):
    """Density of the fading power at ``h``.

    ``method="exact"`` evaluates the defining integral (lognormal families) or
    the Bessel form (Rician) numerically.  ``method="approx"`` uses the
    closed forms: the paired Gauss-Hermite sum (defaults: order 10, outermost
    pair dropped) and the exponential-series stand-in for I0.
    """
    if method not in ("exact", "approx"):
        raise ValueError(f"method must be 'exact' or 'approx', got {method!r}")
    h = _as_array(h)
    if isinstance(model, TimeShared):
        out = sum(w * np.asarray(pdf_power(sub, h, method, order=order, drop_pairs=drop_pairs, series=series))
                  for w, sub in model.members())
        return _ret(np.asarray(out, dtype=float))
    if isinstance(model, RicianPower):
        if method == "exact":
            out = np.vectorize(_rician_pdf_exact_scalar, otypes=[float])(h, model.K, model.Theta)
        else:
            out = _rician_pdf_approx(h, model.K, model.Theta, series or default_series())
        return _ret(out)
    m, mu, zeta = lognormal_params(model)
    if method == "exact":
        out = np.vectorize(_lognormal_mixture_pdf_exact, otypes=[float])(h, m, mu, zeta)
    else:
        out = _lognormal_mixture_pdf_approx(h, m, mu, zeta, order, drop_pairs)
    return _ret(out)


def _gamma_components(m: float, mu: float, zeta: float, order: int):
    """Probabilities and scales of the gamma mixture representing the lognormal family."""
    if zeta == 0.0:
        return np.array([1.0]), np.array([math.exp(mu) / m])
    u, p = normal_nodes(order)
    return p / math.fsum(p), np.exp(mu + zeta * u) / m


def power_moment(model: FadingModel, y, k: int = 0, *, order: int = LAPLACE_ORDER):
    """E[h**k * exp(-y*h)] for y >= 0 and integer k >= 0.

    Gamma mixtures use Gamma(m+k)/Gamma(m) theta^k (1 + theta y)^-(m+k);
    Rician power is handled as a Poisson(K) mixture of Gamma(1+j) laws.
    """
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("y must be nonnegative")
    if isinstance(model, TimeShared):
        return _ret(sum(w * np.asarray(power_moment(sub, y, k, order=order)) for w, sub in model.members()))
    if isinstance(model, RicianPower):
        K, Theta = model.K, model.Theta
        if k == 0:
            d = 1.0 + K + y * Theta
            return _ret((1.0 + K) / d * np.exp(-K * y * Theta / d))
        theta = Theta / (1.0 + K)
        jmax = int(K + 12.0 * math.sqrt(K) + 40)
        j = np.arange(jmax + 1)
        logpois = -K + j * math.log(K) - special.gammaln(j + 1) if K > 0 else np.where(j == 0, 0.0, -np.inf)
        coef = np.exp(logpois + special.gammaln(1 + j + k) - special.gammaln(1 + j)) * theta ** k
        base = 1.0 + theta * y[..., None]
        return _ret(np.sum(coef * base ** (-(1.0 + j + k)), axis=-1))
    m, mu, zeta = lognormal_params(model)
    p, theta = _gamma_components(m, mu, zeta, order)
    ratio = math.exp(math.lgamma(m + k) - math.lgamma(m))
    terms = p * ratio * theta ** k * (1.0 + theta * y[..., None]) ** (-(m + k))
    return _ret(terms.sum(axis=-1))


def laplace_power(model: FadingModel, x, *, order: int = LAPLACE_ORDER):
    """E[exp(-x*h)] under ``model``.

    Lognormal families: full Gauss-Hermite sum (default order 32, no pairs
    dropped) of gamma Laplace transforms.  Rician:
    (1+K)/(1+K+x*Theta) * exp(-K*x*Theta/(1+K+x*Theta)).
    """
    return power_moment(model, x, 0, order=order)


def laplace_complement(model: FadingModel, x, *, order: int = LAPLACE_ORDER):
    """1 - E[exp(-x*h)], evaluated without cancellation for small x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    if isinstance(model, TimeShared):
        return _ret(sum(w * np.asarray(laplace_complement(sub, x, order=order)) for w, sub in model.members()))
    if isinstance(model, RicianPower):
        K, Theta = model.K, model.Theta
        d = 1.0 + K + x * Theta
        return _ret(-np.expm1(-np.log1p(x * Theta / (1.0 + K)) - K * x * Theta / d))
    m, mu, zeta = lognormal_params(model)
    p, theta = _gamma_components(m, mu, zeta, order)
    terms = -p * np.expm1(-m * np.log1p(theta * x[..., None]))
    return _ret(terms.sum(axis=-1))


def mean_power(model: FadingModel) -> float:
    if isinstance(model, RicianPower):
        return model.Theta
    if isinstance(model, TimeShared):
        return sum(w * mean_power(sub) for w, sub in model.members())
    _, mu, zeta = lognormal_params(model)
    return math.exp(mu + 0.5 * zeta * zeta)


def is_exponential(model: FadingModel) -> bool:
    """True when the power law is exactly exponential."""
    if isinstance(model, RicianPower):
        return model.K == 0.0
    if isinstance(model, TimeShared):
        subs = model.members()
        return all(is_exponential(s) for _, s in subs) and len({mean_power(s) for _, s in subs}) == 1
    m, _, zeta = lognormal_params(model)
    return m == 1.0 and zeta == 0.0


def sample_power(model: FadingModel, rng: np.random.Generator, size=None):
    """Draws from the exact power law of ``model``."""
    if isinstance(model, RicianPower):
        g = math.sqrt(model.gamma2)
        s = math.sqrt(model.psi2)
        re = g + s * rng.standard_normal(size)
        im = s * rng.standard_normal(size)
        return re * re + im * im
    if isinstance(model, TimeShared):
        members = model.members()
        if len(members) == 1:
            return sample_power(members[0][1], rng, size)
        shadowed = rng.random(size) < model.T
        hr = sample_power(model.rician, rng, size)
        hs = sample_power(model.shadowed, rng, size)
        return np.where(shadowed, hs, hr)
    m, mu, zeta = lognormal_params(model)
    if zeta > 0.0:
        mean = np.exp(mu + zeta * rng.standard_normal(size))
    else:
        mean = math.exp(mu)
    if m == 1.0:
        return mean * rng.standard_exponential(size)
    return rng.gamma(m, 1.0, size) * (mean / m)
