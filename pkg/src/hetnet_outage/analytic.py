"""Analytic outage of the tagged macro user, served directly or offloaded to the small-cell tier.

Interference is the PGFL Laplace transform of a PPP beyond the serving
distance.  For a serving distance r and a gamma-shaped desired link with
scale theta, put a = mu / theta.  Then the interference Laplace transform at
s = mu r^eta / (P theta) is exp(-lam r^2 G(a)), where

    G(a) = 2 pi int_1^inf (1 - L_h(a u^-eta)) u du

does not depend on r, lam or P.  The conditional success probability of an
integer-shape gamma link is a finite sum of derivatives of that transform,
so only the derivatives G^(k)(a) have to be integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from hetnet_outage.fading import (
    LAPLACE_ORDER,
    NakagamiLognormal,
    RayleighLognormal,
    RicianPower,
    TimeShared,
    _gamma_components,
    is_exponential,
    laplace_complement,
    mean_power,
    power_moment,
)
from hetnet_outage.geometry import nearest_distance_pdf
from hetnet_outage.quadrature import integrate_semi_infinite
from hetnet_outage.scenario import OutageEstimate, Scenario, Tier, UnsupportedCombination

DEFAULT_REL_TOL = 1e-8


def laplace_interference(s: float, tier: Tier, eta: float, r0: float, model, *,
                         rel_tol: float = DEFAULT_REL_TOL, order: int = LAPLACE_ORDER) -> float:
    """E[exp(-s I)] for I the interference of ``tier`` from beyond distance ``r0``.

    exp(-2 pi lam int_r0^inf (1 - L_h(s P x^-eta)) x dx), integrated directly.
    """
    if s < 0 or r0 < 0:
        raise ValueError("s and r0 must be nonnegative")
    if s == 0:
        return 1.0
    sp = s * tier.power

    def integrand(x):
        if x == 0.0:
            return 0.0
        return laplace_complement(model, sp * x ** -eta, order=order) * x

    scale = sp ** (1.0 / eta)
    val = integrate_semi_infinite(integrand, r0, rel_tol, split=max(scale, r0, 1e-12))
    return math.exp(-2.0 * math.pi * tier.lam * val)


def interference_exponent(a, eta: float, model, n: int = 0, *,
                          rel_tol: float = DEFAULT_REL_TOL, order: int = LAPLACE_ORDER) -> np.ndarray:
    """[G(a), G'(a), ..., G^(n)(a)] of the normalised interference exponent.

    ``a`` may be an array; the result then has shape ``a.shape + (n + 1,)``.
    All entries are integrated together with one vector-valued adaptive rule.
    """
    a = np.asarray(a, dtype=float)
    flat = a.reshape(-1)
    if np.any(flat < 0):
        raise ValueError("a must be nonnegative")
    sign = np.array([1.0] + [-((-1.0) ** k) for k in range(1, n + 1)])

    def integrand(u):
        y = flat * u ** -eta
        cols = [laplace_complement(model, y, order=order) * u]
        for k in range(1, n + 1):
            cols.append(u ** (1.0 - eta * k) * power_moment(model, y, k, order=order))
        return np.stack(cols, axis=-1) * sign

    head_end = max(1.0, float(np.max(flat, initial=0.0)) ** (1.0 / eta)) + 1.0
    total = np.zeros((flat.size, n + 1))
    for lo, hi in ((1.0, head_end), (head_end, np.inf)):
        val, err = integrate.quad_vec(integrand, lo, hi, epsabs=1e-14, epsrel=rel_tol, limit=2000)
        total += val
    return (2.0 * math.pi * total).reshape(a.shape + (n + 1,))


def _exp_derivatives(c: float, g: np.ndarray) -> np.ndarray:
    """Derivatives 0..n of exp(-c G(a)) given G's derivatives ``g``."""
    n = len(g) - 1
    f = np.empty(n + 1)
    f[0] = math.exp(-c * g[0])
    for k in range(1, n + 1):
        f[k] = -c * sum(math.comb(k - 1, j) * g[j + 1] * f[k - 1 - j] for j in range(k))
    return f


def desired_components(model, order: int = LAPLACE_ORDER) -> list[tuple[float, int, float]]:
    """(probability, integer shape, scale) triples of the gamma mixture of the desired link.

    Raises UnsupportedCombination when the law is not an integer-shape gamma mixture.
    """
    if isinstance(model, TimeShared):
        return [(w * p, m, th) for w, sub in model.members() for p, m, th in desired_components(sub, order)]
    if isinstance(model, RicianPower):
        if model.K != 0.0:
            raise UnsupportedCombination("Rician desired fading with K > 0 has no analytic path; use simulate")
        return [(1.0, 1, model.Theta)]
    if isinstance(model, NakagamiLognormal):
        if model.m != round(model.m):
            raise UnsupportedCombination(f"non-integer Nakagami m={model.m} has no analytic path; use simulate")
        m, mu, zeta = int(round(model.m)), model.mu, model.zeta
    elif isinstance(model, RayleighLognormal):
        m, mu, zeta = 1, model.mu, model.zeta
    else:
        raise TypeError(f"unknown fading model {model!r}")
    p, theta = _gamma_components(float(m), mu, zeta, order)
    return [(float(pi), m, float(ti)) for pi, ti in zip(p, theta)]


@dataclass(frozen=True)
class _Component:
    weight: float
    a: float
    g: np.ndarray  # G^(0..m-1)(a)


def _prepare(mu: float, eta: float, desired, interferers, rel_tol: float, order: int) -> list[_Component]:
    parts = [(p, m, theta) for p, m, theta in desired_components(desired, order) if p > 1e-300]
    n = max(m for _, m, _ in parts) - 1
    a = np.array([mu / theta for _, _, theta in parts])
    g = interference_exponent(a, eta, interferers, n, rel_tol=rel_tol, order=order)
    return [_Component(p, ai, gi[:m]) for (p, m, _), ai, gi in zip(parts, a, g)]


def _conditional_success(comps: list[_Component], c: float) -> float:
    total = 0.0
    for comp in comps:
        f = _exp_derivatives(c, comp.g)
        total += comp.weight * sum((-comp.a) ** k / math.factorial(k) * f[k] for k in range(len(f)))
    return total


def conditional_success(sc: Scenario, tier_name: str, r: float, *, rel_tol: float = DEFAULT_REL_TOL,
                        order: int = LAPLACE_ORDER) -> float:
    """P[SIR > mu | serving distance r] for nearest association."""
    tier = sc.tier(tier_name)
    comps = _prepare(sc.mu, sc.eta, sc.fading_desired, sc.fading_interferers, rel_tol, order)
    return _conditional_success(comps, tier.lam * r * r)


def success_probability_generic(sc: Scenario, tier_name: str, *, rel_tol: float = DEFAULT_REL_TOL,
                                order: int = LAPLACE_ORDER) -> float:
    """int_0^inf P[SIR > mu | r] f_R(r) dr with f_R the nearest-BS distance density."""
    tier = sc.tier(tier_name)
    comps = _prepare(sc.mu, sc.eta, sc.fading_desired, sc.fading_interferers, rel_tol, order)
    lam = tier.lam

    def integrand(r):
        return _conditional_success(comps, lam * r * r) * nearest_distance_pdf(lam, r)

    return integrate_semi_infinite(integrand, 0.0, rel_tol, split=1.0 / math.sqrt(lam))


def closed_form_success(mu_linear: float, mode: str = "corrected", lam: float | None = None,
                        *, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Success probability for Rayleigh fading and eta = 4.

    corrected: 1 / (1 + sqrt(mu) arctan(sqrt(mu))), density-free.
    paper_literal: keeps arctan(r sqrt(mu)) from substituting without moving the
    lower limit, int exp(-lam pi r^2 sqrt(mu) arctan(r sqrt(mu))) f_R(r) dr.
    """
    if not mu_linear > 0:
        raise ValueError("SIR threshold must be positive")
    q = math.sqrt(mu_linear)
    if mode == "corrected":
        return 1.0 / (1.0 + q * math.atan(q))
    if mode != "paper_literal":
        raise ValueError(f"unknown formula mode {mode!r}")
    if lam is None or not lam > 0:
        raise ValueError("paper_literal mode needs a positive density")

    def integrand(r):
        return math.exp(-lam * math.pi * r * r * q * math.atan(r * q)) * nearest_distance_pdf(lam, r)

    return integrate_semi_infinite(integrand, 0.0, rel_tol, split=1.0 / math.sqrt(lam))


def _rayleigh_pair(sc: Scenario) -> bool:
    d, i = sc.fading_desired, sc.fading_interferers
    return (sc.eta == 4.0 and is_exponential(d) and is_exponential(i)
            and math.isclose(mean_power(d), mean_power(i), rel_tol=1e-12))


def _outage(sc: Scenario, tier_name: str, generic: bool, rel_tol: float, order: int) -> OutageEstimate:
    if sc.association != "nearest":
        raise UnsupportedCombination("analytic outage supports nearest association only; use simulate for max_sir")
    tier = sc.tier(tier_name)
    if sc.formula_mode == "paper_literal":
        if not _rayleigh_pair(sc):
            raise UnsupportedCombination("paper_literal mode exists only for Rayleigh fading with eta = 4")
        succ = closed_form_success(sc.mu, "paper_literal", tier.lam, rel_tol=rel_tol)
        method = "closed_form"
    elif _rayleigh_pair(sc) and not generic:
        succ = closed_form_success(sc.mu, "corrected")
        method = "closed_form"
    else:
        succ = success_probability_generic(sc, tier_name, rel_tol=rel_tol, order=order)
        method = "analytic"
    value = 1.0 - sc.p_serve * succ
    return OutageEstimate(min(1.0, max(0.0, value)), method)


def outage_direct(sc: Scenario, *, generic: bool = False, rel_tol: float = DEFAULT_REL_TOL,
                  order: int = LAPLACE_ORDER) -> OutageEstimate:
    """1 - p_serve * P[SIR > mu] for the macro user served by its nearest MBS."""
    return _outage(sc, "macro", generic, rel_tol, order)


def outage_offload(sc: Scenario, *, generic: bool = False, rel_tol: float = DEFAULT_REL_TOL,
                   order: int = LAPLACE_ORDER) -> OutageEstimate:
    """Same as :func:`outage_direct` over the small-cell tier."""
    return _outage(sc, "small", generic, rel_tol, order)
