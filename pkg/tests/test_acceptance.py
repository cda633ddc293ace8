"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line; the lines are printed in the
pytest terminal summary, or directly when this file runs as a script.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy import integrate

from hetnet_outage.analytic import closed_form_success, outage_direct, outage_offload
from hetnet_outage.bessel import fit_bessel_series, series_max_rel_error
from hetnet_outage.fading import NakagamiLognormal, RayleighLognormal, RicianPower, TimeShared, pdf_power
from hetnet_outage.montecarlo import SimConfig, simulate_direct, validate
from hetnet_outage.quadrature import gauss_hermite, paired_form
from hetnet_outage.scenario import Scenario, Tier, dbm_to_watts

# Constants quoted for the 10-point rule with the outermost pair left out.
QUOTED_ALPHAS = [0.000733446, 0.019126, 0.135462, 0.344663]
QUOTED_BETAS = [3.58178, 2.48435, 1.46597, 0.484934]


@pytest.fixture
def verdict(request):
    lines = getattr(request.config, "acceptance_lines", None)

    def record(number, title, ok, detail, elapsed):
        line = f"{'PASS' if ok else 'FAIL'}  C{number} {title}: {detail} [{elapsed:.1f} s]"
        if lines is not None:
            lines.append(line)
        print(line)
        return ok

    return record


def agree_to_digits(got, want, digits):
    want = np.asarray(want, dtype=float)
    unit = 10.0 ** (np.floor(np.log10(np.abs(want))) - (digits - 1))
    return np.abs(np.asarray(got) - want) <= 0.5 * unit


def integral_0_inf(f):
    total = 0.0
    for a, b in ((0, 1e-6), (1e-6, 1), (1, 10), (10, np.inf)):
        total += integrate.quad(f, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
    return total


def test_c1_literal_mode_anchor(verdict):
    t0 = time.perf_counter()
    sc = Scenario(macro=Tier(4.0, dbm_to_watts(43)), small=Tier(50.0, dbm_to_watts(23)), eta=4.0,
                  sir_threshold_dB=5.0, p_serve=0.25, formula_mode="paper_literal")
    d, o = outage_direct(sc).value, outage_offload(sc).value
    sweep = [outage_offload(Scenario(small=Tier(lam, dbm_to_watts(23)), formula_mode="paper_literal")).value
             for lam in (10, 20, 30, 40, 50)]
    elapsed = time.perf_counter() - t0
    ok = abs(d - 0.88) <= 0.03 and abs(o - 0.82) <= 0.03 and elapsed < 10
    detail = (f"direct={d:.4f} (0.88+-0.03) offload={o:.4f} (0.82+-0.03); "
              f"lambda_S 10..50 offload {' > '.join(f'{v:.4f}' for v in sweep)}")
    assert verdict(1, "literal-mode anchor", ok, detail, elapsed)


def test_c2_rayleigh_reduction(verdict):
    t0 = time.perf_counter()
    h = np.linspace(0.0, 10.0, 10001)
    approx = pdf_power(NakagamiLognormal(1.0, 0.0, 0.0), h, "approx", order=10, drop_pairs=1)
    err = float(np.max(np.abs(approx - np.exp(-h))))
    factor = float(approx[0])
    elapsed = time.perf_counter() - t0
    ok = err <= 5e-3 and elapsed < 1
    assert verdict(2, "Rayleigh reduction", ok, f"sup|approx - exp(-h)| = {err:.2e} (<= 5e-3), "
                   f"prefactor {factor:.6f}", elapsed)


def test_c3_gauss_hermite_constants(verdict):
    t0 = time.perf_counter()
    paired = paired_form(gauss_hermite(10), drop_pairs=1)
    a_ok = agree_to_digits(paired.alphas, QUOTED_ALPHAS, 5)
    b_ok = agree_to_digits(paired.betas, QUOTED_BETAS, 5)
    elapsed = time.perf_counter() - t0
    ok = bool(a_ok.all() and b_ok.all()) and elapsed < 1
    detail = (f"betas match {int(b_ok.sum())}/4, alphas match {int(a_ok.sum())}/4 to 5 digits; "
              f"computed alphas {', '.join(f'{a:.6g}' for a in paired.alphas)}")
    assert verdict(3, "Gauss-Hermite constants", ok, detail, elapsed)


def normalisation_grid():
    models = []
    for m in (0.5, 1.0, 2.0, 4.0):
        for z in (0.0, 4.0, 8.0):
            models.append(NakagamiLognormal(m, 0.0, z))
    for z in (0.0, 4.0, 8.0):
        models.append(RayleighLognormal(0.0, z))
    for K in (0.0, 1.0, 5.0):
        models.append(RicianPower(K, 1.0))
    for T in (0.0, 0.5, 1.0):
        for K in (0.0, 1.0, 5.0):
            for z in (0.0, 4.0, 8.0):
                models.append(TimeShared(T, RicianPower(K, 1.0), RayleighLognormal(0.0, z)))
    return models


def test_c4_normalisation(verdict):
    t0 = time.perf_counter()
    worst_exact = worst_approx = 0.0
    worst_model = None
    for model in normalisation_grid():
        e = abs(integral_0_inf(lambda h: pdf_power(model, h, "exact")) - 1)
        a = abs(integral_0_inf(lambda h: pdf_power(model, h, "approx")) - 1)
        worst_exact = max(worst_exact, e)
        if a > worst_approx:
            worst_approx, worst_model = a, model
    elapsed = time.perf_counter() - t0
    ok = worst_exact <= 1e-6 and worst_approx <= 5e-3 and elapsed < 30
    assert verdict(4, "normalisation suite", ok, f"{len(normalisation_grid())} models, max |int-1| exact "
                   f"{worst_exact:.1e} (<= 1e-6), approx {worst_approx:.1e} (<= 5e-3)", elapsed)


def test_c5_analytic_vs_monte_carlo(verdict):
    t0 = time.perf_counter()
    parts, ok = [], True
    for i, sir in enumerate((0.0, 3.0, 5.0, 10.0)):
        rep = validate(Scenario(sir_threshold_dB=sir, p_serve=1.0), trials=1_000_000, seed=100 + i)
        ok &= rep.passed
        parts.append(f"{sir:g}dB gap {max(abs(r.gap) for r in rep.rows):.4f}/tol {min(r.tolerance for r in rep.rows):.4f}")
    mc = simulate_direct(SimConfig(Scenario(sir_threshold_dB=0.0, p_serve=1.0), trials=1_000_000, master_seed=7))
    anchor = 1 - closed_form_success(1.0)
    ok &= abs(anchor - 0.4399) <= 0.003 and abs(mc.outage.value - 0.4399) <= 0.003
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    detail = "; ".join(parts) + f"; closed form {anchor:.4f} vs MC {mc.outage.value:.4f}+-{mc.outage.ci_halfwidth:.4f}"
    assert verdict(5, "analytic vs Monte Carlo", ok, detail, elapsed)


SCALE_MODELS = [
    NakagamiLognormal(1.0, 0.0, 0.0),
    NakagamiLognormal(2.0, 0.0, 4.0),
    NakagamiLognormal(0.5, 0.0, 4.0),
    RayleighLognormal(0.0, 8.0),
    RicianPower(1.0, 1.0),
    TimeShared(0.5, RicianPower(1.0, 1.0), RayleighLognormal(0.0, 8.0)),
]


def test_c6_scale_invariance(verdict):
    t0 = time.perf_counter()
    densities = (1.0, 10.0, 100.0)
    ok, analytic_spread, mc_bad, n_analytic = True, 0.0, [], 0
    for k, model in enumerate(SCALE_MODELS):
        scen = [Scenario(macro=Tier(lam, 20.0), fading_desired=model, p_serve=1.0) for lam in densities]
        try:
            vals = [outage_direct(s).value for s in scen]
            analytic_spread = max(analytic_spread, max(vals) - min(vals))
            n_analytic += 1
        except ValueError:
            pass
        est = [simulate_direct(SimConfig(s, trials=100_000, master_seed=10 * k + j)).outage for j, s in enumerate(scen)]
        for a in range(3):
            for b in range(a + 1, 3):
                if abs(est[a].value - est[b].value) > est[a].ci_halfwidth + est[b].ci_halfwidth:
                    mc_bad.append((k, densities[a], densities[b]))
    ok = analytic_spread < 1e-6 and not mc_bad
    elapsed = time.perf_counter() - t0
    detail = (f"analytic spread {analytic_spread:.1e} over {n_analytic} models (< 1e-6); "
              f"MC CI overlap {3 * len(SCALE_MODELS) - len(mc_bad)}/{3 * len(SCALE_MODELS)} pairs")
    assert verdict(6, "scale invariance", ok, detail, elapsed)


def test_c7_bessel_series(verdict):
    t0 = time.perf_counter()
    series = fit_bessel_series(4, 20.0)
    err = series_max_rel_error(series)
    norms = [abs(integral_0_inf(lambda h: pdf_power(RicianPower(K, 1.0), h, "approx", series=series)) - 1)
             for K in (0.0, 1.0, 5.0)]
    elapsed = time.perf_counter() - t0
    ok = err <= 0.01 and max(norms) <= 5e-3 and elapsed < 10
    assert verdict(7, "Bessel series fit", ok, f"max rel error {err:.2e} (<= 1e-2), sum alpha "
                   f"{sum(series.alphas):.5f}, Rician approx max |int-1| {max(norms):.1e}", elapsed)


def _separated(lo, hi):
    # lower-outage estimate's interval lies strictly below the higher one's
    return hi.value - lo.value > hi.ci_halfwidth + lo.ci_halfwidth


def test_c8_fading_trends(verdict):
    t0 = time.perf_counter()

    def run(desired, interferers=None, seed=0):
        sc = Scenario(sir_threshold_dB=5.0, fading_desired=desired, fading_interferers=interferers)
        return simulate_direct(SimConfig(sc, trials=100_000, master_seed=seed)).outage

    rayleigh = RicianPower(0.0, 1.0)
    k0, k1 = run(RicianPower(0.0, 1.0), rayleigh, 1), run(RicianPower(1.0, 1.0), rayleigh, 2)
    z4, z8 = run(NakagamiLognormal(1.0, 0.0, 4.0), seed=3), run(NakagamiLognormal(1.0, 0.0, 8.0), seed=4)
    ric, sh = RicianPower(1.0, 1.0), RayleighLognormal(0.0, 8.0)
    t_0, t_1 = run(TimeShared(0.0, ric, sh), seed=5), run(TimeShared(1.0, ric, sh), seed=6)
    checks = {"K 0->1 decreases": _separated(k1, k0),
              "zeta 4->8 dB increases": _separated(z4, z8),
              "T=1 above T=0": _separated(t_0, t_1)}
    elapsed = time.perf_counter() - t0
    detail = (f"K0 {k0.value:.4f} K1 {k1.value:.4f}; zeta4 {z4.value:.4f} zeta8 {z8.value:.4f}; "
              f"T0 {t_0.value:.4f} T1 {t_1.value:.4f}; " + ", ".join(f"{k}: {'ok' if v else 'no'}"
                                                                     for k, v in checks.items()))
    assert verdict(8, "fading trends", all(checks.values()), detail, elapsed)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
