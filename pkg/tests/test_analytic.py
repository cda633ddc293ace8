import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetnet_outage.analytic import (
    closed_form_success,
    conditional_success,
    interference_exponent,
    laplace_interference,
    outage_direct,
    outage_offload,
    success_probability_generic,
)
from hetnet_outage.fading import NakagamiLognormal, RayleighLognormal, RicianPower, TimeShared
from hetnet_outage.scenario import Scenario, Tier, UnsupportedCombination, dbm_to_watts

RAYLEIGH = NakagamiLognormal()


def rayleigh(**kw):
    return Scenario(**kw)


class TestLaplaceInterference:
    def test_zero_s(self):
        assert laplace_interference(0.0, Tier(4.0, 1.0), 4.0, 0.3, RAYLEIGH) == 1.0

    def test_vanishing_density(self):
        assert laplace_interference(5.0, Tier(1e-12, 1.0), 4.0, 0.1, RAYLEIGH) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("mu,r0,lam", [(1.0, 0.3, 4.0), (10 ** 0.5, 0.1, 50.0), (10.0, 1.0, 0.5)])
    def test_rayleigh_closed_form(self, mu, r0, lam):
        tier = Tier(lam, 20.0)
        got = laplace_interference(mu * r0 ** 4 / tier.power, tier, 4.0, r0, RAYLEIGH)
        q = math.sqrt(mu)
        assert got == pytest.approx(math.exp(-math.pi * lam * r0 ** 2 * q * math.atan(q)), rel=1e-8)

    @settings(max_examples=15)
    @given(st.floats(1e-3, 1e3), st.floats(1.01, 3.0), st.floats(0.01, 2.0))
    def test_bounds_and_monotonicity(self, s, grow, r0):
        model = RayleighLognormal(0.0, 6.0)
        tier = Tier(2.0, 1.0)
        base = laplace_interference(s, tier, 4.0, r0, model)
        assert 0 < base <= 1
        assert laplace_interference(s * grow, tier, 4.0, r0, model) <= base
        assert laplace_interference(s, Tier(2.0 * grow, 1.0), 4.0, r0, model) <= base
        assert laplace_interference(s, tier, 4.0, r0 * grow, model) >= base

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            laplace_interference(-1.0, Tier(1.0, 1.0), 4.0, 0.0, RAYLEIGH)


class TestClosedForm:
    def test_corrected_unit_threshold(self):
        assert closed_form_success(1.0) == pytest.approx(1 / (1 + math.pi / 4), rel=1e-15)
        assert closed_form_success(1.0) == pytest.approx(0.56010, abs=5e-6)

    def test_corrected_small_threshold(self):
        assert closed_form_success(1e-12) == pytest.approx(1.0, abs=1e-11)

    def test_corrected_is_density_free(self):
        vals = {closed_form_success(3.0, "corrected", lam) for lam in (None, 1.0, 10.0, 100.0)}
        assert len(vals) == 1

    def test_paper_literal_anchor(self):
        # With p_serve = 0.25 this reproduces the quoted 0.88 direct outage.
        val = closed_form_success(10 ** 0.5, "paper_literal", 4.0)
        assert 1 - 0.25 * val == pytest.approx(0.88, abs=0.03)
        assert val == pytest.approx(0.5649, abs=5e-4)

    def test_paper_literal_depends_on_density(self):
        vals = [closed_form_success(10 ** 0.5, "paper_literal", lam) for lam in (10, 20, 30, 40, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_invalid(self):
        with pytest.raises(ValueError):
            closed_form_success(0.0)
        with pytest.raises(ValueError):
            closed_form_success(1.0, "paper_literal")
        with pytest.raises(ValueError):
            closed_form_success(1.0, "literal")


class TestGenericPipeline:
    @pytest.mark.parametrize("sir_dB", [-5.0, 0.0, 5.0, 10.0])
    def test_matches_closed_form_for_rayleigh(self, sir_dB):
        sc = Scenario(sir_threshold_dB=sir_dB)
        assert success_probability_generic(sc, "macro") == pytest.approx(closed_form_success(sc.mu), abs=1e-6)

    def test_conditional_success_matches_pgfl_integral(self):
        sc = Scenario(fading_desired=RayleighLognormal(0.0, 0.0), fading_interferers=RayleighLognormal(0.0, 6.0))
        r = 0.2
        tier = sc.macro
        want = laplace_interference(sc.mu * r ** 4 / tier.power, tier, 4.0, r, sc.fading_interferers)
        assert conditional_success(sc, "macro", r) == pytest.approx(want, rel=1e-7)

    def test_gamma_desired_against_laplace_derivative(self):
        # m=2: P[h > x] = exp(-2x)(1+2x)  =>  S = L(s) - s L'(s) with s scaled by the desired mean
        sc = Scenario(fading_desired=NakagamiLognormal(2.0), fading_interferers=RAYLEIGH)
        r, tier = 0.3, sc.macro
        s = 2 * sc.mu * r ** 4 / tier.power
        L = lambda x: laplace_interference(x, tier, 4.0, r, RAYLEIGH, rel_tol=1e-12)
        d = 1e-4 * s
        want = L(s) - s * (L(s + d) - L(s - d)) / (2 * d)
        assert conditional_success(sc, "macro", r) == pytest.approx(want, abs=1e-7)

    @pytest.mark.parametrize("model", [
        NakagamiLognormal(2.0, 0.0, 4.0),
        RayleighLognormal(0.0, 8.0),
        TimeShared(0.5, RicianPower(0.0, 1.0), RayleighLognormal(0.0, 8.0)),
    ])
    def test_scale_invariance(self, model):
        vals = [outage_direct(Scenario(macro=Tier(lam, 7.0), fading_desired=model)).value for lam in (1, 10, 100)]
        assert max(vals) - min(vals) < 1e-6

    def test_rician_interferers_allowed(self):
        sc = Scenario(fading_desired=RAYLEIGH, fading_interferers=RicianPower(1.0, 1.0))
        est = outage_direct(sc)
        assert est.method == "analytic"
        assert 0 < est.value < 1

    def test_exponent_derivatives_by_finite_difference(self):
        model = RayleighLognormal(0.0, 6.0)
        a = np.array([0.5, 2.0])
        g = interference_exponent(a, 4.0, model, 2)
        h = 1e-4
        gp = interference_exponent(a + h, 4.0, model, 0)[..., 0]
        gm = interference_exponent(a - h, 4.0, model, 0)[..., 0]
        np.testing.assert_allclose(g[:, 1], (gp - gm) / (2 * h), rtol=1e-6)
        np.testing.assert_allclose(g[:, 2], (gp - 2 * g[:, 0] + gm) / h ** 2, rtol=1e-4)


class TestOutage:
    def test_unit_threshold_full_service(self):
        sc = Scenario(sir_threshold_dB=0.0, p_serve=1.0)
        assert outage_direct(sc).value == pytest.approx(1 - 1 / (1 + math.pi / 4), rel=1e-14)
        assert outage_direct(sc).method == "closed_form"

    def test_vanishing_threshold(self):
        assert outage_direct(Scenario(sir_threshold_dB=-80.0, p_serve=1.0)).value < 1e-4

    def test_offload_equals_direct_in_corrected_mode(self):
        sc = Scenario(macro=Tier(3.0, 100.0), small=Tier(70.0, 0.1))
        assert outage_offload(sc).value == outage_direct(sc).value

    def test_paper_literal_values(self):
        sc = Scenario(formula_mode="paper_literal")
        assert outage_direct(sc).value == pytest.approx(0.88, abs=0.03)
        assert outage_offload(sc).value == pytest.approx(0.82, abs=0.03)

    def test_paper_literal_offload_decreases_with_density(self):
        vals = [outage_offload(Scenario(small=Tier(lam, dbm_to_watts(23)), formula_mode="paper_literal")).value
                for lam in (10, 20, 30, 40, 50)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("mode,model", [
        ("corrected", RAYLEIGH),
        ("paper_literal", RAYLEIGH),
        ("corrected", NakagamiLognormal(2.0, 0.0, 4.0)),
        ("corrected", TimeShared(1.0, None, RayleighLognormal(0.0, 8.0))),
    ])
    def test_monotone_in_threshold(self, mode, model):
        vals = [outage_direct(Scenario(sir_threshold_dB=t, fading_desired=model, formula_mode=mode)).value
                for t in (-3.0, 1.0, 5.0, 9.0)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_p_serve_is_linear(self):
        full = outage_direct(Scenario(p_serve=1.0)).value
        assert outage_direct(Scenario(p_serve=0.3)).value == pytest.approx(1 - 0.3 * (1 - full), abs=1e-15)

    @pytest.mark.parametrize("sc", [
        Scenario(association="max_sir"),
        Scenario(formula_mode="paper_literal", fading_desired=NakagamiLognormal(2.0)),
        Scenario(formula_mode="paper_literal", eta=3.5),
        Scenario(fading_desired=RicianPower(1.0, 1.0)),
        Scenario(fading_desired=NakagamiLognormal(1.5)),
        Scenario(fading_desired=TimeShared(0.5, RicianPower(1.0), RayleighLognormal(0, 8))),
    ])
    def test_unsupported_combinations(self, sc):
        with pytest.raises(UnsupportedCombination):
            outage_direct(sc)

    def test_generic_flag_agrees_with_closed_form(self):
        sc = Scenario()
        assert outage_direct(sc, generic=True).value == pytest.approx(outage_direct(sc).value, abs=1e-6)
        assert outage_direct(sc, generic=True).method == "analytic"
