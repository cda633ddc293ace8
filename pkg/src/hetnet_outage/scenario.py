"""Network description shared by the analytic and Monte Carlo estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from hetnet_outage.fading import FadingModel, NakagamiLognormal

ASSOCIATIONS = ("nearest", "max_sir")
FORMULA_MODES = ("corrected", "paper_literal")
METHODS = ("analytic", "closed_form", "monte_carlo")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


class UnsupportedCombination(ValueError):
    """The requested model/mode combination has no analytic path."""


@dataclass(frozen=True)
class Tier:
    """One BS tier: PPP density (per unit area) and transmit power (W)."""

    lam: float
    power: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"tier density must be positive, got {self.lam}")
        if not (self.power > 0 and math.isfinite(self.power)):
            raise ValueError(f"tier power must be positive, got {self.power}")

    @classmethod
    def from_dbm(cls, lam: float, power_dbm: float) -> "Tier":
        return cls(lam, dbm_to_watts(power_dbm))


@dataclass(frozen=True)
class Scenario:
    """Two-tier downlink scenario; defaults follow the numerical study (eta=4, p_s=0.25, 43/23 dBm, lambda_M=4)."""

    macro: Tier = Tier(4.0, dbm_to_watts(43.0))
    small: Tier = Tier(50.0, dbm_to_watts(23.0))
    eta: float = 4.0
    sir_threshold_dB: float = 5.0
    p_serve: float = 0.25
    fading_desired: FadingModel = NakagamiLognormal()
    fading_interferers: FadingModel | None = None
    association: str = "nearest"
    formula_mode: str = "corrected"
    mu: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.eta > 2:
            raise ValueError(f"path-loss exponent must exceed 2, got {self.eta}")
        if not math.isfinite(self.sir_threshold_dB):
            raise ValueError("SIR threshold must be finite")
        if not 0.0 < self.p_serve <= 1.0:
            raise ValueError(f"p_serve must lie in (0, 1], got {self.p_serve}")
        if self.association not in ASSOCIATIONS:
            raise ValueError(f"association must be one of {ASSOCIATIONS}, got {self.association!r}")
        if self.formula_mode not in FORMULA_MODES:
            raise ValueError(f"formula_mode must be one of {FORMULA_MODES}, got {self.formula_mode!r}")
        if self.fading_interferers is None:
            object.__setattr__(self, "fading_interferers", self.fading_desired)
        object.__setattr__(self, "mu", db_to_linear(self.sir_threshold_dB))

    def tier(self, name: str) -> Tier:
        if name == "macro":
            return self.macro
        if name == "small":
            return self.small
        raise ValueError(f"unknown tier {name!r}")


@dataclass(frozen=True)
class OutageEstimate:
    value: float
    method: str
    ci_halfwidth: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"outage must lie in [0, 1], got {self.value}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if (self.ci_halfwidth is not None) != (self.method == "monte_carlo"):
            raise ValueError("a confidence interval is carried by Monte Carlo estimates only")
