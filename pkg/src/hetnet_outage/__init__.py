"""Outage analysis of macro-user offloading in two-tier Poisson HetNets under composite fading."""

from hetnet_outage.fading import (
    NakagamiLognormal,
    RayleighLognormal,
    RicianPower,
    TimeShared,
    laplace_power,
    mean_power,
    pdf_power,
    sample_power,
)
from hetnet_outage.scenario import OutageEstimate, Scenario, Tier

__all__ = [
    "NakagamiLognormal",
    "RayleighLognormal",
    "RicianPower",
    "TimeShared",
    "laplace_power",
    "mean_power",
    "pdf_power",
    "sample_power",
    "OutageEstimate",
    "Scenario",
    "Tier",
]
