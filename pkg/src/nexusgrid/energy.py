"""Per-site IT and facility energy, and year-on-year evolution of fleet parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

from .domain import BaselineParams

# Empirical hyperscale bands for parameter evolution (per year).
CAPACITY_GROWTH_BAND = (0.10, 0.20)
EFFICIENCY_GAIN_BAND = (0.01, 0.03)
INFERENCE_UTILIZATION_TYPICAL = (0.2, 0.4)


@dataclass(frozen=True)
class EnergyRecord:
    e_it: float  # MWh
    e_dc: float  # MWh
    pue_used: float


@dataclass(frozen=True)
class EvolutionRates:
    capacity_growth: float = 0.15
    efficiency_gain: float = 0.02
    utilization_drift: float = 0.0

    def __post_init__(self):
        lo, hi = CAPACITY_GROWTH_BAND
        if not lo <= self.capacity_growth <= hi:
            raise ValueError(f"capacity_growth {self.capacity_growth} outside [{lo}, {hi}]")
        lo, hi = EFFICIENCY_GAIN_BAND
        if not lo <= self.efficiency_gain <= hi:
            raise ValueError(f"efficiency_gain {self.efficiency_gain} outside [{lo}, {hi}]")
        if not 0.0 <= self.utilization_drift <= 1.0:
            raise ValueError("utilization_drift must lie in [0, 1]")


def compute_e_it(params: BaselineParams) -> float:
    """IT load energy of a site in MWh (kW x h gives kWh, divided by 1000)."""
    train = params.n_train * params.p_avg_train * params.u_train * params.h_train
    inference = (
        params.n_inference * params.p_avg_inference * params.u_inference * params.h_inference
    )
    return (train + inference) / 1000.0


def compute_e_dc(params: BaselineParams, pue: float | None = None) -> EnergyRecord:
    """Facility energy: IT load scaled by PUE. ``pue`` overrides ``params.pue``."""
    pue_used = params.pue if pue is None else pue
    if not pue_used >= 1.0:
        raise ValueError(f"PUE must be >= 1.0, got {pue_used}")
    e_it = compute_e_it(params)
    return EnergyRecord(e_it=e_it, e_dc=pue_used * e_it, pue_used=pue_used)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def evolve_baseline(
    params: BaselineParams,
    rates: EvolutionRates,
    years: int,
    pue_path: Mapping[int, float] | None = None,
) -> BaselineParams:
    """Project site parameters ``years`` ahead.

    Accelerator counts compound with capacity growth and are rounded half-up;
    per-accelerator power shrinks with efficiency gains; utilization drifts up
    additively and is clamped at 1. PUE is held unless ``pue_path`` maps the
    horizon offset to a value.
    """
    if years < 0:
        raise ValueError("years must be >= 0")
    if years == 0 and not (pue_path and 0 in pue_path):
        return params
    growth = (1.0 + rates.capacity_growth) ** years
    shrink = (1.0 - rates.efficiency_gain) ** years
    drift = rates.utilization_drift * years
    pue = params.pue
    if pue_path and years in pue_path:
        pue = pue_path[years]
    return replace(
        params,
        n_train=_round_half_up(params.n_train * growth),
        n_inference=_round_half_up(params.n_inference * growth),
        p_avg_train=params.p_avg_train * shrink,
        p_avg_inference=params.p_avg_inference * shrink,
        u_train=min(1.0, params.u_train + drift),
        u_inference=min(1.0, params.u_inference + drift),
        pue=pue,
    )


def advisories(params: BaselineParams) -> list[str]:
    """Soft warnings that never block a run."""
    lo, hi = INFERENCE_UTILIZATION_TYPICAL
    notes = []
    if params.n_inference > 0 and not lo <= params.u_inference <= hi:
        notes.append(
            f"inference utilization {params.u_inference:g} outside typical band [{lo}, {hi}]"
        )
    return notes
