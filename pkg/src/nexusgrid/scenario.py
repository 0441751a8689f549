"""Firm-level electricity projections under growth scenarios and their ensemble statistics.

Stock load compounds at ``g_stock`` regardless of scenario. AI load on new
sites compounds at the scenario's ``g_new``, and the full new-site load is
recovered by dividing by the firm's AI share for that year.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .domain import (
    ANCHOR_YEAR,
    FIRST_FORECAST_YEAR,
    AiShareSchedule,
    EnsembleResult,
    FirmTrajectory,
    Scenario,
    YearEnergy,
)


def ai_share(schedule: AiShareSchedule, year: int) -> float:
    if year < FIRST_FORECAST_YEAR:
        raise ValueError(f"AI share schedule starts in {FIRST_FORECAST_YEAR}, got {year}")
    if year == FIRST_FORECAST_YEAR:
        return schedule.p1
    if year <= FIRST_FORECAST_YEAR + 2:
        return schedule.p2
    return schedule.p3


def project_stock(e_stock_2024: float, g_stock: float, year: int) -> float:
    if year < ANCHOR_YEAR:
        raise ValueError(f"year must be >= {ANCHOR_YEAR}")
    return e_stock_2024 * (1.0 + g_stock) ** (year - ANCHOR_YEAR)


def project_ai_new(e_ai_prev: float, g_new: float) -> float:
    return e_ai_prev * (1.0 + g_new)


def new_total_from_ai(e_ai_new: float, p_ai: float) -> float:
    if not 0.0 < p_ai <= 1.0:
        raise ValueError(f"AI share must lie in (0, 1], got {p_ai}")
    return e_ai_new / p_ai


def project_firm(
    firm: str,
    scenario: Scenario,
    e_stock_2024: float,
    e_ai_new_2024: float,
    schedule: AiShareSchedule,
    horizon: int = 2030,
) -> FirmTrajectory:
    """Yearly series from the 2024 anchor through ``horizon``.

    The anchor year has no schedule entry of its own; its new-site total
    uses the baseline share ``p1`` so a frozen world (zero growth, constant
    share) is flat from 2024 on.
    """
    if e_stock_2024 < 0 or e_ai_new_2024 < 0:
        raise ValueError("anchors must be non-negative")
    if horizon < ANCHOR_YEAR:
        raise ValueError(f"horizon must be >= {ANCHOR_YEAR}")

    e_new = new_total_from_ai(e_ai_new_2024, schedule.p1)
    series = {ANCHOR_YEAR: YearEnergy(e_stock_2024, e_ai_new_2024, e_new, e_stock_2024 + e_new)}
    e_ai = e_ai_new_2024
    for year in range(FIRST_FORECAST_YEAR, horizon + 1):
        e_stock = project_stock(e_stock_2024, scenario.g_stock, year)
        e_ai = project_ai_new(e_ai, scenario.g_new)
        e_new = new_total_from_ai(e_ai, ai_share(schedule, year))
        series[year] = YearEnergy(e_stock, e_ai, e_new, e_stock + e_new)
    return FirmTrajectory(firm=firm, scenario=scenario.id, series=series)


def global_totals(trajectories: Iterable[FirmTrajectory]) -> dict[int, float]:
    """Sum ``e_tot`` over firms for every year, in sorted firm order."""
    trajectories = sorted(trajectories, key=lambda t: t.firm)
    if not trajectories:
        return {}
    years = trajectories[0].years
    return {y: math.fsum(t.series[y].e_tot for t in trajectories) for y in years}


def ensemble_aggregate(
    paths: Iterable[Mapping[int, float]], scenario: str = ""
) -> dict[int, EnsembleResult]:
    """Per-year mean and min/max band over global path totals."""
    paths = list(paths)
    if not paths:
        raise ValueError("ensemble needs at least one path")
    years = sorted(paths[0])
    for p in paths[1:]:
        if sorted(p) != years:
            raise ValueError("all paths must share the same year grid")
    out = {}
    for year in years:
        values = tuple(p[year] for p in paths)
        mean = math.fsum(values) / len(values)
        # keep min <= mean <= max under rounding of the mean
        lo, hi = min(values), max(values)
        out[year] = EnsembleResult(
            year=year,
            scenario=scenario,
            paths=values,
            mean=min(max(mean, lo), hi),
            min=lo,
            max=hi,
        )
    return out
