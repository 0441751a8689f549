"""Regional supply extrapolation, Power Stress Index and the global cross-check."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .domain import ANCHOR_YEAR, PsiRecord, SupplySeries

SUPPLY_START_YEAR = 2019

# Left-closed band edges: [0, .10) low, [.10, .25) elevated, [.25, .40) high, [.40, inf) extreme.
BAND_EDGES = (0.10, 0.25, 0.40)
BANDS = ("low", "elevated", "high", "extreme")

IEA_GLOBAL_DC_2030_TWH = 945.0
HYPERSCALE_SHARE = 0.70
TOP_FIRM_SHARE = 0.40


def supply_cagr(e_start: float, e_end: float, years: int) -> float:
    if not (e_start > 0 and e_end > 0):
        raise ValueError("CAGR needs positive endpoints")
    if years < 1:
        raise ValueError("CAGR needs years >= 1")
    return (e_end / e_start) ** (1.0 / years) - 1.0


# Same formula; separate name for headline growth checks on demand totals.
cagr_from_endpoints = supply_cagr


def fill_missing_years(history: Mapping[int, float]) -> dict[int, float]:
    """Linearly interpolate every missing year strictly between known years."""
    years = sorted(history)
    if not years:
        return {}
    grid = np.arange(years[0], years[-1] + 1)
    values = np.interp(grid, years, [history[y] for y in years])
    filled = {int(y): float(v) for y, v in zip(grid, values)}
    filled.update(history)  # known values stay bit-exact
    return filled


def series_cagr(
    series: SupplySeries, start_year: int = SUPPLY_START_YEAR, base_year: int = ANCHOR_YEAR
) -> float:
    filled = fill_missing_years(series.history)
    if start_year not in filled or base_year not in filled:
        raise ValueError(
            f"{series.region}: supply history must cover {start_year} and {base_year}"
        )
    return supply_cagr(filled[start_year], filled[base_year], base_year - start_year)


def extrapolate_supply(
    series: SupplySeries,
    target_year: int,
    start_year: int = SUPPLY_START_YEAR,
    base_year: int = ANCHOR_YEAR,
) -> float:
    if target_year < base_year:
        raise ValueError(f"target year must be >= {base_year}")
    cagr = series_cagr(series, start_year, base_year)
    base = fill_missing_years(series.history)[base_year]
    return base * (1.0 + cagr) ** (target_year - base_year)


def classify_band(psi: float) -> str:
    return BANDS[int(np.searchsorted(BAND_EDGES, psi, side="right"))]


def compute_psi(e_dc: float, e_supply: float, region: str = "", year: int = 0) -> PsiRecord:
    if not e_supply > 0:
        raise ValueError(f"supply must be positive, got {e_supply}")
    if e_dc < 0:
        raise ValueError(f"demand must be non-negative, got {e_dc}")
    psi = e_dc / e_supply
    return PsiRecord(region, year, e_dc, e_supply, psi, classify_band(psi))


def quantile_bins(values, n_bins: int = 4) -> list[int]:
    """1-based quantile bin of each value (quartiles by default)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    edges = np.quantile(values, np.linspace(0, 1, n_bins + 1)[1:-1])
    return [int(b) + 1 for b in np.searchsorted(edges, values, side="right")]


@dataclass
class PsiReport:
    year: int
    scenario: str
    records: list[PsiRecord]
    uncovered: list[str] = field(default_factory=list)


def psi_report(
    demand: Mapping[str, float],
    supply: Mapping[str, SupplySeries],
    year: int,
    scenario: str = "",
    n_bins: int = 4,
) -> PsiReport:
    """Rank regions by PSI, descending; ties go to the lower region key.

    Regions lacking a usable supply series are listed in ``uncovered``.
    """
    records, uncovered = [], []
    for region in sorted(demand):
        series = supply.get(region)
        if series is None or not series.cagr_available(SUPPLY_START_YEAR, ANCHOR_YEAR):
            uncovered.append(region)
            continue
        rec = compute_psi(demand[region], extrapolate_supply(series, year), region, year)
        records.append(replace(rec, scenario=scenario))
    records.sort(key=lambda r: (-r.psi, r.region))
    bins = quantile_bins([r.psi for r in records], n_bins)
    records = [replace(r, quantile_bin=b) for r, b in zip(records, bins)]
    return PsiReport(year, scenario, records, uncovered)


def cross_validate_global(
    global_dc_forecast: float = IEA_GLOBAL_DC_2030_TWH,
    hyperscale_share: float = HYPERSCALE_SHARE,
    top_firm_share: float = TOP_FIRM_SHARE,
) -> float:
    """Implied six-firm consumption from a global data-center forecast."""
    if not global_dc_forecast > 0:
        raise ValueError("global forecast must be positive")
    for share in (hyperscale_share, top_firm_share):
        if not 0.0 < share <= 1.0:
            raise ValueError(f"shares must lie in (0, 1], got {share}")
    return global_dc_forecast * hyperscale_share * top_firm_share
