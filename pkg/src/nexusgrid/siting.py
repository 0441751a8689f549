"""Expansion probabilities from siting evidence and regional allocation of firm load.

Negative sentiment is rectified to zero before normalizing, so hostile
coverage lowers a region's probability without producing negative mass.
When every rectified product is zero the distribution falls back to uniform.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable, Mapping

from .domain import AllocationWeights, FirmTrajectory, RegionMap, SiteRecord, SitingEvidence


def _normalize(mass: Mapping[str, float]) -> dict[str, float]:
    if not mass:
        raise ValueError("cannot normalize an empty set")
    total = math.fsum(mass.values())
    if total > 0:
        return {k: v / total for k, v in mass.items()}
    n = len(mass)
    return {k: 1.0 / n for k in mass}


def expansion_probabilities(evidence: Iterable[SitingEvidence]) -> dict[str, float]:
    """P_i proportional to max(S_i, 0) * R_i over regions.

    Several records for one region accumulate their products.
    """
    mass: dict[str, list[float]] = defaultdict(list)
    for ev in evidence:
        mass[ev.region].append(max(ev.sentiment, 0.0) * ev.relevance)
    if not mass:
        raise ValueError("expansion probabilities need at least one evidence record")
    return _normalize({r: math.fsum(v) for r, v in mass.items()})


def ai_weights(
    site_energies: Mapping[str, float], firm: str = "", year: int | None = None
) -> AllocationWeights:
    """Location weights proportional to modelled AI energy (uniform if all zero)."""
    if not site_energies:
        raise ValueError("AI weights need at least one location")
    if any(e < 0 for e in site_energies.values()):
        raise ValueError("AI energies must be non-negative")
    return AllocationWeights("ai", firm, _normalize(site_energies), year)


def hist_weights(inventory: Iterable[SiteRecord], firm: str) -> AllocationWeights:
    """Location weights proportional to end-2024 campus counts."""
    counts = {r.location: float(r.site_count) for r in inventory if r.firm == firm}
    if not counts:
        raise ValueError(f"firm {firm!r} not present in inventory")
    return AllocationWeights("historical", firm, _normalize(counts))


def select_ai_locations(
    locations: Iterable[str],
    probabilities: Mapping[str, float] | None,
    region_map: RegionMap,
) -> list[str]:
    """Locations whose region carries positive expansion probability.

    With no evidence, or if nothing survives, every location is kept.
    """
    locations = list(locations)
    if not probabilities:
        return locations
    kept = [loc for loc in locations if probabilities.get(region_map.get(loc, ""), 0.0) > 0]
    return kept or locations


def allocate_regional(
    trajectory: FirmTrajectory,
    w_ai: AllocationWeights,
    w_hist: AllocationWeights,
    region_map: RegionMap,
    year: int,
) -> dict[str, float]:
    """Split one firm-year total across regions.

    AI new-site load follows ``w_ai``; non-AI new-site load and stock
    follow ``w_hist``.
    """
    if year not in trajectory.series:
        raise ValueError(f"year {year} not in trajectory for {trajectory.firm}")
    e = trajectory.series[year]
    legacy = e.e_non_ai_new + e.e_stock

    parts: dict[str, list[float]] = defaultdict(list)
    for weights, energy in ((w_ai.weights, e.e_ai_new), (w_hist.weights, legacy)):
        for loc in sorted(weights):
            if loc not in region_map:
                raise KeyError(f"location {loc!r} missing from region map")
            parts[region_map[loc]].append(weights[loc] * energy)
    return {r: math.fsum(parts[r]) for r in sorted(parts)}


def regional_totals(per_firm: Iterable[Mapping[str, float]]) -> dict[str, float]:
    parts: dict[str, list[float]] = defaultdict(list)
    for regional in per_firm:
        for region, value in regional.items():
            parts[region].append(value)
    return {r: math.fsum(parts[r]) for r in sorted(parts)}
