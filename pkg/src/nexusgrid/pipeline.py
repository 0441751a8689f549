"""End-to-end run: ingest, forecast, allocate, PSI, and output files.

Ensemble paths differ only in which siting-evidence variant they use; path
``p`` (1-based) takes variant ``(seed + p - 1) mod n_variants`` from the
sorted variant list. A variant decides which regions are eligible for a
firm's new AI sites (positive expansion probability); the AI weights over
eligible locations stay proportional to modelled site energy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import io as nio
from .domain import (
    ANCHOR_YEAR,
    MWH_PER_TWH,
    SCENARIO_ORDER,
    BaselineParams,
    EnsembleResult,
    FirmTrajectory,
    SiteRecord,
    SitingEvidence,
    SupplySeries,
    Violation,
    validate_dataset,
)
from .energy import advisories, compute_e_dc, evolve_baseline
from .psi import PsiReport, cagr_from_endpoints, cross_validate_global, psi_report
from .scenario import ensemble_aggregate, global_totals, project_firm
from .siting import (
    ai_weights,
    allocate_regional,
    expansion_probabilities,
    hist_weights,
    regional_totals,
    select_ai_locations,
)

log = logging.getLogger(__name__)

STAGES = ("forecast", "allocate", "psi")
CONSERVATION_TOL = 1e-9
CROSSCHECK_RANGE_TWH = (239.0, 295.0)

TRAJECTORY_HEADER = ("firm", "scenario", "year", "e_stock", "e_ai_new", "e_new", "e_tot")
ENSEMBLE_HEADER = ("scenario", "year", "mean", "min", "max", "paths")
REGIONAL_HEADER = (
    "scenario",
    "year",
    "region",
    "demand_twh",
    "min_twh",
    "max_twh",
    "scenario_min_twh",
    "scenario_max_twh",
)
PSI_HEADER = ("region", "year", "scenario", "e_dc", "e_supply", "psi", "band", "quantile_bin")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str, io_failure: bool = False):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.io_failure = io_failure


@dataclass
class Dataset:
    inventory: list[SiteRecord] = field(default_factory=list)
    region_map: dict[str, str] = field(default_factory=dict)
    supply: dict[str, SupplySeries] = field(default_factory=dict)
    evidence: list[SitingEvidence] = field(default_factory=list)
    sites: dict[tuple[str, str], BaselineParams] = field(default_factory=dict)


@dataclass
class RunArtifacts:
    trajectories: dict[tuple[str, str], FirmTrajectory] = field(default_factory=dict)
    ensembles: dict[str, dict[int, EnsembleResult]] = field(default_factory=dict)
    regional: dict[tuple[str, int, int], dict[str, float]] = field(default_factory=dict)
    regional_rows: list[tuple] = field(default_factory=list)
    psi_reports: dict[str, PsiReport] = field(default_factory=dict)
    validation: dict = field(default_factory=dict)
    written: list[Path] = field(default_factory=list)


def load_dataset(config: nio.RunConfig) -> Dataset:
    ds = Dataset()
    if config.inventory:
        ds.inventory = nio.ingest_inventory(config.inventory)
    if config.region_map:
        ds.region_map = nio.ingest_region_map(config.region_map)
    if config.supply:
        ds.supply = nio.ingest_supply(config.supply)
    if config.evidence:
        ds.evidence = nio.ingest_evidence(config.evidence)
    if config.sites:
        ds.sites = nio.ingest_sites(config.sites)
    return ds


def dataset_violations(config: nio.RunConfig, ds: Dataset) -> list[Violation]:
    """Semantic checks on the whole run: dataset plus config cross-references."""
    firms = set(config.anchors) | {r.firm for r in ds.inventory}
    found = validate_dataset(ds.inventory, ds.region_map, config.schedules, firms)
    inventory_firms = {r.firm for r in ds.inventory}
    if ds.inventory:
        for firm in sorted(set(config.anchors) - inventory_firms):
            found.append(Violation("missing firm", f"anchored firm {firm} absent from inventory"))
    for firm, loc in sorted(ds.sites):
        if loc not in ds.region_map and ds.region_map:
            found.append(Violation("unmapped location", f"{loc} ({firm}, sites file)"))
    return found


def path_variants(config: nio.RunConfig, evidence: Sequence[SitingEvidence]) -> list[str | None]:
    """Evidence variant used by each path, in path order."""
    variants = config.variants or sorted({e.variant for e in evidence})
    if not variants:
        return [None] * config.path_count
    n = len(variants)
    return [variants[(config.seed + p) % n] for p in range(config.path_count)]


def site_ai_energy(
    ds: Dataset, firm: str, year: int, rates
) -> dict[str, float]:
    """Modelled AI energy (TWh) at each of a firm's locations for ``year``."""
    energies = {r.location: (r.e_ai_loc or 0.0) for r in ds.inventory if r.firm == firm}
    for (f, loc), params in sorted(ds.sites.items()):
        if f != firm:
            continue
        evolved = evolve_baseline(params, rates, year - ANCHOR_YEAR)
        energies[loc] = compute_e_dc(evolved).e_dc / MWH_PER_TWH
    return energies


def _forecast(config, scenarios, art: RunArtifacts):
    if not config.anchors:
        raise ValueError("no firm anchors configured")
    for sid in scenarios:
        scenario = config.scenarios[sid]
        for firm in sorted(config.anchors):
            a = config.anchors[firm]
            art.trajectories[(sid, firm)] = project_firm(
                firm, scenario, a.e_stock_2024, a.e_ai_new_2024, config.schedules[firm],
                config.horizon,
            )
        trajs = [art.trajectories[(sid, f)] for f in sorted(config.anchors)]
        totals = global_totals(trajs)
        # Paths share firm totals; they diverge only in regional siting.
        art.ensembles[sid] = ensemble_aggregate([totals] * config.path_count, sid)


def _allocate(config, ds: Dataset, scenarios, art: RunArtifacts):
    if not ds.inventory or not ds.region_map:
        raise ValueError("inventory and region map required")
    variants = path_variants(config, ds.evidence)
    firms = sorted(config.anchors)
    years = list(range(ANCHOR_YEAR, config.horizon + 1))

    probs: dict[tuple[str | None, str], dict[str, float] | None] = {}
    for variant in sorted(set(variants), key=str):
        for firm in firms:
            ev = [e for e in ds.evidence if e.variant == variant and e.firm == firm]
            probs[(variant, firm)] = expansion_probabilities(ev) if ev else None

    w_hist = {f: hist_weights(ds.inventory, f) for f in firms}
    w_ai = {}
    for firm in firms:
        for year in years:
            energies = site_ai_energy(ds, firm, year, config.evolution)
            for variant in set(variants):
                keep = select_ai_locations(sorted(energies), probs[(variant, firm)], ds.region_map)
                w_ai[(firm, year, variant)] = ai_weights(
                    {loc: energies[loc] for loc in keep}, firm, year
                )

    residuals = []
    for sid in scenarios:
        for year in years:
            firm_total = math.fsum(art.trajectories[(sid, f)].series[year].e_tot for f in firms)
            for p, variant in enumerate(variants, start=1):
                per_firm = [
                    allocate_regional(
                        art.trajectories[(sid, f)], w_ai[(f, year, variant)], w_hist[f],
                        ds.region_map, year,
                    )
                    for f in firms
                ]
                regional = regional_totals(per_firm)
                art.regional[(sid, year, p)] = regional
                allocated = math.fsum(regional.values())
                scale = abs(firm_total) or 1.0
                residuals.append(abs(allocated - firm_total) / scale)
    art.validation["conservation"] = {
        "max_relative_residual": max(residuals) if residuals else 0.0,
        "tolerance": CONSERVATION_TOL,
        "passed": all(r <= CONSERVATION_TOL for r in residuals),
        "checks": len(residuals),
    }

    stats = {}
    for sid in scenarios:
        for year in years:
            paths = [art.regional[(sid, year, p)] for p in range(1, len(variants) + 1)]
            regions = sorted({r for m in paths for r in m})
            for region in regions:
                vals = [m.get(region, 0.0) for m in paths]
                mean = math.fsum(vals) / len(vals)
                stats[(sid, year, region)] = (min(max(mean, min(vals)), max(vals)), min(vals), max(vals))
    rows = []
    for (sid, year, region), (mean, lo, hi) in stats.items():
        across = [stats[(s, year, region)][0] for s in scenarios if (s, year, region) in stats]
        rows.append((sid, year, region, mean, lo, hi, min(across), max(across)))
    order = {s: i for i, s in enumerate(SCENARIO_ORDER)}
    rows.sort(key=lambda r: (order.get(r[0], 99), r[0], r[1], r[2]))
    art.regional_rows = rows


def _psi(config, ds: Dataset, scenarios, year: int, art: RunArtifacts):
    if not ds.supply:
        raise ValueError("supply data required")
    if not ANCHOR_YEAR <= year <= config.horizon:
        raise ValueError(f"PSI year {year} outside {ANCHOR_YEAR}-{config.horizon}")
    for sid in scenarios:
        demand = {
            region: mean
            for (s, y, region, mean, *_rest) in art.regional_rows
            if s == sid and y == year
        }
        art.psi_reports[sid] = psi_report(demand, ds.supply, year, sid, config.quantile_bins)

    implied = cross_validate_global()
    horizon_means = [art.ensembles[s][config.horizon].mean for s in scenarios]
    lo_paper, hi_paper = CROSSCHECK_RANGE_TWH
    art.validation["crosscheck"] = {
        "global_dc_twh": 945.0,
        "hyperscale_share": 0.70,
        "top_firm_share": 0.40,
        "implied_six_firm_twh": implied,
        "reference_range_twh": [lo_paper, hi_paper],
        "implied_within_reference_range": lo_paper <= implied <= hi_paper,
        "model_range_twh": [min(horizon_means), max(horizon_means)],
        "implied_within_model_range": min(horizon_means) <= implied <= max(horizon_means),
        "year": config.horizon,
    }
    cagr = {}
    for sid in scenarios:
        ens = art.ensembles[sid]
        start, end = ens[ANCHOR_YEAR].mean, ens[config.horizon].mean
        n = config.horizon - ANCHOR_YEAR
        cagr[sid] = {
            "start_year": ANCHOR_YEAR,
            "end_year": config.horizon,
            "start_twh": start,
            "end_twh": end,
            "cagr": cagr_from_endpoints(start, end, n) if start > 0 and end > 0 else None,
        }
    art.validation["cagr_checks"] = cagr
    art.validation["psi_uncovered_regions"] = {
        sid: rep.uncovered for sid, rep in art.psi_reports.items()
    }


def run_pipeline(
    config: nio.RunConfig,
    stage: str = "psi",
    out_dir=None,
    formats: Sequence[str] = ("csv",),
    scenarios: Sequence[str] | None = None,
    year: int | None = None,
    dataset: Dataset | None = None,
) -> RunArtifacts:
    """Run stages up to ``stage`` and write their outputs to ``out_dir``.

    ``year`` restricts year-indexed output rows and sets the PSI year.
    Nothing is written unless every stage succeeds; a failed write removes
    the files already written.
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    upto = STAGES.index(stage)
    scenarios = [s for s in SCENARIO_ORDER if s in config.scenarios and (not scenarios or s in scenarios)]
    if not scenarios:
        raise PipelineError("config", "no scenarios selected")
    if year is not None and not ANCHOR_YEAR <= year <= config.horizon:
        raise PipelineError("config", f"year {year} outside {ANCHOR_YEAR}-{config.horizon}")

    try:
        ds = dataset if dataset is not None else load_dataset(config)
    except OSError as exc:
        raise PipelineError("ingest", str(exc), io_failure=True) from exc
    except ValueError as exc:
        raise PipelineError("ingest", str(exc)) from exc

    art = RunArtifacts()
    problems = dataset_violations(config, ds)
    art.validation["dataset_violations"] = [str(v) for v in problems]
    if problems and upto >= 1:
        raise PipelineError("validate", "; ".join(str(v) for v in problems))
    art.validation["advisories"] = sorted(
        f"{f}/{loc}: {note}" for (f, loc), p in ds.sites.items() for note in advisories(p)
    )
    art.validation["clamped_evidence"] = sum(e.clamped for e in ds.evidence)

    steps = [
        ("forecast", lambda: _forecast(config, scenarios, art)),
        ("allocate", lambda: _allocate(config, ds, scenarios, art)),
        ("psi", lambda: _psi(config, ds, scenarios, year or config.psi_year or config.horizon, art)),
    ]
    for name, fn in steps[: upto + 1]:
        try:
            fn()
        except (ValueError, KeyError) as exc:
            raise PipelineError(name, str(exc.args[0] if exc.args else exc)) from exc

    if out_dir is not None:
        try:
            _write_outputs(art, Path(out_dir), upto, formats, year)
        except OSError as exc:
            for p in art.written:
                p.unlink(missing_ok=True)
            art.written.clear()
            raise PipelineError("write", str(exc), io_failure=True) from exc
    return art


def _rows_for(art: RunArtifacts, upto: int, year: int | None):
    keep = (lambda y: True) if year is None else (lambda y: y == year)
    order = {s: i for i, s in enumerate(SCENARIO_ORDER)}
    tables = {}
    traj_rows = []
    for (sid, firm) in sorted(art.trajectories, key=lambda k: (k[1], order[k[0]])):
        t = art.trajectories[(sid, firm)]
        for y in t.years:
            if keep(y):
                e = t.series[y]
                traj_rows.append((firm, sid, y, e.e_stock, e.e_ai_new, e.e_new, e.e_tot))
    tables["firm_trajectories"] = (TRAJECTORY_HEADER, traj_rows)
    ens_rows = [
        (sid, y, r.mean, r.min, r.max, len(r.paths))
        for sid in sorted(art.ensembles, key=order.get)
        for y, r in sorted(art.ensembles[sid].items())
        if keep(y)
    ]
    tables["global_ensemble"] = (ENSEMBLE_HEADER, ens_rows)
    if upto >= 1:
        tables["regional_demand"] = (
            REGIONAL_HEADER, [r for r in art.regional_rows if keep(r[1])]
        )
    if upto >= 2:
        psi_rows = [
            (r.region, r.year, r.scenario, r.e_dc, r.e_supply, r.psi, r.band, r.quantile_bin)
            for sid in sorted(art.psi_reports, key=order.get)
            for r in art.psi_reports[sid].records
        ]
        tables["psi_report"] = (PSI_HEADER, psi_rows)
    return tables


def _write_outputs(art: RunArtifacts, out_dir: Path, upto: int, formats, year):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in _rows_for(art, upto, year).items():
        if "csv" in formats:
            art.written.append(nio.write_table(out_dir / f"{name}.csv", header, rows))
        if "json" in formats:
            art.written.append(nio.write_table_json(out_dir / f"{name}.json", header, rows))
    if upto >= 2:
        art.written.append(nio.write_json(out_dir / "validation.json", art.validation))
