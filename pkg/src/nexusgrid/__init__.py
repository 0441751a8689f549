"""Scenario forecasts of hyperscale data-center electricity demand.

Per-site energy from fleet parameters, firm-level projections under three
growth scenarios, allocation to regions, and a regional Power Stress Index.
"""

from importlib import resources
from pathlib import Path

from .domain import (
    PAPER_SCHEDULES,
    SCENARIOS,
    AiShareSchedule,
    BaselineParams,
    FirmTrajectory,
    PsiRecord,
    Scenario,
    SiteRecord,
    SitingEvidence,
    SupplySeries,
    validate_dataset,
)
from .energy import EvolutionRates, compute_e_dc, compute_e_it, evolve_baseline
from .psi import (
    cagr_from_endpoints,
    compute_psi,
    cross_validate_global,
    extrapolate_supply,
    psi_report,
    supply_cagr,
)
from .scenario import ai_share, ensemble_aggregate, project_firm
from .siting import ai_weights, allocate_regional, expansion_probabilities, hist_weights

__version__ = "0.1.0"


def fixture_config_path() -> Path:
    """Path to the shipped six-firm fixture configuration."""
    return Path(str(resources.files(__package__) / "data" / "paper_fixture" / "config.toml"))


__all__ = [
    "PAPER_SCHEDULES", "SCENARIOS", "AiShareSchedule", "BaselineParams", "FirmTrajectory",
    "PsiRecord", "Scenario", "SiteRecord", "SitingEvidence", "SupplySeries", "validate_dataset",
    "EvolutionRates", "compute_e_dc", "compute_e_it", "evolve_baseline",
    "cagr_from_endpoints", "compute_psi", "cross_validate_global", "extrapolate_supply",
    "psi_report", "supply_cagr", "ai_share", "ensemble_aggregate", "project_firm",
    "ai_weights", "allocate_regional", "expansion_probabilities", "hist_weights",
    "fixture_config_path",
]
