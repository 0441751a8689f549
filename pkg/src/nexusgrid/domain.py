"""Core value types shared by every stage of the forecasting engine.

Energies carried between stages are in TWh unless a field name says
otherwise; the per-site energy formulas work in MWh and convert with
:data:`MWH_PER_TWH` at their boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

MWH_PER_TWH = 1e6
HOURS_PER_YEAR = 8760.0
MAX_PERIOD_HOURS = 8784.0  # leap year

ANCHOR_YEAR = 2024
FIRST_FORECAST_YEAR = 2025

PAPER_FIRMS = ("Amazon", "Microsoft", "Google", "Meta", "Oracle", "Apple")

# Fleet scale and indicative market share for the six hyperscale operators.
FIRM_REGISTRY: dict[str, dict[str, str]] = {
    "Amazon": {
        "operator": "Amazon Web Services (AWS)",
        "scale_2025": "32 cloud regions, 102 availability zones (+4 planned)",
        "market_share": "30-31% (global cloud infrastructure)",
    },
    "Microsoft": {
        "operator": "Microsoft Azure",
        "scale_2025": "62 regions, 120 availability zones, 200+ data centers",
        "market_share": "~20%",
    },
    "Google": {
        "operator": "Google Cloud Platform (GCP)",
        "scale_2025": "39 regions, 118 availability zones, 35 owned centers",
        "market_share": "~13%",
    },
    "Meta": {
        "operator": "Meta Platforms",
        "scale_2025": "24 data-center campuses",
        "market_share": "~4-6% (hyperscale capacity share)",
    },
    "Oracle": {
        "operator": "Oracle Cloud Infrastructure (OCI)",
        "scale_2025": "46 regions, 56 availability zones",
        "market_share": "~3-4%",
    },
    "Apple": {
        "operator": "Apple",
        "scale_2025": "~20 data centers (U.S., Europe)",
        "market_share": "<2% (internal capacity)",
    },
}


def register_firm(name: str, **metadata: str) -> None:
    """Add a firm to the open registry (no-op if already present)."""
    if not name:
        raise ValueError("firm name must be non-empty")
    FIRM_REGISTRY.setdefault(name, dict(metadata))


RegionMap = Mapping[str, str]


@dataclass(frozen=True)
class BaselineParams:
    """Fleet and operating parameters of one site for one period.

    Powers are per accelerator in kW, hours are per accelerator per period.
    """

    n_train: float
    n_inference: float
    p_avg_train: float
    p_avg_inference: float
    u_train: float
    u_inference: float
    h_train: float = HOURS_PER_YEAR
    h_inference: float = HOURS_PER_YEAR
    pue: float = 1.0

    def violations(self) -> list[str]:
        out = []
        for name in ("n_train", "n_inference"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be >= 0")
        for name in ("p_avg_train", "p_avg_inference"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be >= 0")
        for name in ("u_train", "u_inference"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                out.append(f"{name} must lie in [0, 1]")
        for name in ("h_train", "h_inference"):
            if not 0.0 <= getattr(self, name) <= MAX_PERIOD_HOURS:
                out.append(f"{name} must lie in [0, {MAX_PERIOD_HOURS:g}]")
        if not self.pue >= 1.0:
            out.append("pue must be >= 1.0")
        return out

    def check(self) -> "BaselineParams":
        problems = self.violations()
        if problems:
            raise ValueError("invalid baseline parameters: " + "; ".join(problems))
        return self


@dataclass(frozen=True)
class Scenario:
    id: str
    g_new: float
    g_stock: float = 0.10

    def __post_init__(self):
        if not self.g_new > -1.0:
            raise ValueError(f"g_new must exceed -1, got {self.g_new}")
        if not self.g_stock > -1.0:
            raise ValueError(f"g_stock must exceed -1, got {self.g_stock}")


SCENARIOS = {
    "conservative": Scenario("conservative", 0.15),
    "neutral": Scenario("neutral", 0.25),
    "optimistic": Scenario("optimistic", 0.35),
}
SCENARIO_ORDER = ("conservative", "neutral", "optimistic")


@dataclass(frozen=True)
class AiShareSchedule:
    """Stepwise AI share of new-site load: 2025, 2026-2027, 2028 onward."""

    firm: str
    p1: float
    p2: float
    p3: float

    def violations(self) -> list[str]:
        out = []
        if not (0.0 < self.p1 and self.p3 <= 1.0):
            out.append(f"AI share out of range (0, 1] for {self.firm}")
        if not (self.p1 <= self.p2 <= self.p3):
            out.append(f"non-monotone AI share for {self.firm}")
        return out


PAPER_SCHEDULES = {
    "Amazon": AiShareSchedule("Amazon", 0.30, 0.40, 0.60),
    "Apple": AiShareSchedule("Apple", 0.25, 0.30, 0.35),
    "Google": AiShareSchedule("Google", 0.35, 0.40, 0.60),
    "Meta": AiShareSchedule("Meta", 0.35, 0.50, 0.60),
    "Microsoft": AiShareSchedule("Microsoft", 0.35, 0.45, 0.60),
    "Oracle": AiShareSchedule("Oracle", 0.25, 0.35, 0.50),
}


@dataclass(frozen=True)
class YearEnergy:
    e_stock: float
    e_ai_new: float
    e_new: float
    e_tot: float

    @property
    def e_non_ai_new(self) -> float:
        return self.e_new - self.e_ai_new


@dataclass(frozen=True)
class FirmTrajectory:
    firm: str
    scenario: str
    series: dict[int, YearEnergy]

    @property
    def years(self) -> list[int]:
        return sorted(self.series)

    def __getitem__(self, year: int) -> YearEnergy:
        return self.series[year]


@dataclass(frozen=True)
class EnsembleResult:
    year: int
    scenario: str
    paths: tuple[float, ...]
    mean: float
    min: float
    max: float


@dataclass(frozen=True)
class SitingEvidence:
    firm: str
    region: str
    sentiment: float
    relevance: float
    variant: str = "base"
    clamped: bool = False

    def __post_init__(self):
        if not -1.0 <= self.sentiment <= 1.0:
            raise ValueError(f"sentiment must lie in [-1, 1], got {self.sentiment}")
        if not 0.0 <= self.relevance <= 1.0:
            raise ValueError(f"relevance must lie in [0, 1], got {self.relevance}")


@dataclass(frozen=True)
class AllocationWeights:
    kind: str  # "ai" or "historical"
    firm: str
    weights: dict[str, float]
    year: int | None = None

    def __getitem__(self, location: str) -> float:
        return self.weights[location]


@dataclass(frozen=True)
class SiteRecord:
    """One row of the site inventory: end-2024 campus count at a location."""

    firm: str
    location: str
    site_count: int
    e_ai_loc: float | None = None

    def __post_init__(self):
        if self.site_count < 0:
            raise ValueError(f"site_count must be >= 0, got {self.site_count}")
        if self.e_ai_loc is not None and self.e_ai_loc < 0:
            raise ValueError(f"e_ai_loc_twh must be >= 0, got {self.e_ai_loc}")


@dataclass(frozen=True)
class SupplySeries:
    region: str
    history: dict[int, float]

    def __post_init__(self):
        for year, value in self.history.items():
            if not value > 0:
                raise ValueError(f"{self.region} {year}: generation must be > 0")

    @property
    def years(self) -> list[int]:
        return sorted(self.history)

    def cagr_available(self, start_year: int = 2019, end_year: int = ANCHOR_YEAR) -> bool:
        ys = self.years
        return bool(ys) and ys[0] <= start_year and ys[-1] >= end_year


@dataclass(frozen=True)
class PsiRecord:
    region: str
    year: int
    e_dc: float
    e_supply: float
    psi: float
    band: str
    scenario: str = ""
    quantile_bin: int | None = None


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate_dataset(
    inventory: Iterable[SiteRecord],
    region_map: RegionMap,
    schedules: Mapping[str, AiShareSchedule] | Iterable[AiShareSchedule],
    firms: Iterable[str] | None = None,
) -> list[Violation]:
    """Collect semantic problems in an ingested dataset.

    An empty list means the dataset is safe to feed to the pipeline.
    ``firms`` lists firms that must have a schedule (e.g. the anchored
    firms of a run); by default every firm in the inventory must.
    """
    inventory = list(inventory)
    if isinstance(schedules, Mapping):
        schedules = list(schedules.values())
    by_firm = {s.firm: s for s in schedules}
    found: list[Violation] = []

    seen = set()
    for rec in inventory:
        key = (rec.firm, rec.location)
        if key in seen:
            found.append(Violation("duplicate site", f"{rec.firm}/{rec.location}"))
        seen.add(key)
        if not rec.firm:
            found.append(Violation("missing firm", f"empty firm at {rec.location}"))
        if rec.location not in region_map:
            found.append(Violation("unmapped location", f"{rec.location} ({rec.firm})"))

    for sched in by_firm.values():
        if not (0.0 < sched.p1 and sched.p3 <= 1.0 and sched.p2 > 0):
            found.append(Violation("out-of-range fraction", f"AI share for {sched.firm}"))
        if not (sched.p1 <= sched.p2 <= sched.p3):
            found.append(Violation("non-monotone AI share", sched.firm))

    required = sorted(set(firms) if firms is not None else {r.firm for r in inventory})
    for firm in required:
        if firm not in by_firm:
            found.append(Violation("missing firm", f"no AI share schedule for {firm}"))
    return found
