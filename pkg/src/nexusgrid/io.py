"""Input datasets, run configuration, and output serialization.

All tabular files are UTF-8 CSV with a mandatory header row and LF line
endings. Dataset writers emit shortest round-trip float text; run outputs
use six significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .domain import (
    PAPER_SCHEDULES,
    SCENARIO_ORDER,
    SCENARIOS,
    AiShareSchedule,
    BaselineParams,
    Scenario,
    SiteRecord,
    SitingEvidence,
    SupplySeries,
)
from .energy import EvolutionRates

log = logging.getLogger(__name__)

INVENTORY_HEADER = ("firm", "location", "site_count")
SUPPLY_HEADER = ("region", "year", "generation_twh")
EVIDENCE_HEADER = ("firm", "region", "sentiment", "relevance")
REGION_MAP_HEADER = ("location", "region")
SITES_HEADER = (
    "firm",
    "location",
    "n_train",
    "n_inference",
    "p_avg_train_kw",
    "p_avg_inference_kw",
    "u_train",
    "u_inference",
    "h_train",
    "h_inference",
    "pue",
)


class IngestError(ValueError):
    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    """Fixed output float format: six significant digits, locale-free."""
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


def _rows(path, required: Sequence[str]):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise IngestError(path, 1, f"missing column(s): {', '.join(missing)}")
        for row in reader:
            if None in row or any(row[c] is None for c in required):
                raise IngestError(path, reader.line_num, "wrong number of fields")
            yield reader.line_num, row


def _num(path, line, row, column, kind=float):
    text = row[column].strip()
    try:
        return kind(text)
    except ValueError:
        raise IngestError(path, line, f"{column}: cannot parse {text!r}") from None


def ingest_inventory(path) -> list[SiteRecord]:
    """Header ``firm,location,site_count[,e_ai_loc_twh]``."""
    records, seen = [], {}
    for line, row in _rows(path, INVENTORY_HEADER):
        firm, location = row["firm"].strip(), row["location"].strip()
        if not firm or not location:
            raise IngestError(path, line, "firm and location must be non-empty")
        count = _num(path, line, row, "site_count", int)
        if count < 0:
            raise IngestError(path, line, f"site_count must be >= 0, got {count}")
        e_ai = None
        if (row.get("e_ai_loc_twh") or "").strip():
            e_ai = _num(path, line, row, "e_ai_loc_twh")
            if e_ai < 0:
                raise IngestError(path, line, f"e_ai_loc_twh must be >= 0, got {e_ai}")
        key = (firm, location)
        if key in seen:
            raise IngestError(
                path, line, f"duplicate key {firm}/{location} (first on line {seen[key]})"
            )
        seen[key] = line
        records.append(SiteRecord(firm, location, count, e_ai))
    return records


def ingest_supply(path) -> dict[str, SupplySeries]:
    """Header ``region,year,generation_twh``; returns series keyed by region."""
    grouped: dict[str, dict[int, float]] = {}
    for line, row in _rows(path, SUPPLY_HEADER):
        region = row["region"].strip()
        year = _num(path, line, row, "year", int)
        value = _num(path, line, row, "generation_twh")
        if not value > 0:
            raise IngestError(path, line, f"generation_twh must be > 0, got {value}")
        history = grouped.setdefault(region, {})
        if year in history:
            raise IngestError(path, line, f"duplicate year {year} for {region}")
        history[year] = value
    out = {}
    for region in sorted(grouped):
        series = SupplySeries(region, dict(sorted(grouped[region].items())))
        if not series.cagr_available():
            log.warning("%s: CAGR unavailable (history %s)", region, series.years)
        out[region] = series
    return out


def ingest_evidence(path) -> list[SitingEvidence]:
    """Header ``firm,region,sentiment,relevance[,variant]``.

    Relevance outside [0, 1] is clamped and the record marked ``clamped``.
    """
    records = []
    for line, row in _rows(path, EVIDENCE_HEADER):
        sentiment = _num(path, line, row, "sentiment")
        if not -1.0 <= sentiment <= 1.0:
            raise IngestError(path, line, f"sentiment must lie in [-1, 1], got {sentiment}")
        relevance = _num(path, line, row, "relevance")
        clamped = not 0.0 <= relevance <= 1.0
        if clamped:
            log.warning("%s:%d: relevance %g clamped to [0, 1]", path, line, relevance)
            relevance = min(1.0, max(0.0, relevance))
        variant = (row.get("variant") or "").strip() or "base"
        records.append(
            SitingEvidence(
                row["firm"].strip(), row["region"].strip(), sentiment, relevance, variant, clamped
            )
        )
    return records


def ingest_region_map(path) -> dict[str, str]:
    """Header ``location,region``; each location maps to exactly one region."""
    mapping = {}
    for line, row in _rows(path, REGION_MAP_HEADER):
        loc, region = row["location"].strip(), row["region"].strip()
        if not loc or not region:
            raise IngestError(path, line, "location and region must be non-empty")
        if loc in mapping and mapping[loc] != region:
            raise IngestError(path, line, f"location {loc} mapped to two regions")
        mapping[loc] = region
    return mapping


def ingest_sites(path) -> dict[tuple[str, str], BaselineParams]:
    """Per-site baseline parameters keyed by (firm, location)."""
    out = {}
    for line, row in _rows(path, SITES_HEADER):
        key = (row["firm"].strip(), row["location"].strip())
        if key in out:
            raise IngestError(path, line, f"duplicate key {key[0]}/{key[1]}")
        params = BaselineParams(
            n_train=_num(path, line, row, "n_train"),
            n_inference=_num(path, line, row, "n_inference"),
            p_avg_train=_num(path, line, row, "p_avg_train_kw"),
            p_avg_inference=_num(path, line, row, "p_avg_inference_kw"),
            u_train=_num(path, line, row, "u_train"),
            u_inference=_num(path, line, row, "u_inference"),
            h_train=_num(path, line, row, "h_train"),
            h_inference=_num(path, line, row, "h_inference"),
            pue=_num(path, line, row, "pue"),
        )
        problems = params.violations()
        if problems:
            raise IngestError(path, line, "; ".join(problems))
        out[key] = params
    return out


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_inventory(path, records: Iterable[SiteRecord]) -> Path:
    records = list(records)
    with_e = any(r.e_ai_loc is not None for r in records)
    header = INVENTORY_HEADER + (("e_ai_loc_twh",) if with_e else ())
    rows = []
    for r in records:
        row = [r.firm, r.location, r.site_count]
        if with_e:
            row.append("" if r.e_ai_loc is None else repr(r.e_ai_loc))
        rows.append(row)
    return _write_csv(path, header, rows)


def write_supply(path, supply: Mapping[str, SupplySeries]) -> Path:
    rows = [
        (s.region, y, repr(s.history[y])) for s in supply.values() for y in s.years
    ]
    return _write_csv(path, SUPPLY_HEADER, rows)


def write_evidence(path, records: Iterable[SitingEvidence]) -> Path:
    rows = [(e.firm, e.region, repr(e.sentiment), repr(e.relevance), e.variant) for e in records]
    return _write_csv(path, EVIDENCE_HEADER + ("variant",), rows)


def write_region_map(path, region_map: Mapping[str, str]) -> Path:
    return _write_csv(path, REGION_MAP_HEADER, sorted(region_map.items()))


def write_table(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Output table with floats in the fixed six-significant-digit format."""
    def cell(v):
        if isinstance(v, float):
            return fmt(v)
        return "" if v is None else v

    return _write_csv(path, header, ([cell(v) for v in row] for row in rows))


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    text = json.dumps(_round_floats(payload), indent=2, sort_keys=True, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")
    return path


def write_table_json(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return write_json(path, [dict(zip(header, row)) for row in rows])


@dataclass
class Anchor:
    e_stock_2024: float
    e_ai_new_2024: float


@dataclass
class RunConfig:
    horizon: int = 2030
    scenarios: dict[str, Scenario] = field(default_factory=lambda: dict(SCENARIOS))
    anchors: dict[str, Anchor] = field(default_factory=dict)
    schedules: dict[str, AiShareSchedule] = field(default_factory=lambda: dict(PAPER_SCHEDULES))
    path_count: int = 10
    seed: int = 0
    variants: list[str] | None = None
    evolution: EvolutionRates = field(default_factory=EvolutionRates)
    inventory: Path | None = None
    region_map: Path | None = None
    supply: Path | None = None
    evidence: Path | None = None
    sites: Path | None = None
    out_dir: Path = Path("out")
    psi_year: int | None = None
    quantile_bins: int = 4
    source: Path | None = None

    def check(self) -> "RunConfig":
        if self.horizon < 2025:
            raise ConfigError(f"horizon must be >= 2025, got {self.horizon}")
        if self.path_count < 1:
            raise ConfigError("paths.count must be >= 1")
        unscheduled = sorted(set(self.anchors) - set(self.schedules))
        if unscheduled:
            raise ConfigError(f"anchored firms without schedule: {', '.join(unscheduled)}")
        for name, anchor in self.anchors.items():
            if anchor.e_stock_2024 < 0 or anchor.e_ai_new_2024 < 0:
                raise ConfigError(f"anchors for {name} must be non-negative")
        for label in ("inventory", "region_map", "supply", "evidence", "sites"):
            p = getattr(self, label)
            if p is not None and not p.exists():
                raise FileNotFoundError(f"{label} file not found: {p}")
        return self


_INPUT_KEYS = ("inventory", "region_map", "supply", "evidence", "sites")


def load_config(path) -> RunConfig:
    """Read a TOML run configuration; relative paths resolve against its directory."""
    path = Path(path)
    with path.open("rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    base = path.parent

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    cfg = RunConfig(source=path)
    try:
        cfg.horizon = int(raw.get("horizon", cfg.horizon))
        if "out_dir" in raw:
            cfg.out_dir = resolve(raw["out_dir"])

        inputs = raw.get("inputs", {})
        unknown = set(inputs) - set(_INPUT_KEYS)
        if unknown:
            raise ConfigError(f"unknown input key(s): {', '.join(sorted(unknown))}")
        for key in _INPUT_KEYS:
            if key in inputs:
                setattr(cfg, key, resolve(inputs[key]))

        sc = raw.get("scenarios", {})
        g_stock = float(sc.get("g_stock", 0.10))
        chosen = {}
        for sid in SCENARIO_ORDER:
            g_new = SCENARIOS[sid].g_new
            over = sc.get(sid)
            if isinstance(over, dict):
                g_new = float(over.get("g_new", g_new))
            elif over is not None:
                g_new = float(over)
            chosen[sid] = Scenario(sid, g_new, g_stock)
        if "enabled" in sc:
            enabled = list(sc["enabled"])
            bad = [s for s in enabled if s not in chosen]
            if bad:
                raise ConfigError(f"unknown scenario(s): {', '.join(bad)}")
            chosen = {s: chosen[s] for s in SCENARIO_ORDER if s in enabled}
        cfg.scenarios = chosen

        schedules = dict(PAPER_SCHEDULES)
        for firm, triple in raw.get("schedules", {}).items():
            p1, p2, p3 = (float(v) for v in triple)
            schedules[firm] = AiShareSchedule(firm, p1, p2, p3)
        cfg.schedules = schedules

        cfg.anchors = {
            firm: Anchor(float(a["e_stock_2024"]), float(a["e_ai_new_2024"]))
            for firm, a in raw.get("anchors", {}).items()
        }

        paths = raw.get("paths", {})
        cfg.path_count = int(paths.get("count", cfg.path_count))
        cfg.seed = int(paths.get("seed", cfg.seed))
        if "variants" in paths:
            cfg.variants = [str(v) for v in paths["variants"]]

        evo = raw.get("evolution", {})
        cfg.evolution = EvolutionRates(
            capacity_growth=float(evo.get("capacity_growth", 0.15)),
            efficiency_gain=float(evo.get("efficiency_gain", 0.02)),
            utilization_drift=float(evo.get("utilization_drift", 0.0)),
        )

        psi = raw.get("psi", {})
        if "year" in psi:
            cfg.psi_year = int(psi["year"])
        cfg.quantile_bins = int(psi.get("quantile_bins", cfg.quantile_bins))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None
    return cfg.check()


def resolve_out_dir(cli_out: str | os.PathLike | None, config: RunConfig) -> Path:
    """``NEXUS_OUT_DIR`` beats ``--out``, which beats the config's ``out_dir``."""
    env = os.environ.get("NEXUS_OUT_DIR")
    if env:
        return Path(env)
    if cli_out is not None:
        return Path(cli_out)
    return config.out_dir
