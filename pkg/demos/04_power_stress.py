"""
Power Stress Index and the global cross-check
=============================================

Regional supply is extrapolated from 2024 with its 2019-2024 CAGR. PSI is
regional data-center demand over supply, banded at 0.10 / 0.25 / 0.40.
"""
from nexusgrid import cagr_from_endpoints, cross_validate_global, fixture_config_path
from nexusgrid import io as nio
from nexusgrid.pipeline import run_pipeline

config = nio.load_config(fixture_config_path())
art = run_pipeline(config, stage="psi")

rep = art.psi_reports["neutral"]
print(f"PSI {rep.year}, neutral scenario")
for r in rep.records:
    print(f"{r.region:<15}{r.e_dc:7.2f} / {r.e_supply:8.2f} TWh = {r.psi:.3f}  {r.band:<9} Q{r.quantile_bin}")
print("no supply data:", ", ".join(rep.uncovered) or "-")

implied = cross_validate_global(945, 0.70, 0.40)
print(f"\nimplied six-firm 2030 demand from a 945 TWh global forecast: {implied:.1f} TWh")
print(f"growth implied by 118 -> 239 and 118 -> 295 TWh over six years: "
      f"{cagr_from_endpoints(118, 239, 6):.2%} and {cagr_from_endpoints(118, 295, 6):.2%}")
