"""
Firm-level scenarios for the six-firm fixture
=============================================

Stock load grows at 10%/yr in every scenario; AI load on new sites grows at
15, 25 or 35%/yr and is divided by each firm's AI share to give the full
new-site load. All trajectories start from the same 2024 anchor.
"""
from nexusgrid import fixture_config_path
from nexusgrid import io as nio
from nexusgrid.pipeline import run_pipeline

config = nio.load_config(fixture_config_path())
art = run_pipeline(config, stage="forecast")

print("2030 demand by firm [TWh]")
print(f"{'firm':<10}" + "".join(f"{s:>14}" for s in art.ensembles))
for firm in sorted(config.anchors):
    row = [art.trajectories[(s, firm)].series[2030].e_tot for s in art.ensembles]
    print(f"{firm:<10}" + "".join(f"{v:14.2f}" for v in row))

print("\nsix-firm total [TWh]")
for year in range(2024, config.horizon + 1):
    print(year, "  ".join(f"{s[:4]} {art.ensembles[s][year].mean:7.2f}" for s in art.ensembles))
