"""
From siting evidence to regional load
=====================================

Sentiment x relevance gives an expansion distribution over regions; negative
tone is rectified to zero. Each ensemble path reads one evidence variant,
which decides where new AI sites may go. AI load follows modelled site
energy among eligible sites; stock and non-AI load follow campus counts.
"""
from nexusgrid import expansion_probabilities, fixture_config_path
from nexusgrid import io as nio
from nexusgrid.pipeline import run_pipeline

config = nio.load_config(fixture_config_path())
evidence = nio.ingest_evidence(config.evidence)

for variant in ("base", "policy_tight"):
    ev = [e for e in evidence if e.firm == "Microsoft" and e.variant == variant]
    probs = expansion_probabilities(ev)
    print(f"Microsoft, {variant}: " + ", ".join(f"{r} {p:.2f}" for r, p in sorted(probs.items())))

art = run_pipeline(config, stage="allocate", scenarios=["neutral"])
print(f"\nconservation residual (max, relative): "
      f"{art.validation['conservation']['max_relative_residual']:.1e}")
print("\nneutral 2030 regional demand [TWh]: mean and path range")
rows = sorted((r for r in art.regional_rows if r[1] == 2030), key=lambda r: -r[3])
for _, _, region, mean, lo, hi, *_ in rows[:10]:
    print(f"{region:<15}{mean:8.2f}   [{lo:6.2f}, {hi:6.2f}]")
