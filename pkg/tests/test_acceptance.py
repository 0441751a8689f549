"""Exit criteria for the engine, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the
"acceptance criteria" section at the end of the pytest run.
"""

import filecmp
import math
import time
from contextlib import contextmanager
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nexusgrid import io as nio
from nexusgrid.cli import main
from nexusgrid.domain import SCENARIOS, AiShareSchedule, BaselineParams, SiteRecord, SitingEvidence, SupplySeries
from nexusgrid.energy import compute_e_dc, compute_e_it
from nexusgrid.pipeline import run_pipeline
from nexusgrid.psi import (
    cagr_from_endpoints,
    compute_psi,
    cross_validate_global,
    extrapolate_supply,
    psi_report,
)
from nexusgrid.scenario import project_firm, project_stock
from nexusgrid.siting import (
    ai_weights,
    allocate_regional,
    expansion_probabilities,
    hist_weights,
)

from conftest import ACCEPTANCE_RESULTS


@contextmanager
def criterion(key):
    detail = {"text": ""}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE_RESULTS[key] = (False, detail["text"] or "assertion failed")
        raise
    ACCEPTANCE_RESULTS[key] = (True, detail["text"])


def test_ac1_cross_validation(capsys):
    with criterion("AC1 cross-validation identity") as d:
        t0 = time.perf_counter()
        assert main(["crosscheck", "--global-twh", "945", "--hyperscale-share", "0.70",
                     "--top-firm-share", "0.40"]) == 0
        elapsed = time.perf_counter() - t0
        assert capsys.readouterr().out.strip() == "264.6"
        value = cross_validate_global(945, 0.70, 0.40)
        rel = abs(value - 264.6) / 264.6
        d["text"] = f"{value!r} TWh, rel err {rel:.1e}, {elapsed * 1e3:.1f} ms"
        assert rel < 1e-12
        assert 239 <= value <= 295
        assert elapsed < 1.0


def test_ac2_headline_cagr():
    with criterion("AC2 headline CAGR") as d:
        t0 = time.perf_counter()
        low = cagr_from_endpoints(118, 239, 6) * 100
        high = cagr_from_endpoints(118, 295, 6) * 100
        elapsed = time.perf_counter() - t0
        d["text"] = f"{low:.4f}% / {high:.4f}%"
        assert abs(low - 12.48) <= 0.01
        assert abs(high - 16.50) <= 0.01
        # "roughly 13-17%" is stated to whole percents; allow one point of slack
        assert 13 - 1 <= low and high <= 17
        assert elapsed < 1.0


def test_ac3_fixture_envelope(fixture_config):
    with criterion("AC3 fixture envelope") as d:
        t0 = time.perf_counter()
        art = run_pipeline(nio.load_config(fixture_config), stage="forecast")
        elapsed = time.perf_counter() - t0
        e24 = art.ensembles["neutral"][2024].mean
        c, n, o = (art.ensembles[s][2030].mean for s in ("conservative", "neutral", "optimistic"))
        d["text"] = f"2024 {e24:.3f} TWh; 2030 {c:.1f} < {n:.1f} < {o:.1f} TWh; {elapsed:.2f} s"
        for s in art.ensembles:
            assert abs(art.ensembles[s][2024].mean - 118.0) < 1e-9
        assert f"{e24:.3f}" == "118.000"
        assert c < n < o
        assert all(200 <= v <= 350 for v in (c, n, o))
        assert elapsed < 10.0


def test_ac4_psi_bands():
    with criterion("AC4 PSI bands") as d:
        bands = [compute_psi(x * 100, 100).band for x in (0.05, 0.10, 0.25, 0.40, 0.50)]
        assert bands == ["low", "elevated", "high", "extreme", "extreme"]
        supply = {r: SupplySeries(r, {2019: 100.0, 2024: 100.0})
                  for r in ("Ireland", "Virginia", "Oregon", "Texas", "Japan")}
        flat = {r: extrapolate_supply(s, 2030) for r, s in supply.items()}
        demand = {"Ireland": 0.5 * flat["Ireland"], "Virginia": 28.0, "Oregon": 30.0,
                  "Texas": 6.0, "Japan": 4.0}
        rep = psi_report(demand, supply, 2030)
        top = rep.records[0]
        d["text"] = f"bands {bands}; top {top.region} psi {top.psi:.3f} ({top.band})"
        assert (top.region, top.band) == ("Ireland", "extreme")
        assert top.psi == pytest.approx(0.5, rel=1e-12)


# -- AC5: randomized datasets ---------------------------------------------------

@st.composite
def datasets(draw):
    n_loc = draw(st.integers(1, 8))
    locs = [f"loc{i}" for i in range(n_loc)]
    n_reg = draw(st.integers(1, n_loc))
    rmap = {loc: f"R{draw(st.integers(0, n_reg - 1))}" for loc in locs}
    counts = {loc: draw(st.integers(0, 50)) for loc in locs}
    energies = {loc: draw(st.floats(0, 1e3)) for loc in locs}
    p = sorted(draw(st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3)))
    anchors = (draw(st.floats(0, 500)), draw(st.floats(0, 100)))
    sid = draw(st.sampled_from(sorted(SCENARIOS)))
    evidence = [
        SitingEvidence("F", f"R{i}", draw(st.floats(-1, 1)), draw(st.floats(0, 1)))
        for i in range(draw(st.integers(1, 6)))
    ]
    scale = draw(st.floats(1e-3, 1e3))
    perm = draw(st.permutations(locs))
    return locs, rmap, counts, energies, p, anchors, sid, evidence, scale, perm


def _sum1(w):
    return abs(math.fsum(w.values()) - 1.0) <= 1e-9


AC5_COUNT = {"n": 0}


@settings(max_examples=500, deadline=None, database=None)
@given(datasets())
def test_ac5_conservation_property(data):
    locs, rmap, counts, energies, p, anchors, sid, evidence, scale, perm = data
    inv = [SiteRecord("F", loc, counts[loc]) for loc in locs]
    traj = project_firm("F", SCENARIOS[sid], *anchors, AiShareSchedule("F", *p))
    w_hist = hist_weights(inv, "F")
    w_ai = ai_weights(energies)
    assert _sum1(w_hist.weights) and _sum1(w_ai.weights)
    assert all(0 <= v <= 1 for v in (*w_hist.weights.values(), *w_ai.weights.values()))
    probs = expansion_probabilities(evidence)
    assert _sum1(probs) and all(v >= 0 for v in probs.values())

    for year in traj.years:
        alloc = allocate_regional(traj, w_ai, w_hist, rmap, year)
        total = traj.series[year].e_tot
        assert math.fsum(alloc.values()) == pytest.approx(total, rel=1e-9, abs=1e-300)

    # permutation equivariance: reordered inputs give the same per-location weights
    inv_p = [SiteRecord("F", loc, counts[loc]) for loc in perm]
    assert hist_weights(inv_p, "F").weights == w_hist.weights
    assert ai_weights({loc: energies[loc] for loc in perm}).weights == w_ai.weights
    assert allocate_regional(traj, ai_weights({l: energies[l] for l in perm}),
                             hist_weights(inv_p, "F"), rmap, 2030) == \
        allocate_regional(traj, w_ai, w_hist, rmap, 2030)

    # positive scaling invariance
    scaled_ai = ai_weights({loc: e * scale for loc, e in energies.items()}).weights
    for loc in locs:
        assert scaled_ai[loc] == pytest.approx(w_ai.weights[loc], rel=1e-9, abs=1e-12)
    k = int(scale) + 1
    scaled_hist = hist_weights([SiteRecord("F", l, counts[l] * k) for l in locs], "F").weights
    for loc in locs:
        assert scaled_hist[loc] == pytest.approx(w_hist.weights[loc], rel=1e-9, abs=1e-12)
    AC5_COUNT["n"] += 1


def test_ac5_summary():
    # runs after the property test in file order
    with criterion("AC5 conservation suite") as d:
        d["text"] = f"{AC5_COUNT['n']} randomized datasets checked"
        assert AC5_COUNT["n"] >= 500


def test_ac6_oracle_equivalence():
    with criterion("AC6 oracle equivalence") as d:
        rng = np.random.default_rng(20241)
        worst = 0.0
        for _ in range(1000):
            base = float(rng.uniform(0.01, 1e4))
            rate = float(rng.uniform(-0.5, 1.0))
            horizon = int(rng.integers(0, 31))
            iterative = base
            for _ in range(horizon):
                iterative = iterative * (1.0 + rate)
            closed = project_stock(base, rate, 2024 + horizon)
            worst = max(worst, abs(closed - iterative) / abs(iterative))

            start = base / (1.0 + rate) ** 5
            series = SupplySeries("R", {2019: start, 2024: base})
            cagr = (base / start) ** 0.2 - 1.0
            step = base
            for _ in range(horizon):
                step = step * (1.0 + cagr)
            supply = extrapolate_supply(series, 2024 + horizon)
            worst = max(worst, abs(supply - step) / abs(step))
        d["text"] = f"max rel deviation {worst:.2e} over 1000 triples x 2 routes"
        assert worst <= 1e-9


def test_ac7_energy_formula():
    with criterion("AC7 energy formula") as d:
        fleet = BaselineParams(1000, 2000, 0.7, 0.3, 0.8, 0.3, 8760, 8760, 1.2)
        assert compute_e_it(fleet) == 6482.4
        rng = np.random.default_rng(7)
        for _ in range(1000):
            p = BaselineParams(
                float(rng.integers(0, 10**5)), float(rng.integers(0, 10**5)),
                *map(float, rng.uniform(0, 2, 2)), *map(float, rng.uniform(0, 1, 2)),
                *map(float, rng.uniform(0, 8784, 2)), 1.0,
            )
            rec = compute_e_dc(p)
            assert rec.e_dc == rec.e_it
            train_only = replace(p, n_inference=0.0)
            doubled = replace(train_only, n_train=2 * p.n_train)
            assert compute_e_it(doubled) == pytest.approx(2 * compute_e_it(train_only), rel=1e-12)
            inf_only = replace(p, n_train=0.0)
            doubled = replace(inf_only, n_inference=2 * p.n_inference)
            assert compute_e_it(doubled) == pytest.approx(2 * compute_e_it(inf_only), rel=1e-12)
        d["text"] = "6482.4 MWh exact; PUE=1 identity and N-linearity on 1000 random fleets"


def test_ac8_determinism(fixture_config, tmp_path, monkeypatch):
    with criterion("AC8 determinism") as d:
        monkeypatch.delenv("NEXUS_OUT_DIR", raising=False)
        a, b = tmp_path / "run1", tmp_path / "run2"
        assert main(["psi", str(fixture_config), "--out", str(a)]) == 0
        assert main(["psi", str(fixture_config), "--out", str(b)]) == 0
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        d["text"] = f"{len(match)}/{len(names)} files byte-identical"
        assert not mismatch and not errors
        assert "psi_report.csv" in match and "validation.json" in match
