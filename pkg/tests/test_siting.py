import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nexusgrid.domain import SCENARIOS, AiShareSchedule, SiteRecord, SitingEvidence
from nexusgrid.scenario import project_firm
from nexusgrid.siting import (
    ai_weights,
    allocate_regional,
    expansion_probabilities,
    hist_weights,
    regional_totals,
    select_ai_locations,
)


def ev(region, s, r, firm="F"):
    return SitingEvidence(firm, region, s, r)


def test_expansion_single_region():
    assert expansion_probabilities([ev("A", 0.6, 0.9)]) == {"A": 1.0}


def test_expansion_two_regions():
    p = expansion_probabilities([ev("A", 0.8, 0.5), ev("B", 0.4, 0.5)])
    assert p["A"] == pytest.approx(2 / 3, rel=1e-15)
    assert p["B"] == pytest.approx(1 / 3, rel=1e-15)


def test_expansion_negative_sentiment_uniform():
    assert expansion_probabilities([ev("A", -0.3, 0.9), ev("B", 0.0, 0.5)]) == {"A": 0.5, "B": 0.5}


def test_expansion_negative_region_gets_zero():
    p = expansion_probabilities([ev("A", -0.5, 0.9), ev("B", 0.4, 0.5)])
    assert p == {"A": 0.0, "B": 1.0}


def test_expansion_empty():
    with pytest.raises(ValueError):
        expansion_probabilities([])


def test_ai_weights_examples():
    assert ai_weights({"a": 3.0, "b": 1.0}).weights == {"a": 0.75, "b": 0.25}
    assert ai_weights({"a": 5.0}).weights == {"a": 1.0}
    w = ai_weights({k: 2.0 for k in "abcd"}).weights
    assert all(v == 0.25 for v in w.values())
    assert ai_weights({"a": 0.0, "b": 0.0}).weights == {"a": 0.5, "b": 0.5}
    with pytest.raises(ValueError):
        ai_weights({})


def test_hist_weights_examples():
    inv = [SiteRecord("F", "a", 3), SiteRecord("F", "b", 1), SiteRecord("G", "c", 9)]
    assert hist_weights(inv, "F").weights == {"a": 0.75, "b": 0.25}
    assert hist_weights(inv, "G").weights == {"c": 1.0}
    eq = hist_weights([SiteRecord("F", x, 2) for x in "abc"], "F").weights
    assert all(v == pytest.approx(1 / 3) for v in eq.values())
    with pytest.raises(ValueError):
        hist_weights(inv, "Nope")


def _trajectory():
    return project_firm("F", SCENARIOS["neutral"], 10, 2, AiShareSchedule("F", 0.4, 0.5, 0.6))


def test_allocate_single_bucket():
    t = _trajectory()
    out = allocate_regional(
        t, ai_weights({"a": 1.0}), hist_weights([SiteRecord("F", "a", 1)], "F"), {"a": "R"}, 2027
    )
    assert out == {"R": pytest.approx(t.series[2027].e_tot, rel=1e-15)}


def test_allocate_term_by_term():
    t = _trajectory()  # 2025: e_ai_new 2.5, e_new 6.25, e_stock 11.0
    w_ai = ai_weights({"A": 1.0, "B": 0.0})
    w_hist = hist_weights([SiteRecord("F", "A", 0), SiteRecord("F", "B", 1)], "F")
    out = allocate_regional(t, w_ai, w_hist, {"A": "R1", "B": "R2"}, 2025)
    assert out["R1"] == pytest.approx(2.5, rel=1e-15)
    assert out["R2"] == pytest.approx(14.75, rel=1e-15)


def test_allocate_merge_locations_is_additive():
    t = _trajectory()
    inv = [SiteRecord("F", "A", 2), SiteRecord("F", "B", 1), SiteRecord("F", "C", 3)]
    w_ai = ai_weights({"A": 1.0, "B": 2.0, "C": 3.0})
    w_hist = hist_weights(inv, "F")
    split = allocate_regional(t, w_ai, w_hist, {"A": "R", "B": "R", "C": "S"}, 2026)
    sep = allocate_regional(t, w_ai, w_hist, {"A": "RA", "B": "RB", "C": "S"}, 2026)
    assert split["R"] == pytest.approx(sep["RA"] + sep["RB"], rel=1e-14)
    assert split["S"] == sep["S"]


def test_allocate_unmapped_location():
    t = _trajectory()
    with pytest.raises(KeyError):
        allocate_regional(t, ai_weights({"A": 1.0}), hist_weights([SiteRecord("F", "A", 1)], "F"),
                          {}, 2025)


def test_regional_totals():
    assert regional_totals([{"R": 5.0}, {"R": 5.0}]) == {"R": 10.0}
    assert regional_totals([{"R": 1.0, "S": 2.0}]) == {"R": 1.0, "S": 2.0}


def test_regional_totals_conserve_three_firms():
    sched = AiShareSchedule("F", 0.3, 0.4, 0.6)
    rmap = {"a": "R1", "b": "R2", "c": "R2", "d": "R3"}
    trajs, maps = [], []
    for i, firm in enumerate(("F1", "F2", "F3")):
        t = project_firm(firm, SCENARIOS["optimistic"], 10 + i, 1 + i, sched)
        inv = [SiteRecord(firm, loc, 1 + (i + j) % 3) for j, loc in enumerate("abcd")]
        w_ai = ai_weights({loc: float(j + i) for j, loc in enumerate("abcd")})
        maps.append(allocate_regional(t, w_ai, hist_weights(inv, firm), rmap, 2030))
        trajs.append(t)
    total = regional_totals(maps)
    expected = math.fsum(t.series[2030].e_tot for t in trajs)
    assert math.fsum(total.values()) == pytest.approx(expected, rel=1e-12)


def test_select_ai_locations():
    rmap = {"a": "R1", "b": "R2", "c": "R3"}
    assert select_ai_locations("abc", None, rmap) == ["a", "b", "c"]
    assert select_ai_locations("abc", {"R1": 0.0, "R2": 1.0}, rmap) == ["b"]
    assert select_ai_locations("abc", {"R9": 1.0}, rmap) == ["a", "b", "c"]


@given(st.dictionaries(st.text("abcdef", min_size=1, max_size=3),
                       st.floats(0, 1e6), min_size=1, max_size=12),
       st.floats(1e-3, 1e3))
def test_ai_weight_scaling_invariance(energies, k):
    w1 = ai_weights(energies).weights
    w2 = ai_weights({l: e * k for l, e in energies.items()}).weights
    for loc in energies:
        assert w2[loc] == pytest.approx(w1[loc], rel=1e-9, abs=1e-12)
    assert math.fsum(w1.values()) == pytest.approx(1.0, abs=1e-9)
