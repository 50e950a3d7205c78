import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plspath import published
from plspath.diagnostics import (assess_constructs, ave, classify_effect, composite_reliability, cronbach_alpha,
                                 drop_predictor, effect_sizes, f_square, f_square_refit, filter_indicators,
                                 make_entry, reliability_report, rho_a)
from plspath.diagnostics import ReliabilityReport
from plspath.engine import estimate
from plspath.ingest import standardize
from plspath.simulate import SimSpec, simulate

loads = st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=8)


def test_alpha_two_items():
    x = np.array([[1.0, 1], [1, -1], [-1, 1], [-1, -1], [1, 1], [-1, -1]])
    r = np.corrcoef(x.T)[0, 1]
    assert cronbach_alpha(x) == pytest.approx(2 * r / (1 + r))
    # correlation 0.5 by construction
    rng = np.random.default_rng(0)
    q = np.linalg.qr(rng.normal(size=(40, 2)) - 0)[0]
    q -= q.mean(axis=0)
    q = np.linalg.qr(q)[0]
    pair = np.column_stack([q[:, 0], 0.5 * q[:, 0] + np.sqrt(0.75) * q[:, 1]])
    assert cronbach_alpha(pair) == pytest.approx(2 / 3, abs=1e-9)


def test_alpha_identical_and_uncorrelated():
    col = np.random.default_rng(1).normal(size=(50, 1))
    assert cronbach_alpha(np.hstack([col] * 4)) == pytest.approx(1.0)
    x = np.random.default_rng(2).normal(size=(20000, 4))
    assert abs(cronbach_alpha(x)) < 0.02
    with pytest.raises(ValueError):
        cronbach_alpha(col)


def test_alpha_large_n_one_factor():
    lam, K = 0.7, 5
    spec = SimSpec({"F": [lam] * K}, n=10000, seed=4)
    x = standardize(simulate(spec).dataset).values
    assert cronbach_alpha(x) == pytest.approx(K * lam**2 / (1 + (K - 1) * lam**2), abs=0.02)


def test_composite_reliability_examples():
    assert composite_reliability([0.8, 0.8]) == pytest.approx(0.7805, abs=1e-4)
    assert composite_reliability([1.0]) == 1.0
    ds = [0.836, 0.958, 0.914, 0.638, 0.895, 0.805]
    assert composite_reliability(ds) == pytest.approx(0.94, abs=0.005)


def test_ave_examples():
    assert ave([0.882, 0.905, 0.941, 0.94]) == pytest.approx(0.841, abs=0.001)
    ds = [r["loading"] for r in published.tables()["measurement"] if r["construct"] == "DS"]
    assert ave(ds) == pytest.approx(0.586, abs=0.001)
    assert ave([1.0]) == 1.0
    with pytest.raises(ValueError):
        ave([])


@settings(max_examples=100, deadline=None)
@given(loads, st.randoms(use_true_random=False))
def test_metrics_permutation_invariant(lam, rnd):
    perm = list(lam)
    rnd.shuffle(perm)
    assert composite_reliability(perm) == pytest.approx(composite_reliability(lam))
    assert ave(perm) == pytest.approx(ave(lam))
    assert 0 <= ave(lam) <= 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=8))
def test_cr_in_unit_interval_for_aligned_loadings(lam):
    cr = composite_reliability(lam)
    if sum(lam) > 0:
        assert 0 <= cr <= 1 + 1e-12


@settings(max_examples=100, deadline=None)
@given(loads, st.integers(0, 7))
def test_ave_negation_invariant(lam, k):
    k %= len(lam)
    neg = list(lam)
    neg[k] = -neg[k]
    assert ave(neg) == pytest.approx(ave(lam))


def test_filter_indicators_published_rows():
    rows = [{"construct": r["construct"], "indicator": r["indicator"], "loading": r["loading"], "p": r["p"]}
            for r in published.tables()["measurement"]]
    retained, dropped = filter_indicators(rows)
    assert retained["DS"] == ["Q3-1", "Q3-2", "Q3-3", "Q3-5", "Q3-7", "Q3-8"]
    assert "Q2-1" in retained["DPS"]
    assert dropped["DS"] == ["Q3-4", "Q3-6"]


def test_filter_indicators_identity():
    rows = [{"construct": "A", "indicator": k, "loading": 0.8, "p": 0.001} for k in "abc"]
    retained, dropped = filter_indicators(rows)
    assert retained == {"A": ["a", "b", "c"]} and dropped == {"A": []}


def test_assess_constructs_examples():
    rep = published.reliability_report()
    assert assess_constructs(rep) == ["DPS"]
    rep.constructs["GINI"] = make_entry(None, None, None, n_indicators=1)
    assert "GINI" not in assess_constructs(rep)
    assert make_entry(0.937, 0.938, 0.841).verdict == "pass"


def test_reliability_report_on_fixture(fixture_x, model):
    res = estimate(fixture_x, model)
    rep = reliability_report(fixture_x, res, model)
    assert set(rep.constructs) == {"DI", "DPS", "DS", "GINI", "SDGI"}
    assert rep.constructs["GINI"].alpha is None and rep.constructs["GINI"].verdict == "pass"
    di = rep.constructs["DI"]
    lam = res.loadings["DI"].to_numpy()
    assert di.cr == pytest.approx(composite_reliability(lam))
    assert di.rho_a is not None and 0 < di.rho_a <= 1.5
    assert list(rep.table().columns) == ["construct", "alpha", "cr", "rho_a", "ave", "verdict", "reasons"]


def test_rho_a_equals_one_for_parallel_items():
    f = np.random.default_rng(3).normal(size=(500, 1))
    x = np.hstack([f, f, f])
    assert rho_a(x, np.ones(3)) == pytest.approx(1.0)


def test_f_square_examples():
    assert f_square(0.632, 0.632) == 0.0
    assert f_square(0.75, 0.5) == pytest.approx(1.0)
    with pytest.raises(ZeroDivisionError):
        f_square(1.0, 0.5)
    assert classify_effect(0.02) == "negligible"
    assert classify_effect(0.174) == "meaningful"
    assert classify_effect(0.15) == "negligible"


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.99), st.floats(0, 0.99))
def test_f_square_nonnegative_when_r2_drops(a, b):
    hi, lo = max(a, b), min(a, b)
    assert f_square(hi, lo) >= 0


def _three_block():
    spec = SimSpec({"X": [0.9, 0.85, 0.8], "W": [0.9, 0.8, 0.85], "Y": [0.9, 0.85, 0.8]},
                   {("X", "Y"): 0.5, ("W", "Y"): 0.3}, {("X", "W"): 0.2}, n=500, seed=9)
    return standardize(simulate(spec).dataset), spec.model()


def test_effect_sizes_fixed_scores():
    x, spec = _three_block()
    res = estimate(x, spec)
    rep = effect_sizes(res, spec)
    e = rep.get("X", "Y")
    assert e.r2_included == pytest.approx(res.r_squared["Y"])
    assert e.f_squared == pytest.approx((e.r2_included - e.r2_excluded) / (1 - e.r2_included))
    assert e.classification == "meaningful"


def test_f_square_refit_matches_formula():
    x, spec = _three_block()
    e = f_square_refit(x, spec, "W", "Y")
    r2_in = estimate(x, spec).r_squared["Y"]
    r2_out = estimate(x, drop_predictor(spec, "W", "Y")).r_squared["Y"]
    assert abs(e.f_squared - (r2_in - r2_out) / (1 - r2_in)) < 1e-10
    with pytest.raises(KeyError):
        drop_predictor(spec, "Y", "X")
