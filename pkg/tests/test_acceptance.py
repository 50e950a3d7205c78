"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line
(also collected in the terminal summary)."""

import json
import os
import time

import numpy as np
import pytest

from plspath import published
from plspath.bootstrap import bootstrap, t_and_p
from plspath.diagnostics import (ave, classify_effect, composite_reliability, drop_predictor, f_square,
                                 f_square_refit)
from plspath.engine import FitOptions, estimate, fit
from plspath.index import load_block_scores, sosdit_scores
from plspath.ingest import standardize
from plspath.modelspec import Construct, ModelSpec, StructuralPath, default_model
from plspath.pipeline import SYNTHETIC_NOTICE, run_analysis
from plspath.report import build_report, dumps
from plspath.simulate import SimSpec, recovery_report, reference_spec, simulate
from plspath.verdicts import hypothesis_verdicts

from .conftest import make_dataset

TABLES = published.tables()


def loadings_of(construct):
    return [r["loading"] for r in TABLES["measurement"] if r["construct"] == construct]


def test_ave_reproduction(criterion):
    di = ave([0.882, 0.905, 0.941, 0.94])
    ds = ave(loadings_of("DS"))
    ok = abs(di - 0.841) <= 0.001 and abs(ds - 0.586) <= 0.001
    criterion("AVE reproduction", ok, f"DI {di:.4f} vs 0.841, DS {ds:.4f} vs 0.586")


def test_cr_cross_check(criterion):
    retained = [0.836, 0.958, 0.914, 0.638, 0.895, 0.805]
    ds = composite_reliability(retained)
    di = composite_reliability(loadings_of("DI"))
    # DI: rho_c from the published loadings is 0.955, the published CR 0.938;
    # the gap is a documented divergence, asserted rather than matched
    ok = abs(ds - 0.94) <= 0.005 and abs(di - 0.955) <= 0.001 and abs(di - 0.938) > 0.005
    criterion("CR cross-check", ok, f"DS rho_c {ds:.4f} vs 0.94; DI rho_c {di:.4f} diverges from 0.938 as documented")


def test_t_arithmetic(criterion):
    worst, rows = 0.0, 0
    for r in TABLES["measurement"] + TABLES["structural"]:
        if r["sd"] == 0:
            continue  # single-indicator rows: 0/0, published t is a placeholder
        est = r.get("loading", r.get("beta"))
        t, _ = t_and_p(est, r["sd"], 4999)
        worst = max(worst, abs(t - r["t"]) / r["t"])
        rows += 1
    criterion("t-arithmetic consistency", worst <= 0.05, f"{rows} rows, worst relative gap {worst:.3%}")


def test_single_indicator_identities(criterion, fixture_x, model):
    res = estimate(fixture_x, model)
    ok = True
    for name in ("GINI", "SDGI"):
        col = fixture_x.values[:, fixture_x.columns.index(name)]
        ok &= res.loadings[name][name] == 1.0
        ok &= bool(np.array_equal(res.latent_scores[name].to_numpy(), col))
        ok &= bool(np.array_equal(res.stages["stage1"].latent_scores[name].to_numpy(), col))
    criterion("single-indicator identities", ok, "GINI, SDGI: loading 1.0, score == standardized column")


def _power_iteration(C, iters=200_000, tol=1e-15):
    v = np.ones(C.shape[1]) / np.sqrt(C.shape[1])
    u = C @ v
    u /= np.linalg.norm(u)
    for _ in range(iters):
        v_new = C.T @ u
        v_new /= np.linalg.norm(v_new)
        u_new = C @ v_new
        u_new /= np.linalg.norm(u_new)
        done = max(np.abs(u_new - u).max(), np.abs(v_new - v).max()) < tol
        u, v = u_new, v_new
        if done:
            break
    return u, v


def _align(w, ref):
    w = w / np.linalg.norm(w)
    return w * np.sign(w @ ref)


def test_two_block_oracle(criterion):
    rng = np.random.default_rng(20230131)
    opts = FitOptions(tolerance=1e-13, max_iterations=20_000)
    worst, svd_gap = 0.0, 0.0
    start = time.perf_counter()
    for _ in range(200):
        k1, k2 = rng.integers(3, 7, size=2)
        f = rng.normal(size=50)
        g = rng.uniform(0.3, 0.8) * f + rng.normal(size=50)
        X = np.column_stack([rng.uniform(0.4, 0.9) * f + rng.normal(size=50) for _ in range(k1)])
        Y = np.column_stack([rng.uniform(0.4, 0.9) * g + rng.normal(size=50) for _ in range(k2)])
        cols = [f"x{i}" for i in range(k1)] + [f"y{i}" for i in range(k2)]
        x = standardize(make_dataset(np.column_stack([X, Y]), cols))
        spec = ModelSpec((Construct("X", tuple(cols[:k1])), Construct("Y", tuple(cols[k1:]))),
                         (StructuralPath("X", "Y"),))
        res = fit(x, spec, opts)
        C = x.values[:, :k1].T @ x.values[:, k1:] / 49
        u, v = _power_iteration(C)
        wx = _align(res.outer_weights["X"].to_numpy(), u)
        wy = _align(res.outer_weights["Y"].to_numpy(), v)
        worst = max(worst, np.abs(wx - u).max(), np.abs(wy - v).max())
        # second, independent route to the same oracle
        su, _, svt = np.linalg.svd(C)
        svd_gap = max(svd_gap, np.abs(_align(su[:, 0], u) - u).max(), np.abs(_align(svt[0], v) - v).max())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and svd_gap <= 1e-6 and elapsed < 10
    criterion("two-block oracle", ok, f"200 instances, max |dw| {worst:.2e}, power-vs-SVD {svd_gap:.2e}, {elapsed:.1f}s")


def test_monte_carlo_recovery(criterion):
    start = time.perf_counter()
    reports = {n: recovery_report(reference_spec(n=n), 50) for n in (100, 1000, 10000)}
    elapsed = time.perf_counter() - start
    big = reports[10000]
    worst = big.loc[big["mae"].idxmax()]
    rmse = np.column_stack([reports[n]["rmse"].to_numpy() for n in (100, 1000, 10000)])
    # single-indicator loadings are exactly 1 at every n (RMSE 0); they may tie
    strict = (rmse[:, 0] > rmse[:, 1]) & (rmse[:, 1] > rmse[:, 2])
    tied_zero = (rmse == 0).all(axis=1)
    monotone = bool((strict | tied_zero).all())
    # Mode A loadings carry a bias floor that does not shrink with n, so at
    # n >= 1000 RMSE differences fall within Monte Carlo noise
    flips = [big["name"].iloc[i] for i in np.flatnonzero(~(strict | tied_zero))]
    failed = sum(r.attrs["failed"] for r in reports.values())
    ok = big["mae"].max() <= 0.03 and monotone and failed == 0 and elapsed < 120
    criterion("Monte Carlo recovery", ok,
              f"max MAE {worst['mae']:.4f} ({worst['name']}), RMSE monotone={monotone} "
              f"(non-monotone: {', '.join(flips) or 'none'}), {elapsed:.1f}s")


def test_fixture_ranking(criterion):
    scores = sosdit_scores(load_block_scores())
    countries = [s for s in scores if s.rank is not None]
    by = {s.country: s.sosdit for s in countries}
    worst = max(abs(by[c] - v) for c, v in TABLES["ranking"].items())
    top = [s.country for s in countries[:3]]
    bottom = [s.country for s in countries[-3:]][::-1]
    eu = scores[-1].sosdit
    ok = worst <= 0.005 and top == ["FI", "NL", "DK"] and bottom == ["RO", "BG", "PT"] and abs(eu - 0.49) <= 0.005
    criterion("fixture ranking", ok, f"max |d| {worst:.4f}, top {top}, bottom {bottom}, EU {eu:.4f}")


def test_verdict_reproduction(criterion):
    out = hypothesis_verdicts(published.bootstrap_report(), published.reliability_report(), default_model())
    got = {v.id: v.verdict for v in out}
    want = {"H1": "Confirmed", "H2": "Not Confirmed", "H3": "Confirmed", "H4": "Confirmed",
            "H5": "Confirmed", "H6": "Not Confirmed"}
    criterion("verdict reproduction", got == want, ", ".join(f"{k}={v}" for k, v in got.items()))


def test_f_square_identity(criterion):
    spec = SimSpec({"X": [0.9, 0.85, 0.8], "W": [0.85, 0.8, 0.9], "Y": [0.9, 0.8, 0.85]},
                   {("X", "Y"): 0.5, ("W", "Y"): 0.25}, {("X", "W"): 0.3}, n=400, seed=17)
    x = standardize(simulate(spec).dataset)
    model = spec.model()
    worst = 0.0
    for src in ("X", "W"):
        e = f_square_refit(x, model, src, "Y")
        r2_in = estimate(x, model).r_squared["Y"]
        r2_out = estimate(x, drop_predictor(model, src, "Y")).r_squared["Y"]
        worst = max(worst, abs(e.f_squared - (r2_in - r2_out) / (1 - r2_in)), abs(e.f_squared - f_square(r2_in, r2_out)))
    cls = (classify_effect(0.174), classify_effect(0.02))
    ok = worst <= 1e-10 and cls == ("meaningful", "negligible")
    criterion("f-square identity", ok, f"max |d| {worst:.1e}; 0.174 -> {cls[0]}, 0.02 -> {cls[1]}")


def test_determinism_under_parallelism(criterion, fixture_x, model):
    one = dumps(bootstrap(fixture_x, model, B=1000, seed=42, workers=1).to_dict())
    many = dumps(bootstrap(fixture_x, model, B=1000, seed=42, workers=4).to_dict())
    criterion("determinism under parallelism", one == many, f"B=1000 seed=42, 1 vs 4 workers, {len(one)} bytes")


def test_non_reproducibility_disclosure(criterion, fixture_data, model, registry):
    a = run_analysis(fixture_data, model, registry, B=50, seed=42)
    md = build_report(a).metadata
    published_r2 = TABLES["r_squared"]["SDGI"]
    ok = md["data_source"] == SYNTHETIC_NOTICE
    criterion("non-reproducibility disclosure", ok,
              f"fixture run flagged synthetic; R^2 {a.fit.r_squared['SDGI']:.3f} vs published {published_r2} "
              "not asserted; live check needs PLSPATH_LIVE=1")


@pytest.mark.live
def test_live_smoke(tmp_path, registry):
    """Live extraction: signs of every structural path agree with the
    published ones and |delta beta| <= 0.15. SDG Index scores have no API;
    point PLSPATH_SDGI at a JSON file {"values": {country: score}}."""
    from plspath.fetch import assemble_dataset, fetch_indicators

    sdgi = os.environ.get("PLSPATH_SDGI")
    if not sdgi:
        pytest.skip("PLSPATH_SDGI not set")
    (tmp_path / "raw").mkdir()
    (tmp_path / "raw" / "SDGI.json").write_text(json.dumps(
        {"code": "SDGI", "format": "values", "payload": json.loads(open(sdgi).read())}))
    (tmp_path / "manifest.json").write_text(json.dumps(
        {"SDGI": {"file": "raw/SDGI.json", "provider": "manual", "url": sdgi, "format": "values", "fetched_at": ""}}))
    fetch_indicators([c for c in registry.codes if c != "SDGI"], tmp_path)
    data = assemble_dataset(tmp_path, registry)
    a = run_analysis(data, default_model(), registry, B=500, seed=42)
    for r in TABLES["structural"]:
        beta = a.fit.path_coefficients[(r["from"], r["to"])]
        assert np.sign(beta) == np.sign(r["beta"])
        assert abs(beta - r["beta"]) <= 0.15
