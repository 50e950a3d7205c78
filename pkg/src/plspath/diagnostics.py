"""Measurement-model quality (alpha, composite reliability, AVE), indicator
retention rules, and structural effect sizes (f^2)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .engine import FitResult, estimate, ols_fit
from .modelspec import ModelSpec

ALPHA_MIN = 0.7
CR_MIN = 0.7
AVE_MIN = 0.5
LOADING_THRESHOLD = 0.6
SIGNIFICANCE = 0.05
F2_MEANINGFUL = 0.15


def cronbach_alpha(x) -> float:
    """Standardized alpha, K * rbar / (1 + (K - 1) * rbar), from the mean
    off-diagonal correlation of the block's columns."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("cronbach_alpha needs a block of at least two columns")
    k = x.shape[1]
    R = np.corrcoef(x, rowvar=False)
    rbar = (R.sum() - np.trace(R)) / (k * (k - 1))
    return float(k * rbar / (1 + (k - 1) * rbar))


def composite_reliability(loadings) -> float:
    """rho_c = (sum l)^2 / ((sum l)^2 + sum(1 - l^2)).

    Pass sign-convention-aligned loadings; rho_c is not invariant to
    negating a single loading.
    """
    lam = np.asarray(loadings, dtype=float)
    s2 = lam.sum() ** 2
    return float(s2 / (s2 + (1 - lam**2).sum()))


def ave(loadings) -> float:
    lam = np.asarray(loadings, dtype=float)
    if lam.size == 0:
        raise ValueError("AVE of an empty block")
    return float((lam**2).mean())


def rho_a(x, weights) -> float:
    """Dijkstra-Henseler rho_A of a Mode A block.

    ``weights`` are rescaled so the composite has unit variance.
    """
    x = np.asarray(x, dtype=float)
    S = np.corrcoef(x, rowvar=False)
    w = np.asarray(weights, dtype=float)
    w = w / np.sqrt(w @ S @ w)
    ww = np.outer(w, w)
    num = w @ (S - np.diag(np.diag(S))) @ w
    den = w @ (ww - np.diag(np.diag(ww))) @ w
    return float((w @ w) ** 2 * num / den)


@dataclass
class ConstructReliability:
    n_indicators: int
    alpha: float | None
    cr: float | None
    ave: float | None
    rho_a: float | None = None
    verdict: str = "pass"
    reasons: list[str] = field(default_factory=list)


@dataclass
class ReliabilityReport:
    constructs: dict[str, ConstructReliability]

    def table(self) -> pd.DataFrame:
        rows = []
        for name, c in self.constructs.items():
            rows.append({"construct": name, "alpha": c.alpha, "cr": c.cr, "rho_a": c.rho_a,
                         "ave": c.ave, "verdict": c.verdict, "reasons": "; ".join(c.reasons)})
        return pd.DataFrame(rows)


def _judge(c: ConstructReliability, alpha_min, cr_min, ave_min):
    if c.n_indicators < 2:
        return []
    reasons = []
    for label, value, floor in (("alpha", c.alpha, alpha_min), ("CR", c.cr, cr_min), ("AVE", c.ave, ave_min)):
        if value is None:
            reasons.append(f"{label} missing")
        elif value < floor:
            reasons.append(f"{label} {value:.3f} < {floor}")
    return reasons


def make_entry(alpha, cr, ave_, n_indicators=2, rho_a_=None,
               alpha_min=ALPHA_MIN, cr_min=CR_MIN, ave_min=AVE_MIN) -> ConstructReliability:
    c = ConstructReliability(n_indicators, alpha, cr, ave_, rho_a_)
    c.reasons = _judge(c, alpha_min, cr_min, ave_min)
    c.verdict = "fail" if c.reasons else "pass"
    return c


def reliability_report(x, fit: FitResult, spec: ModelSpec, **thresholds) -> ReliabilityReport:
    """Alpha, rho_c, rho_A and AVE for every first-order block of ``spec``.

    Single-indicator blocks are listed without metrics and pass.
    """
    out = {}
    for c in spec.constructs:
        if len(c.indicators) == 1:
            out[c.name] = make_entry(None, None, None, n_indicators=1)
            continue
        X = x.block(c.indicators)
        lam = fit.loadings[c.name].reindex(list(c.indicators)).to_numpy()
        w = fit.outer_weights[c.name].reindex(list(c.indicators)).to_numpy()
        out[c.name] = make_entry(cronbach_alpha(X), composite_reliability(lam), ave(lam),
                                 len(c.indicators), rho_a(X, w), **thresholds)
    return ReliabilityReport(out)


def assess_constructs(report: ReliabilityReport, alpha_min=ALPHA_MIN, cr_min=CR_MIN, ave_min=AVE_MIN) -> list[str]:
    """Constructs failing any of the alpha / CR / AVE thresholds."""
    return [name for name, c in report.constructs.items() if _judge(c, alpha_min, cr_min, ave_min)]


def filter_indicators(table, threshold=LOADING_THRESHOLD, alpha_level=SIGNIFICANCE):
    """Split indicators into retained and dropped sets per construct.

    ``table`` has columns ``construct, indicator, loading, p``. An indicator
    is kept when ``|loading| >= threshold`` and ``p < alpha_level``; negative
    loadings count by magnitude.
    """
    df = pd.DataFrame(table)
    retained: dict[str, list[str]] = {}
    dropped: dict[str, list[str]] = {}
    for row in df.itertuples(index=False):
        keep = abs(row.loading) >= threshold and row.p is not None and row.p < alpha_level
        (retained if keep else dropped).setdefault(row.construct, []).append(row.indicator)
        retained.setdefault(row.construct, [])
        dropped.setdefault(row.construct, [])
    return retained, dropped


def f_square(r2_included, r2_excluded) -> float:
    if r2_included >= 1:
        raise ZeroDivisionError("f^2 undefined when the full model has R^2 = 1")
    return (r2_included - r2_excluded) / (1 - r2_included)


def classify_effect(f2, threshold=F2_MEANINGFUL) -> str:
    return "meaningful" if f2 > threshold else "negligible"


@dataclass
class EffectSize:
    predictor: str
    target: str
    f_squared: float
    r2_included: float
    r2_excluded: float
    classification: str


@dataclass
class EffectSizeReport:
    effects: list[EffectSize]

    def table(self) -> pd.DataFrame:
        return pd.DataFrame([e.__dict__ for e in self.effects])

    def get(self, predictor, target) -> EffectSize:
        for e in self.effects:
            if (e.predictor, e.target) == (predictor, target):
                return e
        raise KeyError((predictor, target))


def structural_paths(spec: ModelSpec) -> list[tuple[str, str]]:
    return [(p.source, p.target) for p in spec.paths] + [(i.name, i.target) for i in spec.interactions]


def effect_sizes(fit: FitResult, spec: ModelSpec, threshold=F2_MEANINGFUL) -> EffectSizeReport:
    """f^2 of every structural predictor, holding the latent scores fixed and
    re-running the target's regression without that predictor."""
    scores = fit.latent_scores
    Y = scores.to_numpy()
    idx = {n: i for i, n in enumerate(scores.columns)}
    paths = structural_paths(spec)
    out = []
    for src, target in paths:
        preds = [s for s, t in paths if t == target]
        _, r2_in = ols_fit(Y, [idx[p] for p in preds], idx[target])
        rest = [idx[p] for p in preds if p != src]
        r2_out = ols_fit(Y, rest, idx[target])[1] if rest else 0.0
        f2 = f_square(r2_in, r2_out)
        out.append(EffectSize(src, target, f2, r2_in, r2_out, classify_effect(f2, threshold)))
    return EffectSizeReport(out)


def drop_predictor(spec: ModelSpec, source, target) -> ModelSpec:
    """``spec`` without the structural path (or interaction) ``source -> target``."""
    paths = tuple(p for p in spec.paths if (p.source, p.target) != (source, target))
    inters = tuple(i for i in spec.interactions if (i.name, i.target) != (source, target))
    if len(paths) + len(inters) == len(spec.paths) + len(spec.interactions):
        raise KeyError((source, target))
    hyps = tuple(h for h in spec.hypotheses if (h.source, h.target) != (source, target))
    return replace(spec, paths=paths, interactions=inters, hypotheses=hyps)


def f_square_refit(x, spec: ModelSpec, source, target, opts=None, threshold=F2_MEANINGFUL) -> EffectSize:
    """f^2 from two complete estimations: the model as given and the model
    with ``source -> target`` removed (outer weights re-estimated too)."""
    r2_in = estimate(x, spec, opts).r_squared[target]
    r2_out = estimate(x, drop_predictor(spec, source, target), opts).r_squared.get(target, 0.0)
    f2 = f_square(r2_in, r2_out)
    return EffectSize(source, target, f2, r2_in, r2_out, classify_effect(f2, threshold))
