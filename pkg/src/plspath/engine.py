"""PLS path modeling estimator (reflective / Mode A outer model).

The iteration follows the usual Lohmoeller scheme: latent proxies from the
current outer weights, inner weighting (path, factorial or centroid), Mode A
update of every block from its inner proxy, rescaling so that each block
score has unit sample variance. After convergence the latent scores are
standardized and oriented, loadings are indicator/score correlations, and the
structural model is estimated by OLS on the scores.

Higher-order constructs and interaction terms are handled by
:func:`two_stage_fit`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import pandas as pd

from .ingest import DataError, StandardizedMatrix, standardize_array
from .modelspec import Construct, ModelError, ModelSpec, StructuralPath

logger = logging.getLogger(__name__)

SCHEMES = ("path", "factorial", "centroid")


class SingularError(ValueError):
    """Structural regression with collinear predecessors."""


@dataclass(frozen=True)
class FitOptions:
    scheme: str = "path"
    tolerance: float = 1e-7
    max_iterations: int = 300
    initial_weights: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class FitResult:
    outer_weights: dict[str, pd.Series]
    loadings: dict[str, pd.Series]
    latent_scores: pd.DataFrame
    path_coefficients: dict[tuple[str, str], float]
    r_squared: dict[str, float]
    iterations: int
    final_delta: float
    converged: bool
    stages: dict[str, "FitResult"] = field(default_factory=dict)

    def loading_table(self) -> pd.DataFrame:
        rows = [(c, k, float(v)) for c, s in self.loadings.items() for k, v in s.items()]
        return pd.DataFrame(rows, columns=["construct", "indicator", "loading"])


# ---------------------------------------------------------------------------
# building blocks

def _sd(v, axis=0):
    return np.sqrt(((v - v.mean(axis=axis)) ** 2).sum(axis=axis) / (v.shape[axis] - 1))


def _corr_with(x, z):
    """Correlations of every column of standardized ``x`` with vector ``z``."""
    zc = z - z.mean()
    return x.T @ zc / ((x.shape[0] - 1) * _sd(zc))


def _adjacency(names, paths):
    idx = {n: i for i, n in enumerate(names)}
    preds = [[] for _ in names]
    succs = [[] for _ in names]
    for p in paths:
        preds[idx[p.target]].append(idx[p.source])
        succs[idx[p.source]].append(idx[p.target])
    return preds, succs


def _inner_matrix(scores, preds, succs, scheme):
    n, J = scores.shape
    C = scores.T @ scores / (n - 1)
    E = np.zeros((J, J))
    for j in range(J):
        neighbours = preds[j] + succs[j]
        if scheme == "centroid":
            for i in neighbours:
                E[i, j] = np.sign(C[i, j])
        elif scheme == "factorial":
            for i in neighbours:
                E[i, j] = C[i, j]
        else:
            if preds[j]:
                P = preds[j]
                E[P, j] = np.linalg.lstsq(C[np.ix_(P, P)], C[P, j], rcond=None)[0]
            for i in succs[j]:
                E[i, j] = C[i, j]
        if not neighbours:
            # isolated block: its own score is the proxy (reduces to a first
            # principal component)
            E[j, j] = 1.0
    return E


def inner_weights(scores, spec: ModelSpec, scheme: str = "path") -> pd.DataFrame:
    """Inner weight matrix ``e``; column ``j`` weights the proxy of ``j``.

    ``scores`` is a DataFrame whose columns include every construct of
    ``spec``; entries for non-adjacent pairs are zero.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    names = spec.construct_names
    Y = np.asarray(scores[names], dtype=float)
    preds, succs = _adjacency(names, spec.paths)
    E = _inner_matrix(Y, preds, succs, scheme)
    return pd.DataFrame(E, index=names, columns=names)


def update_outer_weights(x, z) -> np.ndarray:
    """Mode A update: weights proportional to corr(x_k, z), scaled so that
    the block score ``x @ w`` has unit sample standard deviation."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1:
        x = x.T
    r = _corr_with(x, np.asarray(z, dtype=float))
    if not np.any(np.abs(r) > 1e-14):
        raise DataError("degenerate block: all indicator/proxy correlations are zero")
    s = _sd(x @ r)
    if s <= 1e-14:
        raise DataError("degenerate block: weighted composite has zero variance")
    return r / s


def _standardize_vec(v):
    v = v - v.mean()
    return v / _sd(v)


def _orient(blocks, weights, single):
    """Standardized scores plus sign-oriented weights and loadings."""
    scores, out_w, out_l = [], [], []
    for X, w, one in zip(blocks, weights, single):
        if one:
            # single indicator: score is the column itself, loading exactly 1
            y = X[:, 0].copy()
            out_w.append(np.array([1.0]))
            out_l.append(np.array([1.0]))
            scores.append(y)
            continue
        y = _standardize_vec(X @ w)
        lam = X.T @ y / (X.shape[0] - 1)
        w = w / _sd(X @ w)
        if lam.sum() < 0:
            y, lam, w = -y, -lam, -w
        scores.append(y)
        out_w.append(w)
        out_l.append(lam)
    return np.column_stack(scores), out_w, out_l


def compute_latent_scores(x: StandardizedMatrix, weights: Mapping[str, object], spec: ModelSpec) -> pd.DataFrame:
    """Standardized block composites ``sum_k w_k x_k``, each oriented so that
    its block loadings sum to a non-negative value."""
    blocks, ws, single = [], [], []
    for c in spec.constructs:
        blocks.append(x.block(c.indicators))
        w = weights[c.name]
        w = np.asarray(w.reindex(list(c.indicators)) if isinstance(w, pd.Series) else w, dtype=float)
        ws.append(w)
        single.append(len(c.indicators) == 1)
    Y, _, _ = _orient(blocks, ws, single)
    return pd.DataFrame(Y, index=x.countries, columns=spec.construct_names)


def loadings(x: StandardizedMatrix, scores: pd.DataFrame, spec: ModelSpec) -> dict[str, pd.Series]:
    """Pearson correlation of every indicator with its construct score."""
    out = {}
    for c in spec.constructs:
        X = x.block(c.indicators)
        y = np.asarray(scores[c.name], dtype=float)
        out[c.name] = pd.Series(_corr_with(X, y) / _sd(X), index=list(c.indicators))
    return out


def ols_fit(Y, P, j):
    """Coefficients and R^2 of column ``j`` regressed on columns ``P``."""
    n = Y.shape[0]
    A = Y[:, P]
    y = Y[:, j]
    XtX = A.T @ A / (n - 1)
    if np.linalg.matrix_rank(XtX, tol=1e-10) < len(P):
        raise SingularError("singular: collinear predecessor scores")
    beta = np.linalg.solve(XtX, A.T @ y / (n - 1))
    resid = y - A @ beta
    r2 = 1.0 - (resid @ resid) / ((y - y.mean()) @ (y - y.mean()))
    return beta, float(r2)


def estimate_paths(scores: pd.DataFrame, spec: ModelSpec) -> tuple[dict, dict]:
    """OLS of every endogenous score on all its predecessors.

    Returns ``({(source, target): beta}, {target: r_squared})``.
    """
    names = list(scores.columns)
    Y = np.asarray(scores, dtype=float)
    idx = {n: i for i, n in enumerate(names)}
    betas, r2 = {}, {}
    for target in spec.endogenous():
        preds = spec.predecessors(target)
        beta, r2[target] = ols_fit(Y, [idx[p] for p in preds], idx[target])
        for p, b in zip(preds, beta):
            betas[(p, target)] = float(b)
    return betas, r2


# ---------------------------------------------------------------------------
# estimation

def fit(x: StandardizedMatrix, spec: ModelSpec, opts: FitOptions | None = None) -> FitResult:
    """Estimate a first-order reflective model.

    Non-convergence is logged and flagged on the result, which is still
    returned.
    """
    opts = opts or FitOptions()
    if not spec.is_first_order:
        raise ModelError("model has higher-order or interaction terms; use two_stage_fit")
    names = spec.construct_names
    blocks = [x.block(c.indicators) for c in spec.constructs]
    single = [len(c.indicators) == 1 for c in spec.constructs]
    init = opts.initial_weights or {}
    weights = []
    for c, X in zip(spec.constructs, blocks):
        w = np.array([float(init.get(k, 1.0)) for k in c.indicators])
        s = _sd(X @ w)
        if s <= 1e-14:
            raise DataError(f"initial weights give a constant score for {c.name}")
        weights.append(w / s)
    preds, succs = _adjacency(names, spec.paths)

    delta = np.inf
    iterations = 0
    for iterations in range(1, int(opts.max_iterations) + 1):
        Y = np.column_stack([X @ w for X, w in zip(blocks, weights)])
        E = _inner_matrix(Y, preds, succs, opts.scheme)
        Z = Y @ E
        new = []
        for j, X in enumerate(blocks):
            try:
                new.append(update_outer_weights(X, Z[:, j]))
            except DataError as exc:
                raise DataError(f"construct {names[j]}: {exc}") from None
        delta = max(float(np.max(np.abs(a - b))) for a, b in zip(new, weights))
        weights = new
        if delta < opts.tolerance:
            break
    converged = delta < opts.tolerance
    if not converged:
        logger.warning("PLS did not converge in %d iterations (max |dw| = %.3g)", iterations, delta)

    Y, weights, lams = _orient(blocks, weights, single)
    scores = pd.DataFrame(Y, index=list(x.countries), columns=names)
    betas, r2 = estimate_paths(scores, spec)
    return FitResult(
        outer_weights={c.name: pd.Series(w, index=list(c.indicators)) for c, w in zip(spec.constructs, weights)},
        loadings={c.name: pd.Series(l, index=list(c.indicators)) for c, l in zip(spec.constructs, lams)},
        latent_scores=scores,
        path_coefficients=betas,
        r_squared=r2,
        iterations=iterations,
        final_delta=float(delta),
        converged=converged,
    )


# ---------------------------------------------------------------------------
# higher-order constructs and moderation

def interaction_term(moderator, predictor) -> np.ndarray:
    """Restandardized product of the standardized moderator and predictor."""
    m = np.asarray(moderator, dtype=float)
    p = np.asarray(predictor, dtype=float)
    try:
        z, _, _ = standardize_array(np.column_stack([m, p]))
        prod, _, _ = standardize_array((z[:, 0] * z[:, 1])[:, None])
    except DataError:
        raise DataError("degenerate interaction: constant moderator, predictor or product") from None
    return prod[:, 0]


def first_order_spec(spec: ModelSpec) -> ModelSpec:
    """The Stage-1 model: interactions dropped, each higher-order construct
    replaced by its components, which inherit its structural neighbours."""
    comps = {h.name: h.components for h in spec.higher_order}
    paths: list[StructuralPath] = []
    for p in spec.paths:
        for s in comps.get(p.source, (p.source,)):
            for t in comps.get(p.target, (p.target,)):
                sp = StructuralPath(s, t)
                if sp not in paths:
                    paths.append(sp)
    return ModelSpec(spec.constructs, tuple(paths))


def _stage_two(x: StandardizedMatrix, spec: ModelSpec, stage1: FitResult):
    component_of = {c: h.name for h in spec.higher_order for c in h.components}
    for p in spec.paths:
        for end in (p.source, p.target):
            if end in component_of:
                raise ModelError(
                    f"path {p.source} -> {p.target} touches {end}, a component of "
                    f"{component_of[end]}; route it through the higher-order construct"
                )
    keep = [c for c in spec.constructs if c.name not in component_of]
    cols = [k for c in keep for k in c.indicators]
    clash = set(cols) & set(component_of)
    if clash:
        raise ModelError(f"component name(s) {sorted(clash)} collide with indicator codes")
    values = [x.block(cols)] if cols else []
    comp_names = [c for h in spec.higher_order for c in h.components]
    values.append(stage1.latent_scores[comp_names].to_numpy())
    z = StandardizedMatrix(
        np.column_stack(values), list(x.countries), cols + comp_names,
        np.zeros(len(cols) + len(comp_names)), np.ones(len(cols) + len(comp_names)),
    )
    constructs = tuple(keep) + tuple(Construct(h.name, h.components) for h in spec.higher_order)
    return z, ModelSpec(constructs, spec.paths)


def _with_interactions(x: StandardizedMatrix, spec: ModelSpec, base: ModelSpec, scores: pd.DataFrame):
    cols, extra, paths = [], [], list(base.paths)
    for i in spec.interactions:
        cols.append(interaction_term(scores[i.moderator], scores[i.predictor]))
        extra.append(Construct(i.name, (i.name,)))
        paths.append(StructuralPath(i.name, i.target))
    z = StandardizedMatrix(
        np.column_stack([x.values] + cols), list(x.countries), list(x.columns) + [i.name for i in spec.interactions],
        np.concatenate([x.means, np.zeros(len(cols))]), np.concatenate([x.sds, np.ones(len(cols))]),
    )
    return z, ModelSpec(base.constructs + tuple(extra), tuple(paths))


def two_stage_fit(x: StandardizedMatrix, spec: ModelSpec, opts: FitOptions | None = None) -> FitResult:
    """Fit a model with higher-order constructs and/or interaction terms.

    Stage 1 estimates the first-order blocks. In Stage 2 each higher-order
    construct is measured by its components' Stage-1 scores, and each
    interaction enters as a single-indicator construct built from the
    moderator and predictor scores of the interaction-free model. The merged
    result keeps Stage-1 measurement for components, Stage-2 results for
    everything else, and reports component -> higher-order paths as the OLS
    of the higher-order score on its component scores.
    """
    opts = opts or FitOptions()
    if spec.is_first_order:
        return fit(x, spec, opts)
    stage1 = fit(x, first_order_spec(spec), opts)

    if spec.higher_order:
        x2, s2 = _stage_two(x, spec, stage1)
        base = fit(x2, s2, opts)
    else:
        x2, s2 = x, ModelSpec(spec.constructs, spec.paths)
        base = stage1
    if spec.interactions:
        all_scores = pd.concat([stage1.latent_scores, base.latent_scores], axis=1)
        all_scores = all_scores.loc[:, ~all_scores.columns.duplicated(keep="last")]
        x3, s3 = _with_interactions(x2, spec, s2, all_scores)
        final = fit(x3, s3, opts)
    else:
        final = base

    components = {c for h in spec.higher_order for c in h.components}
    weights, lams, score_cols = {}, {}, {}
    for name in spec.declared:
        src = stage1 if name in components else final
        weights[name] = src.outer_weights[name]
        lams[name] = src.loadings[name]
        score_cols[name] = src.latent_scores[name]
    scores = pd.DataFrame(score_cols, index=list(x.countries))

    betas = dict(final.path_coefficients)
    r2 = dict(final.r_squared)
    if spec.higher_order:
        ho_spec = ModelSpec(
            tuple(Construct(n, (n,)) for n in scores.columns),
            tuple(StructuralPath(c, h.name) for h in spec.higher_order for c in h.components),
        )
        hb, hr = estimate_paths(scores, ho_spec)
        betas.update(hb)
        r2.update(hr)
    order = {n: i for i, n in enumerate(spec.declared)}
    betas = dict(sorted(betas.items(), key=lambda kv: (order[kv[0][1]], order[kv[0][0]])))
    r2 = dict(sorted(r2.items(), key=lambda kv: order[kv[0]]))

    stages = {"stage1": stage1, "stage2": final}
    if final is not base:
        stages["stage2_main_effects"] = base
    fits = list({id(s): s for s in stages.values()}.values())
    return FitResult(
        outer_weights=weights,
        loadings=lams,
        latent_scores=scores,
        path_coefficients=betas,
        r_squared=r2,
        iterations=sum(s.iterations for s in fits),
        final_delta=max(s.final_delta for s in fits),
        converged=all(s.converged for s in fits),
        stages=stages,
    )


def estimate(x: StandardizedMatrix, spec: ModelSpec, opts: FitOptions | None = None) -> FitResult:
    """:func:`fit` or :func:`two_stage_fit`, whichever the model needs."""
    if spec.is_first_order:
        return fit(x, spec, opts)
    return two_stage_fit(x, spec, opts)
