"""Row-resampling bootstrap for loadings and path coefficients.

Replicate ``r`` draws its rows with a generator seeded from
``SeedSequence(seed, spawn_key=(r,))`` and replicates are aggregated in index
order, so the report does not depend on how many workers ran it.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from scipy import stats

from .engine import FitOptions, FitResult, SingularError, estimate
from .ingest import DataError, StandardizedMatrix, standardize_array
from .modelspec import ModelSpec

logger = logging.getLogger(__name__)


@dataclass
class ParameterEstimate:
    kind: str  # "loading" or "path"
    source: str  # construct for loadings, predictor for paths
    target: str  # indicator for loadings, outcome for paths
    original: float
    sample_mean: float
    sd: float
    t: float
    p: float

    @property
    def key(self):
        return (self.kind, self.source, self.target)


@dataclass
class BootstrapReport:
    parameters: list[ParameterEstimate]
    B: int
    seed: int
    effective_B: int
    discarded: list[int] = field(default_factory=list)

    def get(self, kind, source, target) -> ParameterEstimate:
        for p in self.parameters:
            if p.key == (kind, source, target):
                return p
        raise KeyError((kind, source, target))

    def loadings(self) -> list[ParameterEstimate]:
        return [p for p in self.parameters if p.kind == "loading"]

    def paths(self) -> list[ParameterEstimate]:
        return [p for p in self.parameters if p.kind == "path"]

    def to_dict(self) -> dict:
        return {
            "B": self.B, "seed": self.seed, "effective_B": self.effective_B,
            "discarded": list(self.discarded),
            "parameters": [asdict(p) for p in self.parameters],
        }

    @classmethod
    def from_dict(cls, d) -> "BootstrapReport":
        return cls([ParameterEstimate(**p) for p in d["parameters"]], d["B"], d["seed"],
                   d["effective_B"], list(d.get("discarded", [])))


def t_and_p(original, sd, df):
    """t = |original| / sd and its two-tailed Student-t p-value.

    A parameter that never varies (sd == 0) gets t = inf, p = 0 unless the
    estimate itself is zero.
    """
    if sd == 0:
        return (math.inf, 0.0) if original != 0 else (0.0, 1.0)
    t = abs(original) / sd
    return t, float(2 * stats.t.sf(t, df))


def _parameters(res: FitResult, spec: ModelSpec) -> dict:
    out = {}
    for c in spec.declared:
        for k, v in res.loadings[c].items():
            out[("loading", c, k)] = float(v)
    for (a, b), v in res.path_coefficients.items():
        out[("path", a, b)] = float(v)
    return out


def _signs(orig: FitResult, rep: FitResult, spec: ModelSpec) -> tuple[dict, dict]:
    """Per-construct flips aligning ``rep`` with ``orig``, and the matching
    per-indicator factors (component scores and interaction terms inherit
    the flips of the constructs they are built from)."""
    hos = {h.name: h.components for h in spec.higher_order}
    ints = {i.name: (i.moderator, i.predictor) for i in spec.interactions}
    s, ind = {}, {}
    for name in spec.declared:
        w_rep = rep.outer_weights[name]
        factors = []
        for k in w_rep.index:
            if name in hos:
                f = s[k]
            elif name in ints:
                m, p = ints[name]
                f = s[m] * s[p]
            else:
                f = 1.0
            ind[(name, k)] = f
            factors.append(f)
        w0 = orig.outer_weights[name].reindex(w_rep.index).to_numpy()
        s[name] = -1.0 if float((w_rep.to_numpy() * np.array(factors)) @ w0) < 0 else 1.0
    return s, ind


def _replicate(r, values, countries, columns, spec, opts, seed, original):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
    n = values.shape[0]
    rows = rng.integers(0, n, size=n)
    try:
        z, mean, sd = standardize_array(values[rows], columns)
        x = StandardizedMatrix(z, [countries[i] for i in rows], list(columns), mean, sd)
        res = estimate(x, spec, opts)
    except (DataError, SingularError, np.linalg.LinAlgError) as exc:
        return r, None, str(exc)
    s, ind = _signs(original, res, spec)
    out = {}
    for c in spec.declared:
        for k, v in res.loadings[c].items():
            out[("loading", c, k)] = float(v) * s[c] * ind[(c, k)]
    for (a, b), v in res.path_coefficients.items():
        out[("path", a, b)] = float(v) * s[a] * s[b]
    return r, out, None


def bootstrap(x: StandardizedMatrix, spec: ModelSpec, opts: FitOptions | None = None,
              B: int = 5000, seed: int = 42, workers: int = 1,
              original: FitResult | None = None) -> BootstrapReport:
    """Bootstrap SD, t and p for every loading and path coefficient.

    Each replicate resamples rows with replacement, restandardizes, refits
    (two-stage when the model needs it) and is sign-aligned construct by
    construct to the original solution. Replicates that hit a constant
    column or a singular regression are discarded and listed.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    opts = opts or FitOptions()
    if original is None:
        original = estimate(x, spec, opts)
    base = _parameters(original, spec)
    job = partial(_replicate, values=x.values, countries=list(x.countries), columns=list(x.columns),
                  spec=spec, opts=opts, seed=seed, original=original)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(B), chunksize=max(1, B // (4 * workers))))
    else:
        results = [job(r) for r in range(B)]

    kept, discarded = [], []
    for r, out, err in sorted(results, key=lambda t: t[0]):
        if out is None:
            discarded.append(r)
            logger.info("bootstrap replicate %d discarded: %s", r, err)
        else:
            kept.append(out)
    if discarded:
        logger.warning("%d of %d bootstrap replicates discarded", len(discarded), B)
    keys = list(base)
    draws = np.array([[rep.get(k, np.nan) for k in keys] for rep in kept]).reshape(len(kept), len(keys))
    params = []
    for j, k in enumerate(keys):
        col = draws[:, j]
        if len(col) >= 2:
            mean, sd = float(col.mean()), float(col.std(ddof=1))
            t, p = t_and_p(base[k], sd, len(col) - 1)
        else:
            mean = float(col.mean()) if len(col) else math.nan
            sd = t = p = math.nan
        params.append(ParameterEstimate(k[0], k[1], k[2], base[k], mean, sd, t, p))
    return BootstrapReport(params, B, seed, len(kept), discarded)
