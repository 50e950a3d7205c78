"""End-to-end analysis: measurement screening, reduced-model estimation,
hypothesis verdicts, effect sizes and the composite ranking."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources

from .bootstrap import BootstrapReport, bootstrap
from .diagnostics import (LOADING_THRESHOLD, SIGNIFICANCE, EffectSizeReport, ReliabilityReport,
                          assess_constructs, effect_sizes, filter_indicators, reliability_report)
from .engine import FitOptions, FitResult, estimate
from .index import CountryScore, block_scores, sosdit_scores
from .ingest import (Dataset, IndicatorRegistry, default_registry, impute_missing, load_dataset,
                     normalize_shares, standardize)
from .modelspec import Construct, ModelError, ModelSpec, validate_model
from .verdicts import Verdict, hypothesis_verdicts

logger = logging.getLogger(__name__)


@dataclass
class Analysis:
    spec: ModelSpec
    reduced_spec: ModelSpec
    options: FitOptions
    full_fit: FitResult
    full_boot: BootstrapReport
    retained: dict[str, list[str]]
    dropped: dict[str, list[str]]
    fit: FitResult
    boot: BootstrapReport
    reliability: ReliabilityReport
    verdicts: list[Verdict]
    effects: EffectSizeReport
    scores: list[CountryScore]
    metadata: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.full_fit.converged and self.fit.converged


def dataset_digest(d: Dataset) -> str:
    h = hashlib.sha256()
    h.update("\x1f".join(d.countries).encode())
    h.update("\x1e".join(d.columns).encode())
    h.update(d.values.tobytes())
    h.update(d.missing.tobytes())
    return h.hexdigest()


SYNTHETIC_NOTICE = ("synthetic fixture: generated stand-in for the January 2023 Eurostat/World Bank "
                    "extraction, which cannot be re-downloaded; published loadings, path "
                    "coefficients, R^2 and f^2 are not expected to be reproduced from it")


@lru_cache(maxsize=1)
def _fixture_digest() -> str:
    path = resources.files("plspath").joinpath("data/eu27_fixture.csv")
    return dataset_digest(load_dataset(str(path), default_registry()))


def data_provenance(d: Dataset) -> str:
    return SYNTHETIC_NOTICE if dataset_digest(d) == _fixture_digest() else "user-supplied data"


def reduce_model(spec: ModelSpec, retained: dict[str, list[str]]) -> ModelSpec:
    """Copy of ``spec`` with each block cut down to its retained indicators.

    A block left empty keeps its full original indicator list so the
    structure stays estimable; that construct is reported as failing.
    """
    constructs = []
    for c in spec.constructs:
        keep = [k for k in c.indicators if k in retained.get(c.name, c.indicators)]
        if not keep:
            logger.warning("construct %s has no retained indicators; keeping all", c.name)
            keep = list(c.indicators)
        constructs.append(Construct(c.name, tuple(keep), c.mode))
    return replace(spec, constructs=tuple(constructs))


def score_blocks(spec: ModelSpec, failed: list[str]) -> list[str]:
    """Blocks entering the composite: components of the first higher-order
    construct that passed reliability, else every reliable multi-indicator
    block."""
    if spec.higher_order:
        pool = list(spec.higher_order[0].components)
    else:
        pool = [c.name for c in spec.constructs if len(c.indicators) > 1]
    return [c for c in pool if c not in failed]


def run_analysis(data: Dataset, spec: ModelSpec, registry: IndicatorRegistry, *, B: int = 5000,
                 seed: int = 42, scheme: str = "path", tolerance: float = 1e-7,
                 max_iterations: int = 300, workers: int = 1,
                 threshold: float = LOADING_THRESHOLD, alpha: float = SIGNIFICANCE) -> Analysis:
    problems = validate_model(spec, data)
    if problems:
        raise ModelError("; ".join(problems))
    opts = FitOptions(scheme=scheme, tolerance=tolerance, max_iterations=max_iterations)
    complete = impute_missing(data)
    x = standardize(complete)

    full_fit = estimate(x, spec, opts)
    full_boot = bootstrap(x, spec, opts, B=B, seed=seed, workers=workers, original=full_fit)
    first_order = {c.name for c in spec.constructs}
    table = [{"construct": p.source, "indicator": p.target, "loading": p.original, "p": p.p}
             for p in full_boot.loadings() if p.source in first_order]
    retained, dropped = filter_indicators(table, threshold, alpha)
    # single indicators never vary across replicates; they are always kept
    for c in spec.constructs:
        if len(c.indicators) == 1:
            retained[c.name], dropped[c.name] = list(c.indicators), []

    reduced = reduce_model(spec, retained)
    fit = estimate(x, reduced, opts)
    boot = bootstrap(x, reduced, opts, B=B, seed=seed, workers=workers, original=fit)
    rel = reliability_report(x, fit, reduced)
    verdicts = hypothesis_verdicts(boot, rel, reduced, alpha)
    effects = effect_sizes(fit, reduced)

    failed = assess_constructs(rel)
    blocks = score_blocks(reduced, failed)
    norm = normalize_shares(complete, registry)
    scores = sosdit_scores(block_scores(norm, reduced, {b: list(reduced.construct(b).indicators) for b in blocks}))

    metadata = {
        "seed": seed, "B": B, "effective_B": boot.effective_B, "scheme": scheme,
        "tolerance": tolerance, "max_iterations": max_iterations,
        "loading_threshold": threshold, "alpha": alpha,
        "data_sha256": dataset_digest(data),
        "data_source": data_provenance(data),
        "n_countries": len(data.countries),
        "imputed": [{"country": c, "indicator": k, "value": v} for c, k, v in complete.imputed],
        "dropped_indicators": {k: v for k, v in dropped.items() if v},
        "score_blocks": blocks,
        "converged": bool(full_fit.converged and fit.converged),
        "iterations": fit.iterations,
    }
    return Analysis(spec, reduced, opts, full_fit, full_boot, retained, dropped, fit, boot, rel,
                    verdicts, effects, scores, metadata)
