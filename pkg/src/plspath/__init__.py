"""PLS path modelling (Mode A, two-stage higher-order constructs, moderation)
with bootstrap inference, reliability diagnostics and a composite country
ranking."""

__version__ = "0.1.0"

from .bootstrap import BootstrapReport, ParameterEstimate, bootstrap, t_and_p
from .diagnostics import (ReliabilityReport, assess_constructs, ave, composite_reliability,
                          cronbach_alpha, effect_sizes, f_square, filter_indicators, reliability_report,
                          rho_a)
from .engine import FitOptions, FitResult, SingularError, estimate, fit, two_stage_fit
from .fetch import FetchError, assemble_dataset, fetch_indicators
from .index import CountryScore, block_scores, sosdit_scores
from .ingest import (DataError, Dataset, IndicatorRegistry, default_registry, impute_missing,
                     load_dataset, load_registry, normalize_shares, standardize)
from .modelspec import ModelError, ModelSpec, default_model, load_model, parse_model, validate_model
from .pipeline import Analysis, run_analysis
from .report import RunReport, build_report, emit_report, render_chart
from .simulate import SimSpec, recovery_report, reference_spec, simulate
from .verdicts import Verdict, hypothesis_verdicts

__all__ = [
    "Analysis", "BootstrapReport", "CountryScore", "DataError", "Dataset", "FetchError", "FitOptions",
    "FitResult", "IndicatorRegistry", "ModelError", "ModelSpec", "ParameterEstimate", "ReliabilityReport",
    "RunReport", "SimSpec", "SingularError", "Verdict", "assemble_dataset", "assess_constructs", "ave",
    "block_scores", "bootstrap", "build_report", "composite_reliability", "cronbach_alpha",
    "default_model", "default_registry", "effect_sizes", "emit_report", "estimate", "f_square",
    "fetch_indicators", "filter_indicators", "fit", "hypothesis_verdicts", "impute_missing",
    "load_dataset", "load_model", "load_registry", "normalize_shares", "parse_model", "recovery_report",
    "reference_spec", "reliability_report", "render_chart", "rho_a", "run_analysis", "simulate",
    "sosdit_scores", "standardize", "t_and_p", "two_stage_fit", "validate_model",
]
