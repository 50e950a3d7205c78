"""Published measurement and structural tables, packaged as report objects
so the downstream logic (retention rules, verdicts, report layout) can be
exercised on them directly."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .bootstrap import BootstrapReport, ParameterEstimate
from .diagnostics import ReliabilityReport, make_entry


@lru_cache(maxsize=1)
def _tables() -> str:
    return resources.files("plspath").joinpath("data/published_tables.json").read_text(encoding="utf-8")


def tables() -> dict:
    return json.loads(_tables())


def bootstrap_report() -> BootstrapReport:
    """Published loadings and structural paths as a bootstrap report.

    Replicate count and seed were never published; both are recorded as 0.
    """
    t = tables()
    params = [
        ParameterEstimate("loading", r["construct"], r["indicator"], r["loading"], r["sample_mean"],
                          r["sd"], r["t"], r["p"])
        for r in t["measurement"]
    ]
    params += [
        ParameterEstimate("path", r["from"], r["to"], r["beta"], r["beta"], r["sd"], r["t"], r["p"])
        for r in t["structural"]
    ]
    return BootstrapReport(params, B=0, seed=0, effective_B=0)


def reliability_report() -> ReliabilityReport:
    t = tables()
    return ReliabilityReport({
        r["construct"]: make_entry(r["alpha"], r["cr"], r["ave"], n_indicators=2) for r in t["reliability"]
    })
