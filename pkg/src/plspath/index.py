"""Composite SOSDIT score and country ranking."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
import io

import numpy as np
import pandas as pd

from .countries import display_name
from .modelspec import ModelSpec

EU_AVERAGE = "EU"


@dataclass
class CountryScore:
    country: str
    block_scores: dict[str, float]
    sosdit: float
    rank: int | None  # None for the EU-average pseudo-row

    @property
    def name(self) -> str:
        return "EU Average" if self.country == EU_AVERAGE else display_name(self.country)


def block_scores(norm: pd.DataFrame, spec: ModelSpec, retained: dict[str, list[str]]) -> pd.DataFrame:
    """Per-country mean of each construct's retained normalized indicators.

    Only constructs named in ``retained`` are scored, in that order.
    """
    out = {}
    for construct, codes in retained.items():
        spec.construct(construct)  # KeyError for unknown constructs
        if not codes:
            raise ValueError(f"construct {construct} has no retained indicators")
        out[construct] = norm[list(codes)].mean(axis=1)
    return pd.DataFrame(out, index=norm.index)


def dense_rank(values, decimals=12) -> list[int]:
    """1-based dense rank, descending. Values equal after rounding to
    ``decimals`` places tie."""
    keyed = np.round(np.asarray(values, dtype=float), decimals)
    distinct = sorted(set(keyed.tolist()), reverse=True)
    pos = {v: i + 1 for i, v in enumerate(distinct)}
    return [pos[v] for v in keyed.tolist()]


def sosdit_scores(blocks: pd.DataFrame) -> list[CountryScore]:
    """Unweighted mean of the block scores, ranked; an EU-average row
    (mean over countries, no rank) is appended last."""
    if blocks.empty:
        return []
    s = blocks.mean(axis=1)
    ranks = dense_rank(s.to_numpy())
    order = sorted(range(len(s)), key=lambda i: (ranks[i], str(blocks.index[i])))
    out = [
        CountryScore(str(blocks.index[i]), {c: float(blocks.iloc[i][c]) for c in blocks.columns},
                     float(s.iloc[i]), ranks[i])
        for i in order
    ]
    means = blocks.mean(axis=0)
    out.append(CountryScore(EU_AVERAGE, {c: float(means[c]) for c in blocks.columns}, float(s.mean()), None))
    return out


def score_columns(constructs) -> list[str]:
    return ["country"] + [f"{c.lower()}_score" for c in constructs] + ["sosdit", "rank"]


def scores_table(scores: list[CountryScore]) -> list[dict]:
    rows = []
    for cs in scores:
        row = {"country": cs.country}
        row.update({f"{c.lower()}_score": v for c, v in cs.block_scores.items()})
        row["sosdit"] = cs.sosdit
        row["rank"] = cs.rank
        rows.append(row)
    return rows


def load_block_scores(path=None) -> pd.DataFrame:
    """Read ``country, <construct>_score, ...`` into a block-score frame.

    With no path, the shipped fixture derived from the published ranking.
    """
    if path is None:
        text = resources.files("plspath").joinpath("data/ranking_blocks.csv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    df = pd.read_csv(io.StringIO(text), dtype={"country": str}).set_index("country")
    df.columns = [c[: -len("_score")].upper() if c.endswith("_score") else c for c in df.columns]
    return df
