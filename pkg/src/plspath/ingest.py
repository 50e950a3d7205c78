"""Loading, cleaning and transforming country x indicator data.

The on-disk layout is a UTF-8 CSV whose first column is headed ``country``
and whose remaining headers are indicator codes from an
:class:`IndicatorRegistry`. Missing cells are either empty or the Eurostat
token ``:``. An optional ``name`` column right after ``country`` carries
display names and is not treated as an indicator.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import pandas as pd

from .countries import canonical

logger = logging.getLogger(__name__)

UNITS = ("percentage", "index", "count")
MISSING_TOKENS = ("", ":")


class DataError(ValueError):
    """Raised for malformed or unusable input data."""


@dataclass(frozen=True)
class IndicatorDef:
    code: str
    construct: str
    description: str
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise DataError(f"indicator {self.code}: unit must be one of {UNITS}, got {self.unit!r}")


@dataclass(frozen=True)
class IndicatorRegistry:
    entries: tuple[IndicatorDef, ...]

    def __post_init__(self):
        codes = [e.code for e in self.entries]
        dupes = sorted({c for c in codes if codes.count(c) > 1})
        if dupes:
            raise DataError(f"duplicate registry codes: {dupes}")

    def __contains__(self, code):
        return any(e.code == code for e in self.entries)

    def __getitem__(self, code) -> IndicatorDef:
        for e in self.entries:
            if e.code == code:
                return e
        raise KeyError(f"{code!r} not in registry")

    def __len__(self):
        return len(self.entries)

    @property
    def codes(self) -> list[str]:
        return [e.code for e in self.entries]

    def by_construct(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for e in self.entries:
            out.setdefault(e.construct, []).append(e.code)
        return out

    def to_json(self) -> str:
        rows = [
            {"code": e.code, "construct": e.construct, "description": e.description, "unit": e.unit}
            for e in self.entries
        ]
        return json.dumps(rows, indent=2)


def load_registry(path=None) -> IndicatorRegistry:
    """Read a registry JSON file; with no path, the shipped default is used."""
    if path is None:
        text = resources.files("plspath").joinpath("data/registry.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"registry is not valid JSON: {exc}") from exc
    if not isinstance(rows, list):
        raise DataError("registry must be a JSON list")
    entries = []
    for row in rows:
        unknown = set(row) - {"code", "construct", "description", "unit"}
        if unknown:
            raise DataError(f"unknown registry field(s): {sorted(unknown)}")
        entries.append(
            IndicatorDef(row["code"], row["construct"], row.get("description", ""), row["unit"])
        )
    return IndicatorRegistry(tuple(entries))


def default_registry() -> IndicatorRegistry:
    return load_registry(None)


@dataclass
class Dataset:
    """Cross-section of ``countries`` x ``columns``; missing cells hold NaN."""

    countries: list[str]
    columns: list[str]
    values: np.ndarray
    missing: np.ndarray
    names: dict[str, str] = field(default_factory=dict)
    imputed: list[tuple[str, str, float]] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.missing = np.asarray(self.missing, dtype=bool)
        n, p = len(self.countries), len(self.columns)
        if self.values.shape != (n, p) or self.missing.shape != (n, p):
            raise DataError(
                f"values {self.values.shape} / mask {self.missing.shape} "
                f"inconsistent with {n} countries x {p} columns"
            )
        if len(set(self.countries)) != n:
            raise DataError("duplicate country")
        if len(set(self.columns)) != p:
            raise DataError("duplicate indicator column")

    @property
    def shape(self):
        return self.values.shape

    def column(self, code) -> np.ndarray:
        return self.values[:, self.columns.index(code)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, index=pd.Index(self.countries, name="country"),
                            columns=list(self.columns))

    def subset(self, columns) -> "Dataset":
        idx = [self.columns.index(c) for c in columns]
        return Dataset(list(self.countries), list(columns), self.values[:, idx].copy(),
                       self.missing[:, idx].copy(), dict(self.names))

    def take_rows(self, rows) -> "Dataset":
        """Row subset by integer position; repeated rows get ``#k`` suffixes."""
        seen: dict[str, int] = {}
        labels = []
        for r in rows:
            c = self.countries[r]
            k = seen.get(c, 0)
            seen[c] = k + 1
            labels.append(c if k == 0 else f"{c}#{k}")
        rows = np.asarray(rows)
        return Dataset(labels, list(self.columns), self.values[rows].copy(), self.missing[rows].copy())

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.countries == other.countries
            and self.columns == other.columns
            and np.array_equal(self.missing, other.missing)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


@dataclass
class StandardizedMatrix:
    """Column z-scores (sample sd) with the originating column codes."""

    values: np.ndarray
    countries: list[str]
    columns: list[str]
    means: np.ndarray
    sds: np.ndarray

    @property
    def n(self):
        return self.values.shape[0]

    def column_index(self, code) -> int:
        return self.columns.index(code)

    def block(self, codes) -> np.ndarray:
        return self.values[:, [self.columns.index(c) for c in codes]]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, index=self.countries, columns=self.columns)


def _parse_cell(text, row, code):
    text = text.strip()
    if text in MISSING_TOKENS:
        return np.nan, True
    try:
        return float(text), False
    except ValueError:
        raise DataError(f"non-numeric cell {text!r} for {row}/{code}") from None


def load_dataset(path, registry: IndicatorRegistry | None = None) -> Dataset:
    """Read a country x indicator CSV into a :class:`Dataset`.

    Every header after ``country`` (and the optional ``name``) must be a
    registry code when a registry is given.
    """
    text = Path(path).read_text(encoding="utf-8-sig")
    return parse_dataset(text, registry)


def parse_dataset(text: str, registry: IndicatorRegistry | None = None) -> Dataset:
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise DataError("no rows")
    header = [h.strip() for h in rows[0]]
    if header[0].lower() != "country":
        raise DataError(f"first column must be headed 'country', got {header[0]!r}")
    has_names = len(header) > 1 and header[1].lower() == "name"
    start = 2 if has_names else 1
    codes = header[start:]
    if not codes:
        raise DataError("no indicator columns")
    if registry is not None:
        unknown = [c for c in codes if c not in registry]
        if unknown:
            raise DataError(f"unknown indicator code(s): {unknown}")
    if len(set(codes)) != len(codes):
        raise DataError("duplicate indicator column")

    countries, names = [], {}
    values = np.empty((len(rows) - 1, len(codes)))
    missing = np.zeros_like(values, dtype=bool)
    for i, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DataError(f"row {i + 2} has {len(row)} fields, expected {len(header)}")
        raw_id = row[0].strip()
        cid = canonical(raw_id)
        if cid in countries:
            raise DataError(f"duplicate country {raw_id!r}")
        countries.append(cid)
        if has_names and row[1].strip():
            names[cid] = row[1].strip()
        for j, code in enumerate(codes):
            values[i, j], missing[i, j] = _parse_cell(row[start + j], raw_id, code)
    return Dataset(countries, list(codes), values, missing, names)


def write_dataset(d: Dataset, path) -> None:
    """Write ``d`` so that :func:`load_dataset` reproduces it exactly."""
    with_names = bool(d.names)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country"] + (["name"] if with_names else []) + list(d.columns))
        for i, c in enumerate(d.countries):
            cells = ["" if d.missing[i, j] else repr(float(d.values[i, j])) for j in range(len(d.columns))]
            w.writerow([c] + ([d.names.get(c, "")] if with_names else []) + cells)


def impute_missing(d: Dataset) -> Dataset:
    """Replace each missing cell by the mean of its column's observed cells."""
    values = d.values.copy()
    log = []
    for j, code in enumerate(d.columns):
        miss = d.missing[:, j]
        if not miss.any():
            continue
        if miss.all():
            raise DataError(f"column {code} is entirely missing")
        mean = values[~miss, j].mean()
        for i in np.flatnonzero(miss):
            values[i, j] = mean
            log.append((d.countries[i], code, float(mean)))
            logger.info("imputed %s/%s with column mean %.6g", d.countries[i], code, mean)
    out = Dataset(list(d.countries), list(d.columns), values, np.zeros_like(d.missing), dict(d.names))
    out.imputed = list(d.imputed) + log
    return out


def standardize_array(values: np.ndarray, columns=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (z, mean, sd) using the n-1 standard deviation."""
    values = np.asarray(values, dtype=float)
    if np.isnan(values).any():
        raise DataError("cannot standardize with missing cells; impute first")
    mean = values.mean(axis=0)
    centered = values - mean
    sd = np.sqrt((centered**2).sum(axis=0) / (values.shape[0] - 1))
    # relative check: a "constant" column may carry rounding noise after centering
    scale = np.maximum(np.abs(mean), 1.0)
    flat = sd <= 1e-12 * scale
    if flat.any():
        bad = [columns[k] for k in np.flatnonzero(flat)] if columns is not None else list(np.flatnonzero(flat))
        raise DataError(f"zero variance in column(s) {bad}")
    return centered / sd, mean, sd


def standardize(d: Dataset | StandardizedMatrix) -> StandardizedMatrix:
    """Column z-scores with sample (n-1) standard deviation."""
    if d.values.shape[0] < 2:
        raise DataError("need at least two rows to standardize")
    if isinstance(d, Dataset) and d.missing.any():
        raise DataError("cannot standardize with missing cells; impute first")
    z, mean, sd = standardize_array(d.values, d.columns)
    return StandardizedMatrix(z, list(d.countries), list(d.columns), mean, sd)


def normalize_shares(d: Dataset, registry: IndicatorRegistry) -> pd.DataFrame:
    """Map every column onto [0, 1].

    Percentage columns are divided by 100; count and index columns are
    min-max scaled over the countries present.
    """
    if d.missing.any():
        raise DataError("cannot normalize with missing cells; impute first")
    out = np.empty_like(d.values)
    for j, code in enumerate(d.columns):
        col = d.values[:, j]
        if registry[code].unit == "percentage":
            if (col < 0).any() or (col > 100).any():
                raise DataError(f"percentage column {code} has values outside [0, 100]")
            out[:, j] = col / 100.0
        else:
            lo, hi = col.min(), col.max()
            if hi == lo:
                raise DataError(f"cannot min-max scale constant column {code}")
            out[:, j] = (col - lo) / (hi - lo)
    return pd.DataFrame(out, index=pd.Index(d.countries, name="country"), columns=list(d.columns))
