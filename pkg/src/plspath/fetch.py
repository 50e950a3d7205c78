"""Download raw indicator payloads into a local cache and assemble them into
a :class:`~plspath.ingest.Dataset`.

Each indicator is stored as ``<cache>/raw/<code>.json``; ``manifest.json``
records where and when every payload came from. Cached payloads are reused
unless ``refresh`` is set, and a file lock serialises concurrent writers.
"""

from __future__ import annotations

import json
import logging
import math
import os
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np
import requests
from filelock import FileLock
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from .countries import EU27, canonical
from .ingest import DataError, Dataset, IndicatorRegistry, default_registry, load_dataset

logger = logging.getLogger(__name__)

EUROSTAT_URL = "https://ec.europa.eu/eurostat/api/dissemination/statistics/1.0/data/{dataset}"
WORLDBANK_URL = "https://api.worldbank.org/v2/country/{countries}/indicator/{indicator}"
CACHE_ENV = "PLSPATH_CACHE"
TIMEOUT = 30


class FetchError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "plspath"


def load_sources(path=None) -> dict:
    if path is None:
        text = resources.files("plspath").joinpath("data/sources.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def make_session() -> requests.Session:
    s = requests.Session()
    retry = Retry(total=3, backoff_factor=0.5, status_forcelist=(429, 500, 502, 503, 504))
    s.mount("https://", HTTPAdapter(max_retries=retry))
    return s


# -- payload decoding -----------------------------------------------------------

def parse_jsonstat(payload: dict) -> dict[str, float]:
    """Latest non-missing value per geo from a JSON-stat 2.0 dataset.

    Every dimension other than ``geo`` and ``time`` must be fixed to a single
    category by the request filters.
    """
    try:
        ids, sizes, dims = payload["id"], payload["size"], payload["dimension"]
        values = payload.get("value", {})
    except (KeyError, TypeError) as exc:
        raise FetchError(f"malformed JSON-stat payload: missing {exc}") from None
    if "geo" not in ids or "time" not in ids:
        raise FetchError("malformed JSON-stat payload: no geo/time dimension")
    for d, n in zip(ids, sizes):
        if d not in ("geo", "time") and n != 1:
            raise FetchError(f"ambiguous JSON-stat payload: dimension {d} has {n} categories; refine the filters")
    strides = np.cumprod([1] + sizes[::-1][:-1])[::-1]
    pos = {d: dict(dims[d]["category"]["index"]) for d in ("geo", "time")}
    gi, ti = ids.index("geo"), ids.index("time")
    if isinstance(values, list):
        values = {str(i): v for i, v in enumerate(values) if v is not None}
    out = {}
    for geo, g in pos["geo"].items():
        for time, t in sorted(pos["time"].items(), key=lambda kv: kv[0], reverse=True):
            v = values.get(str(int(g * strides[gi] + t * strides[ti])))
            if v is not None:
                out[geo] = float(v)
                break
    return out


def parse_worldbank(payload) -> dict[str, float]:
    """Latest non-null value per country from a World Bank v2 JSON response."""
    if not (isinstance(payload, list) and len(payload) == 2 and isinstance(payload[1], list)):
        raise FetchError("malformed World Bank payload")
    out, year = {}, {}
    for rec in payload[1]:
        try:
            code, date, v = rec["country"]["id"], rec["date"], rec["value"]
        except (KeyError, TypeError):
            raise FetchError("malformed World Bank record") from None
        if v is not None and date > year.get(code, ""):
            out[code], year[code] = float(v), date
    return out


def parse_values(payload) -> dict[str, float | None]:
    vals = payload.get("values") if isinstance(payload, dict) else None
    if not isinstance(vals, dict):
        raise FetchError("malformed values payload: expected {'values': {country: number}}")
    return {k: (None if v is None else float(v)) for k, v in vals.items()}


PARSERS = {"eurostat": parse_jsonstat, "worldbank": parse_worldbank, "values": parse_values}


def decode(entry: dict) -> dict[str, float | None]:
    fmt = entry.get("format")
    if fmt not in PARSERS:
        raise FetchError(f"unknown payload format {fmt!r}")
    return PARSERS[fmt](entry.get("payload"))


# -- downloading ------------------------------------------------------------------

def _request(session, source: dict) -> tuple[str, str, object]:
    provider = source.get("provider")
    if provider == "eurostat":
        url = EUROSTAT_URL.format(dataset=source["dataset"])
        params = {"format": "JSON", "lang": "EN", **source.get("params", {})}
    elif provider == "worldbank":
        url = WORLDBANK_URL.format(countries=";".join(EU27), indicator=source["indicator"])
        params = {"format": "json", "per_page": 2000, "mrv": 10}
    else:
        raise FetchError(f"provider {provider!r} has no download client: {source.get('note', '')}".rstrip(": "))
    try:
        r = session.get(url, params=params, timeout=TIMEOUT)
        r.raise_for_status()
        payload = r.json()
    except (requests.RequestException, ValueError) as exc:
        raise FetchError(f"download from {url} failed: {exc}") from exc
    return provider, r.url, payload


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _read_manifest(cache: Path) -> dict:
    p = cache / "manifest.json"
    return json.loads(p.read_text(encoding="utf-8")) if p.exists() else {}


def _write_json(path: Path, obj) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
    tmp.replace(path)


def fixture_payloads(path=None, registry: IndicatorRegistry | None = None) -> dict[str, dict]:
    """Per-indicator ``values`` payloads taken from a dataset CSV (the shipped
    fixture by default)."""
    registry = registry or default_registry()
    if path is None:
        path = resources.files("plspath").joinpath("data/eu27_fixture.csv")
    d = load_dataset(str(path), registry)
    out = {}
    for j, code in enumerate(d.columns):
        vals = {c: (None if d.missing[i, j] else float(d.values[i, j])) for i, c in enumerate(d.countries)}
        out[code] = {"values": vals}
    return out


def fetch_indicators(codes, cache_dir=None, *, registry: IndicatorRegistry | None = None,
                     sources: dict | None = None, offline: bool = False, fixture=None,
                     refresh: bool = False, session: requests.Session | None = None) -> list[Path]:
    """Make sure every code in ``codes`` has a cached payload; return their paths.

    In offline mode payloads are taken from ``fixture`` (a dataset CSV,
    default the shipped fixture) instead of the network.
    """
    registry = registry or default_registry()
    codes = list(codes)
    for c in codes:
        if c not in registry:
            raise DataError(f"indicator {c} not in registry")
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    raw = cache / "raw"
    raw.mkdir(parents=True, exist_ok=True)
    sources = sources if sources is not None else load_sources()
    local = fixture_payloads(fixture, registry) if offline else None
    paths = []
    with FileLock(str(cache / ".lock")):
        manifest = _read_manifest(cache)
        for code in codes:
            target = raw / f"{code}.json"
            if target.exists() and code in manifest and not refresh:
                logger.info("using cached %s", code)
                paths.append(target)
                continue
            if offline:
                if code not in local:
                    raise FetchError(f"offline fixture has no column {code}")
                provider, url, fmt, payload = "fixture", "", "values", local[code]
            else:
                if code not in sources:
                    raise FetchError(f"no download source configured for {code}")
                session = session or make_session()
                provider, url, payload = _request(session, sources[code])
                fmt = provider
            entry = {"code": code, "format": fmt, "payload": payload}
            decode(entry)  # reject malformed payloads before caching
            _write_json(target, entry)
            manifest[code] = {"file": f"raw/{code}.json", "provider": provider, "url": url,
                              "format": fmt, "fetched_at": _now()}
            paths.append(target)
        _write_json(cache / "manifest.json", dict(sorted(manifest.items())))
    return paths


def assemble_dataset(cache_dir=None, registry: IndicatorRegistry | None = None, codes=None) -> Dataset:
    """Build a dataset from cached payloads.

    Columns follow registry order; countries follow first appearance across
    payloads. Eurostat's ``EL`` becomes ``GR`` and geo aggregates (EU27_2020
    and the like) are dropped.
    """
    registry = registry or default_registry()
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    manifest = _read_manifest(cache)
    if codes is None:
        codes = [c for c in registry.codes if c in manifest]
    if not codes:
        raise FetchError(f"no cached indicators in {cache}")
    columns, countries = {}, []
    for code in codes:
        if code not in manifest:
            raise FetchError(f"indicator {code} is not cached; run fetch first")
        entry = json.loads((cache / manifest[code]["file"]).read_text(encoding="utf-8"))
        col = {}
        for geo, v in decode(entry).items():
            c = canonical(geo)
            if manifest[code]["format"] != "values" and c not in EU27:
                continue
            col[c] = v
            if c not in countries:
                countries.append(c)
        columns[code] = col
    values = np.full((len(countries), len(codes)), np.nan)
    for j, code in enumerate(codes):
        for i, c in enumerate(countries):
            v = columns[code].get(c)
            if v is not None and math.isfinite(v):
                values[i, j] = v
    return Dataset(countries, list(codes), values, np.isnan(values))
