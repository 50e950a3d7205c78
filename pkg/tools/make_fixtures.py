"""Regenerate the shipped data fixtures under src/plspath/data/.

eu27_fixture.csv
    Synthetic 27 x 20 cross-section with the indicator layout of the
    registry. Values are drawn from a latent model whose country ordering
    follows the published SOSDIT ranking; they are plausible in range but are
    NOT the Eurostat extraction (that snapshot is not recoverable).
ranking_blocks.csv
    Digital-inclusion and digital-skills block scores per country whose mean
    reproduces the published SOSDIT scores. Published scores are rounded to
    two decimals and their unweighted mean (0.4970) disagrees with the
    published EU average (0.49); every score is therefore shifted by the same
    amount so the mean sits at 0.4935, inside both rounding intervals. The
    split into two blocks is a fixed, arbitrary +/- offset (only the mean is
    published).

Run:  python tools/make_fixtures.py
"""

from pathlib import Path
import csv

import numpy as np

DATA = Path(__file__).resolve().parents[1] / "src" / "plspath" / "data"

PUBLISHED_SCORES = {
    "FI": 0.59, "NL": 0.57, "DK": 0.56, "AT": 0.53, "DE": 0.53, "CY": 0.52,
    "FR": 0.51, "HU": 0.51, "LU": 0.51, "HR": 0.50, "EE": 0.50, "LV": 0.50,
    "MT": 0.50, "ES": 0.50, "SE": 0.50, "CZ": 0.49, "IE": 0.49, "LT": 0.49,
    "BE": 0.48, "IT": 0.48, "SI": 0.48, "PL": 0.47, "SK": 0.47, "GR": 0.46,
    "PT": 0.45, "BG": 0.42, "RO": 0.41,
}
# EU-27 order used by the published ranking
ORDER = ["AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR", "DE", "GR", "HU", "IE",
         "IT", "LV", "LT", "LU", "MT", "NL", "PL", "PT", "RO", "SK", "SI", "ES", "SE"]
TARGET_MEAN = 0.4935

# code: (latent, loading, mean, sd, decimals)
INDICATORS = {
    "Q1-1": ("DI", 0.88, 60.0, 10.0, 0),
    "Q1-2": ("DI", 0.90, 25.0, 8.0, 0),
    "Q1-3": ("DI", 0.94, 89.0, 5.0, 0),
    "Q1-4": ("DI", 0.94, 85.0, 6.0, 0),
    "Q2-1": ("DPS", -0.64, 45.0, 10.0, 0),
    "Q2-2": ("DPS", 0.75, 40.0, 12.0, 0),
    "Q2-3": ("DPS", 0.18, 30.0, 8.0, 0),
    "Q2-4": ("DPS", -0.41, 35.0, 8.0, 0),
    "Q2-5": ("DPS", 0.64, 10.0, 4.0, 0),
    "Q2-6": ("DPS", -0.45, 3.0, 1.5, 1),
    "Q3-1": ("DS", 0.84, 55.0, 10.0, 0),
    "Q3-2": ("DS", 0.96, 80.0, 8.0, 0),
    "Q3-3": ("DS", 0.91, 65.0, 12.0, 0),
    "Q3-4": ("DS", 0.57, 10.0, 5.0, 0),
    "Q3-5": ("DS", 0.64, 50.0, 12.0, 0),
    "Q3-6": ("DS", 0.23, 8.0, 4.0, 0),
    "Q3-8": ("DS", 0.80, 22.0, 8.0, 0),
}
MISSING = {("MT", "Q3-7"), ("CY", "Q2-6")}


def zscore(v):
    return (v - v.mean()) / v.std(ddof=1)


def main(seed=20230131):
    rng = np.random.default_rng(seed)
    n = len(ORDER)
    u = zscore(np.array([PUBLISHED_SCORES[c] for c in ORDER]))
    lat = {
        "DI": zscore(0.95 * u + 0.3 * rng.standard_normal(n)),
        "DS": zscore(0.9 * u + 0.4 * rng.standard_normal(n)),
        "DPS": zscore(0.4 * u + 0.9 * rng.standard_normal(n)),
    }
    sos = zscore(lat["DI"] + lat["DS"])
    gini = zscore(-0.35 * sos + 0.9 * rng.standard_normal(n))
    sdgi = zscore(0.64 * sos - 0.3 * gini + 0.6 * rng.standard_normal(n))

    cols = {}
    for code, (latent, lam, mean, sd, dec) in INDICATORS.items():
        x = lam * lat[latent] + np.sqrt(1 - lam**2) * rng.standard_normal(n)
        cols[code] = np.round(np.clip(mean + sd * x, 0.5, 99.5), dec)
    x = 0.9 * lat["DS"] + np.sqrt(1 - 0.81) * rng.standard_normal(n)
    cols["Q3-7"] = np.round(np.exp(5.0 + 0.8 * x), 1)  # thousands of persons
    cols["GINI"] = np.round(30.0 + 3.5 * gini, 1)
    cols["SDGI"] = np.round(72.0 + 4.0 * sdgi, 1)
    codes = [f"Q1-{k}" for k in range(1, 5)] + [f"Q2-{k}" for k in range(1, 7)] \
        + [f"Q3-{k}" for k in range(1, 9)] + ["GINI", "SDGI"]

    with open(DATA / "eu27_fixture.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country"] + codes)
        for i, c in enumerate(ORDER):
            w.writerow([c] + [":" if (c, k) in MISSING else repr(float(cols[k][i])) for k in codes])

    shift = TARGET_MEAN - np.mean(list(PUBLISHED_SCORES.values()))
    with open(DATA / "ranking_blocks.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "di_score", "ds_score"])
        for i, c in enumerate(ORDER):
            s = round(PUBLISHED_SCORES[c] + shift, 6)
            d = (0.01, 0.03, -0.02, 0.04)[i % 4]
            w.writerow([c, f"{s + d:.6f}", f"{s - d:.6f}"])


if __name__ == "__main__":
    main()
