"""Hypothesis verdicts and reliability arithmetic from the published
estimates, without any data.

Shows that the adjudication rule (significant, correctly signed, and both
constructs reliable) reproduces the published Confirmed / Not Confirmed
column, and how a significant path can still be rejected on reliability.

Run:  python3 demos/published_verdicts.py
"""

from plspath import ave, composite_reliability, default_model, hypothesis_verdicts, published

tables = published.tables()
for name in ("DI", "DPS", "DS"):
    lam = [r["loading"] for r in tables["measurement"] if r["construct"] == name]
    print(f"{name:4s} n={len(lam)} AVE={ave(lam):.3f} rho_c={composite_reliability(lam):.3f}")

print()
rel = published.reliability_report()
for v in hypothesis_verdicts(published.bootstrap_report(), rel, default_model()):
    print(f"{v.id} {v.path:22s} beta={v.beta:+.3f} p={v.p:.3f} {v.verdict:14s} {v.reason}")
