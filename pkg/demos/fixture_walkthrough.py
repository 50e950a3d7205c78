"""Full analysis on the shipped synthetic fixture: screening, reliability,
hypothesis verdicts, effect sizes and the country ranking.

The fixture is a synthetic stand-in, so numbers differ from the published
ones; the point is to show the pipeline end to end.

Run:  python3 demos/fixture_walkthrough.py [B]
"""

import sys
from importlib import resources

from plspath import default_model, default_registry, load_dataset, run_analysis


def main(B=500):
    registry = default_registry()
    path = resources.files("plspath").joinpath("data/eu27_fixture.csv")
    data = load_dataset(str(path), registry)
    a = run_analysis(data, default_model(), registry, B=B, seed=42)

    print(a.metadata["data_source"], "\n")
    print("dropped indicators:", a.metadata["dropped_indicators"])
    print("\nreliability")
    for name, c in a.reliability.constructs.items():
        if c.n_indicators > 1:
            print(f"  {name:5s} alpha={c.alpha:.3f} cr={c.cr:.3f} ave={c.ave:.3f} {c.verdict}")
    print("\nhypotheses")
    for v in a.verdicts:
        print(f"  {v.id} {v.path:22s} beta={v.beta:+.3f} p={v.p:.3f} {v.verdict}")
    print("\nf^2")
    for e in a.effects.effects:
        print(f"  {e.predictor:14s} -> {e.target}: {e.f_squared:.3f} ({e.classification})")
    print("\nranking")
    for s in a.scores:
        rank = "" if s.rank is None else f"{s.rank:2d}"
        print(f"  {rank:>2s} {s.country:3s} {s.sosdit:.3f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 500)
