"""``plspath`` command line.

Exit codes: 0 success, 1 usage error, 2 data/model/IO error, 3 the PLS
algorithm did not converge (outputs are still written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .bootstrap import bootstrap
from .engine import SCHEMES, FitOptions, estimate
from .fetch import FetchError, assemble_dataset, fetch_indicators
from .index import load_block_scores, scores_table, sosdit_scores
from .ingest import DataError, impute_missing, load_dataset, load_registry, standardize
from .modelspec import ModelError, load_model, validate_model
from .pipeline import run_analysis
from .report import FORMATS, ReportError, RunReport, build_report, dumps, emit_report, render_chart, table_csv
from .simulate import InfeasibleSpec, SimSpec, recovery_report, reference_spec

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONVERGED = 0, 1, 2, 3
logger = logging.getLogger("plspath")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fixture_path() -> str:
    return str(resources.files("plspath").joinpath("data/eu27_fixture.csv"))


def _inputs(args):
    registry = load_registry(args.registry)
    if args.data is None:
        logger.warning("no --data given; using the shipped synthetic fixture")
    data = load_dataset(args.data or _fixture_path(), registry)
    spec = load_model(args.model)
    return registry, data, spec


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


def _options(args) -> FitOptions:
    return FitOptions(scheme=args.scheme, tolerance=args.tolerance, max_iterations=args.max_iter)


def _matrix(data, spec):
    problems = validate_model(spec, data)
    if problems:
        raise ModelError("; ".join(problems))
    return standardize(impute_missing(data))


def cmd_fetch(args) -> int:
    registry = load_registry(args.registry)
    codes = args.codes or registry.codes
    paths = fetch_indicators(codes, args.cache, registry=registry, offline=args.offline,
                             fixture=args.fixture, refresh=args.refresh)
    for p in paths:
        print(p)
    if args.assemble:
        from .ingest import write_dataset
        write_dataset(assemble_dataset(args.cache, registry, codes), args.assemble)
    return EXIT_OK


def cmd_fit(args) -> int:
    _, data, spec = _inputs(args)
    res = estimate(_matrix(data, spec), spec, _options(args))
    out = {
        "converged": res.converged, "iterations": res.iterations, "final_delta": res.final_delta,
        "outer_weights": {c: {k: float(v) for k, v in s.items()} for c, s in res.outer_weights.items()},
        "loadings": {c: {k: float(v) for k, v in s.items()} for c, s in res.loadings.items()},
        "paths": [{"source": a, "target": b, "beta": v} for (a, b), v in res.path_coefficients.items()],
        "r_squared": dict(res.r_squared),
    }
    _write(dumps(out) + "\n", args.out)
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_bootstrap(args) -> int:
    _, data, spec = _inputs(args)
    x = _matrix(data, spec)
    opts = _options(args)
    original = estimate(x, spec, opts)
    rep = bootstrap(x, spec, opts, B=args.replicates, seed=args.seed, workers=args.workers, original=original)
    _write(dumps(rep.to_dict()) + "\n", args.out)
    return EXIT_OK if original.converged else EXIT_NONCONVERGED


def _analysis(args):
    registry, data, spec = _inputs(args)
    return run_analysis(data, spec, registry, B=args.replicates, seed=args.seed, scheme=args.scheme,
                        tolerance=args.tolerance, max_iterations=args.max_iter, workers=args.workers)


def cmd_score(args) -> int:
    code = EXIT_OK
    if args.blocks is not None:
        scores = sosdit_scores(load_block_scores(None if args.blocks == "fixture" else args.blocks))
    else:
        a = _analysis(args)
        scores = a.scores
        code = EXIT_OK if a.converged else EXIT_NONCONVERGED
    rows = scores_table(scores)
    _write(table_csv(rows, list(rows[0]) if rows else ["country", "sosdit", "rank"]), args.out)
    if args.chart:
        render_chart(scores, args.chart)
    return code


def cmd_simulate(args) -> int:
    spec = SimSpec.load(args.spec) if args.spec else reference_spec()
    spec = SimSpec(spec.loadings, spec.paths, spec.exogenous_corr,
                   n=args.n if args.n is not None else spec.n,
                   seed=args.seed if args.seed is not None else spec.seed)
    df = recovery_report(spec, args.reps, workers=args.workers)
    _write(df.to_csv(index=False, float_format="%.17g", lineterminator="\n"), args.out)
    if df.attrs.get("failed"):
        print(f"{df.attrs['failed']} of {args.reps} replications did not converge", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    a = _analysis(args)
    report = build_report(a)
    emit_report(report, args.out, args.format)
    try:
        render_chart(a.scores, Path(args.out) / "ranking.svg")
    except OSError as exc:
        raise ReportError(f"cannot write chart: {exc}") from exc
    print(f"report written to {args.out}")
    if not a.converged:
        print("warning: the PLS algorithm did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plspath", description="PLS path modelling of national digital-transformation indicators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(sp):
        sp.add_argument("--data", help="dataset CSV (default: shipped synthetic fixture)")
        sp.add_argument("--model", help="model JSON (default: shipped model)")
        sp.add_argument("--registry", help="indicator registry JSON (default: shipped registry)")
        sp.add_argument("--scheme", choices=SCHEMES, default="path")
        sp.add_argument("--tolerance", type=float, default=1e-7)
        sp.add_argument("--max-iter", type=int, default=300)

    def boot_args(sp):
        sp.add_argument("--replicates", "-B", type=int, default=5000)
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("fetch", help="download indicator payloads into the cache")
    sp.add_argument("codes", nargs="*", help="indicator codes (default: whole registry)")
    sp.add_argument("--cache", help="cache directory (default: $PLSPATH_CACHE or ~/.cache/plspath)")
    sp.add_argument("--registry")
    sp.add_argument("--offline", action="store_true", help="fill the cache from a local dataset CSV")
    sp.add_argument("--fixture", help="dataset CSV used by --offline (default: shipped fixture)")
    sp.add_argument("--refresh", action="store_true", help="re-download cached indicators")
    sp.add_argument("--assemble", metavar="CSV", help="also write the assembled dataset here")
    sp.set_defaults(func=cmd_fetch)

    sp = sub.add_parser("fit", help="estimate the model once")
    data_args(sp)
    sp.add_argument("--out", help="output JSON (default: stdout)")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("bootstrap", help="bootstrap loadings and paths")
    data_args(sp)
    boot_args(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bootstrap)

    sp = sub.add_parser("score", help="composite score and country ranking")
    data_args(sp)
    boot_args(sp)
    sp.add_argument("--blocks", help="block-score CSV to rank directly ('fixture' for the shipped one)")
    sp.add_argument("--chart", help="also write an SVG chart")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("simulate", help="Monte Carlo parameter recovery")
    sp.add_argument("--spec", help="simulation spec JSON (default: built-in reference design)")
    sp.add_argument("--reps", type=int, default=50)
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="recovery CSV (default: stdout)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("report", help="full analysis with tables, JSON and chart")
    data_args(sp)
    boot_args(sp)
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--format", choices=FORMATS, default="all")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DataError, ModelError, FetchError, InfeasibleSpec, ReportError, OSError) as exc:
        print(f"plspath: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"plspath: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
