"""Command line front end: ``run``, ``study`` and ``compare``.

Exit codes: 0 success, 2 configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .aero import SurrogateEvaluator, model_catalog
from .config import ConfigError, load_config, worker_count
from .geometry import DegenerateGeometryError
from .harness import (
    compare_designs,
    format_table,
    load_design,
    parameter_space_study,
    read_summary,
    run_campaign,
    study_context,
    write_comparison,
)
from .optimizers import NumericalAbort

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustfoil",
        description="Stochastic-gradient robust airfoil design on an aerodynamic surrogate.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one optimization campaign")
    p.add_argument("--config", type=Path, help="JSON configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=str)
    p.add_argument("--mode", choices=("dsp", "average", "robust"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--iters", type=int)

    p = sub.add_parser("study", help="parameter-space study over saved designs")
    p.add_argument("designs", nargs="+", type=Path, help="design.json files")
    p.add_argument("--config", type=Path, help="JSON configuration (study_samples, study_seed, surrogate)")
    p.add_argument("--seed", type=int, help="study seed")
    p.add_argument("--m", type=int, help="number of common samples")
    p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("compare", help="assemble a comparison table from study summaries")
    p.add_argument("summaries", nargs="+", type=Path, help="summary.csv files")
    p.add_argument("--reference", default=None, help="label of the reference row (default: dsp)")
    p.add_argument("--out", type=str, default=None)
    return parser


def _run(args) -> int:
    cfg = load_config(
        args.config, seed=args.seed, out=args.out, mode=args.mode,
        lam=args.lam, n=args.n, eta=args.eta, iterations=args.iters,
    )
    campaign = run_campaign(cfg, workers=worker_count())
    print(f"wrote {campaign.out_dir} ({len(campaign.result.records)} iterations, "
          f"{campaign.result.n_evaluations} evaluations)")
    return EXIT_OK


def _study(args) -> int:
    cfg = load_config(args.config, study_seed=args.seed, study_samples=args.m)
    loaded = [load_design(p) for p in args.designs]
    settings = {repr(meta.get("geometry")) for _, meta in loaded}
    if len(settings) > 1:
        raise ConfigError("designs were built on different geometry settings")
    ctx = study_context(loaded[0][1])
    evaluator = SurrogateEvaluator(
        ctx, model_catalog(cfg.lift_slope_factors, cfg.lift_drag_factors), workers=worker_count()
    )
    out = args.out or cfg.out
    results = parameter_space_study(
        [d for d, _ in loaded],
        cfg.study_seed,
        cfg.study_samples,
        evaluator=evaluator,
        labels=[meta.get("label", p.stem) for (_, meta), p in zip(loaded, args.designs)],
        out_dir=out,
        re_bounds=(cfg.re_min, cfg.re_max),
        log_uniform_re=cfg.log_uniform_re,
    )
    if len(results) >= 2:
        print(format_table(compare_designs(results)))
    print(f"wrote {Path(out) / 'study.csv'} and {Path(out) / 'summary.csv'}")
    return EXIT_OK


def _compare(args) -> int:
    results = [r for path in args.summaries for r in read_summary(path)]
    table = compare_designs(results, args.reference)
    print(format_table(table))
    if args.out:
        print(f"wrote {write_comparison(table, args.out)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _run, "study": _study, "compare": _compare}[args.command]
    try:
        return handler(args)
    except (NumericalAbort, FloatingPointError, DegenerateGeometryError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, OSError, KeyError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
