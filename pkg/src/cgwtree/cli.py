"""Command-line surface: sample, enumerate, transform, limit, converge, check.

Exit codes: 0 success, 1 runtime error, 2 usage error.  Every run with a
fixed --seed is reproducible bit for bit, independent of --workers.  The
report subcommands (limit, converge, check) render a PNG figure next to
their delimited output unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import mcstats
from .lamperti import StepFunction, harmonic_integral, height_transform, time_change
from .mcstats import ExperimentSpec, RunResult, replicate_stream
from .offspring import OffspringLaw, law_from_name
from .paths import sample_conditioned_increments_batch
from .stats import (height_tail_ladder, ks_distance, ks_threshold,
                    local_limit_check)
from .trees import enumerate_trees

OUTDIR_ENV = "CGWTREE_OUTDIR"
LAW_CHOICES = ("geometric", "poisson", "binary", "zeta", "table")


def _resolve_out(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTDIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _law_args(parser, allow_bessel=False):
    choices = LAW_CHOICES + (("bessel",) if allow_bessel else ())
    parser.add_argument("--law", required=True, choices=choices)
    parser.add_argument("--alpha", type=float, default=None,
                        help="tail index for --law zeta")
    parser.add_argument("--pmf", type=str, default=None,
                        help="comma-separated probabilities for --law table")


def _build_law(args) -> OffspringLaw:
    pmf = [float(x) for x in args.pmf.split(",")] if args.pmf else None
    return law_from_name(args.law, args.alpha, pmf)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


# -- subcommands --------------------------------------------------------------


def _cmd_sample(args) -> int:
    law = _build_law(args)
    out = _resolve_out(args.out)
    rows = []
    for i in range(args.count):
        rng = replicate_stream(args.seed, i)
        xi = sample_conditioned_increments_batch(law, args.n, 1, args.strategy, rng)[0]
        from .paths import rotate_offspring_array

        rows.append(rotate_offspring_array(xi).tolist())
    if args.format == "jsonl":
        text = "\n".join(json.dumps(r) for r in rows)
    else:
        lines = [f"# cgwtree v{mcstats.VERSION} schema=1 field=offspring-sequence",
                 "replicate,xi"]
        lines += [f"{i},{' '.join(map(str, r))}" for i, r in enumerate(rows)]
        text = "\n".join(lines)
    _emit(text, out)
    return 0


def _cmd_enumerate(args) -> int:
    law = _build_law(args)
    out = _resolve_out(args.out)
    pairs = enumerate_trees(law, args.n)
    if args.format == "jsonl":
        text = "\n".join(json.dumps({"xi": list(t.xi), "probability": p})
                         for t, p in pairs)
    else:
        lines = [f"# cgwtree v{mcstats.VERSION} schema=1 field=tree-probability",
                 "xi,probability"]
        lines += [f"{' '.join(map(str, t.xi))},{p!r}" for t, p in pairs]
        text = "\n".join(lines)
    _emit(text, out)
    return 0


def _cmd_transform(args) -> int:
    with open(args.input) as fh:
        f = StepFunction.from_json(json.load(fh))
    out = _resolve_out(args.out)
    if args.op == "psi":
        result = height_transform(f).to_json()
    elif args.op == "phi":
        result = time_change(f).to_json()
    else:
        s = f.domain_end if args.s is None else args.s
        value = harmonic_integral(f, s)
        result = {"value": None if math.isinf(value) else value, "s": s}
    _emit(json.dumps(result, indent=2), out)
    return 0


def _experiment_from_args(args) -> ExperimentSpec:
    if args.law == "bessel":
        return ExperimentSpec(statistic=args.statistic, n=args.mesh,
                              count=args.samples, seed=args.seed,
                              source="bessel", u=args.u, workers=args.workers)
    return ExperimentSpec(statistic=args.statistic, n=args.mesh,
                          count=args.samples, seed=args.seed, law=_build_law(args),
                          strategy=args.strategy, u=args.u, workers=args.workers)


def _write_run_outputs(result: RunResult, out: Path | None, plot: bool, title: str):
    if out is None:
        values = result.values
        print(f"{title}: count={len(values)} mean={values.mean():.6g} "
              f"min={values.min():.6g} max={values.max():.6g}")
        return
    mcstats.write_csv(out, result)
    mcstats.write_metadata(out.with_suffix(out.suffix + ".meta.json"), result)
    if plot:
        from . import figures

        figures.histogram(result.values, title, result.spec.statistic,
                          out.with_suffix(".png"))


def _cmd_limit(args) -> int:
    spec = _experiment_from_args(args)
    result = mcstats.run(spec, workers=args.workers)
    label = args.law if args.law == "bessel" else f"{args.law} lattice"
    _write_run_outputs(result, _resolve_out(args.out), not args.no_plot,
                       f"{label} mesh={args.mesh} {args.statistic}")
    return 0


def _cmd_converge(args) -> int:
    with open(args.spec_a) as fh:
        spec_a = ExperimentSpec.from_json(json.load(fh))
    with open(args.spec_b) as fh:
        spec_b = ExperimentSpec.from_json(json.load(fh))
    res_a = mcstats.run(spec_a, workers=args.workers)
    res_b = mcstats.run(spec_b, workers=args.workers)
    stat = ks_distance(res_a.sample, res_b.sample)
    threshold = ks_threshold(spec_a.count, spec_b.count, args.level)
    passed = bool(stat < threshold)
    report = {
        "check": "converge",
        "statistic": stat,
        "threshold": threshold,
        "level": args.level,
        "pass": passed,
        "spec_a": res_a.metadata(),
        "spec_b": res_b.metadata(),
    }
    out = _resolve_out(args.out)
    _emit(json.dumps(report, indent=2, sort_keys=True), out)
    if out is not None and not args.no_plot:
        from . import figures

        figures.ecdf_comparison(res_a.values, res_b.values,
                                (Path(args.spec_a).stem, Path(args.spec_b).stem),
                                stat, threshold, out.with_suffix(".png"))
    print("PASS" if passed else "FAIL",
          f"ks={stat:.5f} threshold={threshold:.5f}")
    return 0


def _cmd_check(args) -> int:
    law = _build_law(args)
    out = _resolve_out(args.out)
    if args.name == "local_limit":
        res = local_limit_check(law, args.n)
        report = {"check": "local_limit", "n": args.n, "law": law.to_json(),
                  "statistic": res.relative, "threshold": 0.01,
                  "pass": bool(res.relative <= 0.01)}
        if out is not None and not args.no_plot:
            from . import figures
            from .stats import GaussianDensity, exact_centered_sum_pmf

            xs = np.arange(-int(4 * res.scale), int(4 * res.scale) + 1)
            lattice = res.scale * exact_centered_sum_pmf(law, args.n, xs)
            figures.local_limit_plot(xs / res.scale, lattice,
                                     GaussianDensity()(xs / res.scale),
                                     f"{args.law}, n={args.n}",
                                     out.with_suffix(".png"))
    else:
        ns = [10 ** e for e in range(2, max(3, int(math.log10(args.n))) + 1)]
        ladder = height_tail_ladder(law, ns)
        drift = abs(ladder[-1].ratio / ladder[-2].ratio - 1.0)
        report = {"check": "height_tail", "n": args.n, "law": law.to_json(),
                  "statistic": drift, "threshold": 0.05,
                  "pass": bool(drift <= 0.05),
                  "ladder": [{"n": p.n, "k": p.generations, "tail": p.tail,
                              "ratio": p.ratio} for p in ladder]}
        if out is not None and not args.no_plot:
            from . import figures

            figures.ratio_ladder_plot([p.n for p in ladder],
                                      [p.ratio for p in ladder],
                                      f"height-tail ratio, {args.law}",
                                      out.with_suffix(".png"))
    _emit(json.dumps(report, indent=2, sort_keys=True), out)
    print(("PASS" if report["pass"] else "FAIL"),
          f"statistic={report['statistic']:.5g} threshold={report['threshold']}")
    return 0


# -- entry --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgwtree",
        description="Samplers and verification tools for size-conditioned "
                    "critical Galton-Watson trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw conditioned trees, one per line")
    _law_args(p)
    p.add_argument("--n", type=int, required=True, help="tree size")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--strategy", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("enumerate", help="exact law of all trees of size n")
    _law_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("jsonl", "csv"), default="csv")
    p.set_defaults(fn=_cmd_enumerate)

    p = sub.add_parser("transform", help="apply phi/psi/harmonic to a step function")
    p.add_argument("--op", choices=("phi", "psi", "harmonic"), required=True)
    p.add_argument("--input", required=True, help="step function JSON file")
    p.add_argument("--s", type=float, default=None, help="endpoint for harmonic")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_transform)

    p = sub.add_parser("limit", help="replicate a limit-process statistic")
    _law_args(p, allow_bessel=True)
    p.add_argument("--mesh", type=int, required=True, help="lattice size N")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--statistic", choices=("max_h", "h", "H_at_u"), required=True)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--strategy", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=_cmd_limit)

    p = sub.add_parser("converge", help="two-sample KS comparison of two specs")
    p.add_argument("--spec-a", required=True)
    p.add_argument("--spec-b", required=True)
    p.add_argument("--level", type=float, default=0.01)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=_cmd_converge)

    p = sub.add_parser("check", help="run a named analytic check")
    p.add_argument("--name", choices=("local_limit", "height_tail"), required=True)
    _law_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"cgwtree: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:  # console-script target
    sys.exit(main())


if __name__ == "__main__":
    entry()
