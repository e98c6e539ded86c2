"""Command line front end.

Exit codes: 0 success, 1 error (bad config, degenerate basis, ...),
2 study finished but the target tolerance or an inequality check was not
met, 3 a verification suite failed.
"""

import argparse
import csv
import os
import sys

from . import config as cfg
from . import suites
from .convergence import build_pooled_basis, run_study
from .errors import RitzError
from .ritz import TrialBasis, ritz_spectrum, upper_bound_violation

EXIT_OK, EXIT_ERROR, EXIT_UNMET, EXIT_VERIFY = 0, 1, 2, 3


def _threads(value):
    if value is None:
        env = os.environ.get("RITZ_THREADS", "").strip()
        if not env:
            return 1
        try:
            value = int(env)
        except ValueError:
            raise cfg.ConfigInvalid(f"RITZ_THREADS must be a positive integer, got {env!r}") from None
    if value < 1:
        raise cfg.ConfigInvalid("threads must be ≥ 1")
    return value


def _fmt_err(x):
    return "n/a" if x is None else f"{x:.3e}"


def run_study_config(data, threads, csv_path=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    study = cfg.parse_study(data)
    op = cfg.build_operator(study.operator, default_seed=study.seed)
    family = cfg.build_family(study.family, op, study.m)
    report = run_study(op, family, study.steps, study.target_tol, study.prune_tol, threads=threads)

    csv_path = csv_path or study.output_path
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            report.write_csv(fh)
        summary = out
    else:
        report.write_csv(out)
        summary = err

    final = report.final()
    conv = ", ".join(f"k={k}: {'never' if c is None else c}" for k, c in enumerate(report.converged_at, 1))
    errors = ", ".join(f"err_{k}={_fmt_err(e)}" for k, e in enumerate(final.errors or (None,) * report.m, 1))
    print(f"operator: {op.kind}, family: {family.description}", file=summary)
    print(f"converged_at (target_tol {study.target_tol:g}): {conv}", file=summary)
    print(f"final step {final.n}: pooled_dim={final.pooled_dim}, {errors}", file=summary)
    print(f"sandwich: {'ok' if report.sandwich_ok else 'VIOLATED'}, "
          f"monotone: {'ok' if report.monotone_ok else 'VIOLATED'}", file=summary)
    if csv_path:
        print(f"csv: {csv_path}", file=summary)
    if report.reference is None:
        print("no reference spectrum; convergence cannot be certified", file=summary)
        return EXIT_UNMET
    if report.fully_converged and report.sandwich_ok and report.monotone_ok:
        return EXIT_OK
    print("target not met", file=summary)
    return EXIT_UNMET


def _spectrum_basis(data, op):
    if "basis" in data:
        vectors = [cfg.parse_vector(v, f"basis[{i}]") for i, v in enumerate(data["basis"])]
        if not vectors:
            raise cfg.ConfigInvalid("basis must not be empty")
        return TrialBasis(vectors)
    if "family" in data:
        m = cfg._integer(data.get("m", 1), "m")
        if m < 1:
            raise cfg.ConfigInvalid("m must be ≥ 1")
        step = cfg._integer(data.get("step", 1), "step")
        if step < 1:
            raise cfg.ConfigInvalid("step must be ≥ 1")
        family = cfg.build_family(data["family"], op, m)
        if data.get("pooled", False):
            return build_pooled_basis(family, step, op)
        return TrialBasis(family.step_vectors(step))
    raise cfg.ConfigInvalid("config: give either 'basis' or 'family' (with 'm' and 'step')")


def run_spectrum_config(data, threads, csv_path=None, out=None):
    out = out or sys.stdout
    if not isinstance(data, dict):
        raise cfg.ConfigInvalid("config must be a JSON object")
    op = cfg.build_operator(cfg._require(data, "operator", "config"), data.get("seed", 0))
    basis = _spectrum_basis(data, op)
    spec = ritz_spectrum(basis, op, threads)
    print(f"ritz values ({len(basis)} basis vectors):", file=out)
    for k, v in enumerate(spec.values, 1):
        print(f"  {k:3d}  {float(v)!r}", file=out)
    print(f"gram condition: {spec.gram_condition!r}", file=out)
    if spec.upper_bound_ok is not None:
        viol = upper_bound_violation(spec.values, op.reference_spectrum)
        print(f"upper bounds: {'ok' if spec.upper_bound_ok else 'VIOLATED'} (worst {viol:.3e})", file=out)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "ritz_value"])
            for k, v in enumerate(spec.values, 1):
                writer.writerow([k, repr(float(v))])
    return EXIT_OK


def cmd_study(args):
    return run_study_config(cfg.load_json(args.config), _threads(args.threads), args.csv)


def cmd_spectrum(args):
    return run_spectrum_config(cfg.load_json(args.config), _threads(args.threads), args.csv)


def cmd_verify(args):
    if args.trials < 0:
        raise cfg.ConfigInvalid("trials must be ≥ 0")
    threads = _threads(args.threads)
    if args.trials == 0:
        print("warning: trials = 0, every suite passes vacuously", file=sys.stderr)
    names = [name for name, _ in suites.SUITES]
    if args.suite is not None and args.suite not in names:
        raise cfg.ConfigInvalid(f"suite must be one of {', '.join(names)}")
    failed = False
    for name, fn in suites.SUITES:
        if args.suite is not None and name != args.suite:
            continue
        cases = [args.case] if args.case is not None else args.trials
        result = fn(args.seed, cases, threads)
        print(result.summary())
        for case, detail in result.failures[:1]:
            failed = True
            print(f"reproduce: ritzbounds verify --seed {args.seed} --suite {name} --case {case}  # {detail}")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_demo(args):
    names = cfg.scenario_names()
    if args.name not in names:
        raise cfg.ConfigInvalid(f"unknown demo {args.name!r}; available: {', '.join(names)}")
    data = cfg.load_json(cfg.scenario_dir() / f"{args.name}.json")
    threads = _threads(args.threads)
    csv_path = None
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        csv_path = os.path.join(args.out_dir, f"{args.name}.csv")
    if "steps" in data:
        return run_study_config(data, threads, csv_path)
    return run_spectrum_config(data, threads, csv_path)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for matrix assembly (default: $RITZ_THREADS or 1)")

    parser = argparse.ArgumentParser(prog="ritzbounds",
                                     description="Rayleigh-Ritz eigenvalue bounds and convergence studies")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("study", parents=[common], help="run a convergence study from a JSON config")
    p.add_argument("config")
    p.add_argument("--csv", help="write the CSV here instead of stdout (overrides output_path)")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("spectrum", parents=[common], help="Ritz values of one trial basis")
    p.add_argument("config")
    p.add_argument("--csv", help="also write the values to this CSV file")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[common], help="run the seeded property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100, help="cases per suite (default 100)")
    p.add_argument("--suite", help="run only this suite")
    p.add_argument("--case", type=int, help="run only this case index (replays a failure)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", parents=[common], help="run a shipped scenario: "
                       + ", ".join(cfg.scenario_names()))
    p.add_argument("name")
    p.add_argument("--out-dir", help="write <name>.csv into this directory")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RitzError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
