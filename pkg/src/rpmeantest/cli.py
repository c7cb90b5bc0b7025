"""Command-line interface: ``rp-meantest <command> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .baselines import BASELINES
from .harness import (
    SETTINGS,
    ExperimentConfig,
    pvalue_stability,
    run_setting,
    sweep_projection_dimension,
    table1_report,
    write_roc_outputs,
)
from .rp_test import DEFAULT_PROJECTIONS, TwoSampleData, run_hotelling_test, run_rp_test
from .sampling import RngStream
from .validation import SUITES, run_validation


def read_matrix_csv(path) -> np.ndarray:
    """One observation per row; a non-numeric first row is treated as a header."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError(f"{path}: no data")
    try:
        [float(x) for x in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        return np.array([[float(x) for x in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _k_arg(text: str):
    return None if text == "auto" else int(text)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _emit(obj, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(obj, out, indent=2, default=_jsonable)
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(obj.keys()))
        w.writerow([obj[key] for key in obj])


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def cmd_test(args, out) -> int:
    data = TwoSampleData(read_matrix_csv(args.x), read_matrix_csv(args.y))
    k = N = None
    if args.method == "rp":
        outcome = run_rp_test(data, args.k, args.projections, args.alpha, RngStream(args.seed))
        k, N = outcome.params["k"], outcome.params["N"]
    elif args.method == "hotelling":
        outcome = run_hotelling_test(data, args.alpha)
    else:
        outcome = BASELINES[args.method](data, args.alpha)
    result = {
        "method": outcome.method,
        "statistic": outcome.statistic,
        "z": outcome.z_score,
        "p_value": outcome.p_value,
        "reject": outcome.reject,
        "k": k,
        "N": N,
        "n1": data.n1,
        "n2": data.n2,
        "p": data.p,
        "seed": args.seed,
    }
    _emit(result, args.format, out)
    return 0


def _config_from_args(args) -> ExperimentConfig:
    if str(args.setting).isdigit():
        setting = int(args.setting)
        if setting not in SETTINGS:
            raise SystemExit(f"setting must be 1-10, got {setting}")
        spec = {"setting_id": setting}
    else:
        spec = json.loads(Path(args.setting).read_text(encoding="utf-8"))
    if args.reps is not None:
        spec["reps_null"] = spec["reps_alt"] = args.reps
    for name in ("projections", "seed"):
        if getattr(args, name, None) is not None:
            spec[name] = getattr(args, name)
    if getattr(args, "methods", None):
        spec["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if getattr(args, "k", None) is not None:
        spec["k"] = _k_arg(args.k)
    return ExperimentConfig.from_dict(spec)


def cmd_simulate(args, out) -> int:
    config = _config_from_args(args)
    curves = run_setting(config, workers=args.workers)
    summary = {label: curve.auc for label, curve in curves.items()}
    if args.out:
        write_roc_outputs(curves, config, args.out)
    json.dump({"setting": config.setting_id, "seed": config.seed, "auc": summary}, out, indent=2)
    out.write("\n")
    return 0


def cmd_sweep_k(args, out) -> int:
    config = _config_from_args(args)
    curves = sweep_projection_dimension(config, args.ys, workers=args.workers)
    result = {
        "setting": config.setting_id,
        "seed": config.seed,
        "N": config.projections,
        "auc": {str(y): c.auc for y, c in curves.items()},
        "k": {str(y): math.floor(y * config.n) for y in curves},
    }
    if args.out:
        labelled = {f"rp-y{y}": c for y, c in curves.items()}
        extra = {f"rp-y{y}": {"k": k, "N": config.projections, "y": y} for y, k in zip(curves, result["k"].values())}
        write_roc_outputs(labelled, config, args.out, extra)
    json.dump(result, out, indent=2)
    out.write("\n")
    return 0


def cmd_pvalue_stability(args, out) -> int:
    data = TwoSampleData(read_matrix_csv(args.x), read_matrix_csv(args.y))
    res = pvalue_stability(data, args.ns, args.repeats, RngStream(args.seed), args.k)
    result = {
        "seed": args.seed,
        "repeats": args.repeats,
        "summaries": {str(N): s for N, s in res.summaries().items()},
        "pvalues": {str(N): v.tolist() for N, v in res.pvalues.items()},
    }
    json.dump(result, out, indent=2)
    out.write("\n")
    return 0


def cmd_table1(args, out) -> int:
    text = table1_report(args.draws, RngStream(args.seed).generator(), args.p)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    out.write(text)
    return 0


def cmd_validate(args, out) -> int:
    report = run_validation(args.suite, args.seed, args.scale)
    json.dump(report, out, indent=2, default=_jsonable)
    out.write("\n")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rp-meantest", description="Random-projection two-sample mean test.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run a test on two CSV samples")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--method", choices=["rp", "bs", "cq", "sd", "hotelling"], default="rp")
    p.add_argument("--k", type=_k_arg, default=None)
    p.add_argument("--projections", type=int, default=DEFAULT_PROJECTIONS)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_test)

    def add_sim_args(p):
        p.add_argument("--setting", required=True, help="1-10 or a JSON config file")
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--projections", type=int, default=None)
        p.add_argument("--seed", type=_u64, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", default=None)

    p = sub.add_parser("simulate", help="ROC study for one setting")
    add_sim_args(p)
    p.add_argument("--methods", default=None)
    p.add_argument("--k", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep-k", help="RP ROC curves over projection ratios")
    add_sim_args(p)
    p.add_argument("--ys", type=_float_list, default=[0.1, 0.3, 0.5, 0.7, 0.9])
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("pvalue-stability", help="repeated p-values on one dataset")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--ns", type=_int_list, default=[100, 1000, 10000])
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=_u64, default=0)
    p.set_defaults(func=cmd_pvalue_stability)

    p = sub.add_parser("table1", help="covariance summary table as CSV")
    p.add_argument("--draws", type=int, default=500)
    p.add_argument("--p", type=int, default=200)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("validate", help="run Monte Carlo oracle suites")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="shrink Monte Carlo sizes (0 < scale <= 1)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args, out or sys.stdout)


if __name__ == "__main__":
    raise SystemExit(main())
