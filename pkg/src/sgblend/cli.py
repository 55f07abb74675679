"""Command line: ``sgblend {gradcheck,train,compare,curves}``.

Exit codes: 0 success, 1 run failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from .activations import ActivationKind, ActivationParams, d_input, forward
from .experiment import ConfigError, ExperimentConfig, NumericalError, Trainer
from .gradcheck import check_all

log = logging.getLogger("sgblend")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_kinds(text: str) -> list[ActivationKind]:
    try:
        return [ActivationKind.parse(k) for k in text.split(",") if k.strip()]
    except ValueError as e:
        raise UsageError(str(e)) from None


# --- gradcheck -----------------------------------------------------------

def cmd_gradcheck(kinds, seed=7, tol=1e-5, n_points=1000, out=None, blend_gelu="gelu_tanh") -> int:
    reports = check_all(kinds, n_points, seed, tol, ActivationKind.parse(blend_gelu))
    doc = {"seed": seed, "tol": tol, "n_points": n_points,
           "all_passed": all(r.passed for r in reports),
           "reports": [r.to_dict() for r in reports]}
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.kind:<11} {r.variable:<6} max_rel={r.max_rel_error:.3e} at x={r.worst_point:+.4f}")
    return EXIT_OK if doc["all_passed"] else EXIT_FAIL


# --- train ---------------------------------------------------------------

def _write_run(result, out_dir: Path, stem: str = ""):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}result.json").write_text(result.to_json())
    result.write_metrics_csv(out_dir / f"{stem}metrics.csv")


def cmd_train(cfg: ExperimentConfig, out=None, checkpoint=None, resume=None, stop_after=None):
    trainer = Trainer.from_checkpoint(resume) if resume else Trainer(cfg)
    result = trainer.train(stop_after=stop_after)
    if checkpoint:
        trainer.save_checkpoint(checkpoint)
    if out:
        _write_run(result, Path(out))
    return result


# --- compare -------------------------------------------------------------

COMPARE_HEADER = ["rank", "activation", "best_val_accuracy", "best_epoch", "dead_pct",
                  "alpha", "beta", "gamma", "status"]


def _run_one(cfg_dict: dict) -> dict:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    try:
        result = Trainer(cfg).train()
    except (NumericalError, ConfigError, ValueError, ArithmeticError) as e:
        return {"activation": cfg.activation, "status": f"failed: {e}"}
    s = result.summary
    lp = result.learned_params
    mean = lambda key: float(np.mean([p[key] for p in lp])) if lp else None  # noqa: E731
    return {
        "activation": cfg.activation,
        "best_val_accuracy": s["best_val_accuracy"],
        "best_epoch": s["best_epoch"],
        "dead_pct": s["best_model_dead_pct"],
        "alpha": mean("alpha") if cfg.kind is ActivationKind.SGBLEND else None,
        "beta": mean("beta"),
        "gamma": mean("gamma") if cfg.kind in (ActivationKind.SSWISH, ActivationKind.SGBLEND) else None,
        "status": "ok",
        "result": result.to_dict(),
    }


def cmd_compare(base: ExperimentConfig, kinds, out=None, jobs: int = 1) -> list[dict]:
    if len(kinds) < 2:
        raise UsageError("compare needs at least two activations")
    cfgs = [{**base.to_dict(), "activation": k.value} for k in kinds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_run_one, cfgs))
    else:
        rows = [_run_one(c) for c in cfgs]
    ok = sorted((r for r in rows if r["status"] == "ok"), key=lambda r: -r["best_val_accuracy"])
    failed = [r for r in rows if r["status"] != "ok"]
    table = []
    for rank, r in enumerate(ok + failed, start=1):
        table.append({**{k: r.get(k) for k in COMPARE_HEADER if k != "rank"},
                      "rank": rank if r["status"] == "ok" else None})
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "compare.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, COMPARE_HEADER)
            w.writeheader()
            w.writerows(table)
        for r in ok:
            (out / f"{r['activation']}.result.json").write_text(json.dumps(r["result"], indent=2))
    print(format_table(table))
    return table


def format_table(table: list[dict]) -> str:
    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.4f}"
        return str(v)

    widths = {k: max(len(k), *(len(fmt(r[k])) for r in table)) for k in COMPARE_HEADER}
    lines = ["  ".join(k.ljust(widths[k]) for k in COMPARE_HEADER)]
    lines += ["  ".join(fmt(r[k]).ljust(widths[k]) for k in COMPARE_HEADER) for r in table]
    return "\n".join(lines)


# --- curves --------------------------------------------------------------

def curve(kind: ActivationKind, params: ActivationParams, x_min: float, x_max: float,
          n_points: int, blend_gelu=ActivationKind.GELU_TANH) -> np.ndarray:
    if not x_min < x_max:
        raise UsageError("x_min must be below x_max")
    if n_points < 2:
        raise UsageError("n_points must be >= 2")
    x = np.linspace(x_min, x_max, n_points)
    return np.column_stack([x, forward(kind, params, x, blend_gelu), d_input(kind, params, x, blend_gelu)])


def cmd_curves(kind, params, x_min, x_max, n_points, out=None, blend_gelu="gelu_tanh") -> np.ndarray:
    rows = curve(kind, params, x_min, x_max, n_points, ActivationKind.parse(blend_gelu))
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["x", "f", "df"])
        w.writerows([repr(float(v)) for v in row] for row in rows)
    finally:
        if out:
            fh.close()
    return rows


# --- argument parsing ----------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with ExperimentConfig keys; flags override it")
    p.add_argument("--dataset", choices=["two_moons", "spirals", "blobs", "csv"])
    p.add_argument("--n-samples", type=int, dest="n_samples")
    p.add_argument("--noise-sd", type=float, dest="noise_sd")
    p.add_argument("--turns", type=float)
    p.add_argument("--csv-path", dest="csv_path")
    p.add_argument("--label-column", type=int, dest="label_column")
    p.add_argument("--has-header", action="store_const", const=True, dest="has_header")
    p.add_argument("--hidden", type=lambda s: [int(v) for v in s.split(",")], help="e.g. 32,32")
    p.add_argument("--blend-gelu", dest="blend_gelu", choices=["gelu_tanh", "gelu_exact"])
    p.add_argument("--optimizer", choices=["sgd", "adam"])
    p.add_argument("--lr", type=float)
    p.add_argument("--momentum", type=float)
    p.add_argument("--weight-decay", type=float, dest="weight_decay")
    p.add_argument("--epochs", type=int, dest="max_epochs")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--val-fraction", type=float, dest="val_fraction")
    p.add_argument("--no-plateau", action="store_const", const=False, dest="plateau")
    p.add_argument("--no-early-stop", action="store_const", const=False, dest="early_stopping")
    p.add_argument("--monitor", choices=["val_loss", "val_accuracy"])
    p.add_argument("--dead-eps", type=float, dest="dead_eps")
    p.add_argument("--seed", type=int)


_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def config_from_args(args) -> ExperimentConfig:
    base = json.loads(Path(args.config).read_text()) if args.config else {}
    overrides = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS and v is not None}
    try:
        return ExperimentConfig.from_dict({**base, **overrides}).validate()
    except (ConfigError, TypeError) as e:
        raise UsageError(f"bad config: {e}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgblend", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gradcheck", help="certify analytic derivatives against finite differences")
    g.add_argument("--kinds", default=",".join(k.value for k in ActivationKind))
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--tol", type=float, default=1e-5)
    g.add_argument("--points", type=int, default=1000)
    g.add_argument("--blend-gelu", default="gelu_tanh", choices=["gelu_tanh", "gelu_exact"])
    g.add_argument("--out", help="write the JSON report here")

    t = sub.add_parser("train", help="train one model")
    _add_config_flags(t)
    t.add_argument("--activation")
    t.add_argument("--out", help="directory for result.json and metrics.csv")
    t.add_argument("--checkpoint", help="write a checkpoint here when training stops")
    t.add_argument("--resume", help="continue from this checkpoint (its config wins)")
    t.add_argument("--stop-after", type=int, help="pause after this many total epochs")

    c = sub.add_parser("compare", help="train once per activation on identical data and seeds")
    _add_config_flags(c)
    c.add_argument("--kinds", required=True, help="comma-separated activation names")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out", help="directory for compare.csv and per-run results")

    v = sub.add_parser("curves", help="emit x, f(x), f'(x) on a uniform grid")
    v.add_argument("--kind", required=True)
    v.add_argument("--alpha", type=float, default=0.5)
    v.add_argument("--beta", type=float, default=1.0)
    v.add_argument("--gamma", type=float, default=0.0)
    v.add_argument("--x-min", type=float, default=-5.0)
    v.add_argument("--x-max", type=float, default=5.0)
    v.add_argument("--points", type=int, default=1001)
    v.add_argument("--blend-gelu", default="gelu_tanh", choices=["gelu_tanh", "gelu_exact"])
    v.add_argument("--out", help="CSV path (stdout if omitted)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gradcheck":
            if args.points < 1 or not args.tol > 0:
                raise UsageError("--points must be >= 1 and --tol positive")
            return cmd_gradcheck(parse_kinds(args.kinds), args.seed, args.tol, args.points,
                                 args.out, args.blend_gelu)
        if args.command == "train":
            if args.activation:
                args.activation = parse_kinds(args.activation)[0].value
            cfg = config_from_args(args)
            result = cmd_train(cfg, args.out, args.checkpoint, args.resume, args.stop_after)
            s = result.summary
            print(f"epochs={s['epochs_run']} best_epoch={s['best_epoch']} "
                  f"best_val_acc={s['best_val_accuracy']:.4f} stopped_early={s['stopped_early']}")
            return EXIT_OK
        if args.command == "compare":
            table = cmd_compare(config_from_args(args), parse_kinds(args.kinds), args.out, args.jobs)
            return EXIT_OK if all(r["status"] == "ok" for r in table) else EXIT_FAIL
        if args.command == "curves":
            kind = parse_kinds(args.kind)[0]
            cmd_curves(kind, ActivationParams(args.alpha, args.beta, args.gamma),
                       args.x_min, args.x_max, args.points, args.out, args.blend_gelu)
            return EXIT_OK
    except UsageError as e:
        print(f"sgblend: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, OSError, ValueError) as e:
        print(f"sgblend: run failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
