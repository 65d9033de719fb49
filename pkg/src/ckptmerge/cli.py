"""Command-line interface.

Exit codes: 0 success, 2 incompatible checkpoints, 3 I/O or unreadable file,
4 evaluator failure, 64 usage error, 65 domain error.

Evaluators and objectives are given as ``kind[:key=value,...]``:

* checkpoint evaluators: ``toy`` (accuracy on the two-moons task; keys
  ``seed n_train n_dev n_test noise split fraction``), ``l2`` (negative squared
  distance to ``target=PATH``), ``constant`` (``value=C``);
* weight objectives: ``quadratic-peak``, ``two-bump``, ``gp-sample``,
  ``plateau`` (kind-specific parameters plus ``seed``), and ``constant``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .acquisition import AcqConfig
from .baselines import BaselineConfig, greedy_search, grid_search, random_search
from .bayesopt import OptConfig, SearchBounds, optimize
from .checkpoint import load_checkpoint, save_checkpoint
from .diagnostics import (
    BoundInputs,
    ConvergenceInputs,
    PacBayesInputs,
    convergence_rate,
    cumulative_regret,
    kl_divergence,
    merge_distance,
    pac_bayes_bound,
    performance_bound,
    simulate_merged_descent,
)
from .errors import CompatError, DomainError, FormatError, IoError, ObjectiveError
from .gp import KernelPolicy
from .harness import SYNTHETIC_KINDS, SGDConfig, SyntheticObjective, ToyEvaluator, ToyTask, make_toy_checkpoints
from .merge import greedy_soup, pairwise_merge, uniform_soup
from .report import RunReport, file_sha256, load_report, write_report

EXIT_OK, EXIT_COMPAT, EXIT_IO, EXIT_EVAL, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3, 4, 64, 65
SEED_ENV = "CKPTMERGE_SEED"
STRATEGIES = ("bo", "grid", "random", "greedy")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x: float) -> str:
    return f"{x:.12g}"


# -- evaluator specs -------------------------------------------------------------


def parse_spec(spec: str) -> tuple[str, dict[str, str]]:
    kind, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"bad evaluator parameter {item!r} in {spec!r}")
        params[key.strip()] = value.strip()
    return kind.strip(), params


def _num(params, key, default, cast=float):
    try:
        return cast(params.pop(key, default))
    except ValueError:
        raise UsageError(f"parameter {key}={params.get(key)!r} is not a number") from None


def is_weight_objective(spec: str) -> bool:
    return parse_spec(spec)[0] in SYNTHETIC_KINDS


def make_weight_objective(spec: str, seed: int):
    kind, params = parse_spec(spec)
    if kind == "constant":
        value = _num(params, "value", 0.0)
        return lambda lam: value
    if kind not in SYNTHETIC_KINDS:
        raise UsageError(f"{kind!r} is not a weight objective; use one of {SYNTHETIC_KINDS} or constant")
    obj_seed = _num(params, "seed", seed, int)
    try:
        return SyntheticObjective(kind, params, obj_seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def make_ckpt_evaluator(spec: str, seed: int):
    kind, params = parse_spec(spec)
    if kind == "constant":
        value = _num(params, "value", 0.0)
        return lambda ckpt: value
    if kind == "l2":
        if "target" not in params:
            raise UsageError("l2 evaluator needs target=PATH")
        target = load_checkpoint(params.pop("target"))
        return lambda ckpt: -merge_distance(ckpt, target)
    if kind == "toy":
        task = ToyTask(
            n_train=_num(params, "n_train", ToyTask.n_train, int),
            n_dev=_num(params, "n_dev", ToyTask.n_dev, int),
            n_test=_num(params, "n_test", ToyTask.n_test, int),
            noise=_num(params, "noise", ToyTask.noise),
            seed=_num(params, "seed", seed, int),
        )
        split = params.pop("split", "dev")
        fraction = _num(params, "fraction", 1.0)
        if params:
            raise UsageError(f"unknown toy evaluator keys: {sorted(params)}")
        return ToyEvaluator(task, split, fraction)
    raise UsageError(f"unknown checkpoint evaluator {kind!r}")


# -- argument parsing -------------------------------------------------------------


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_bo_flags(p):
    p.add_argument("--alpha", type=float, default=0.5, help="lower bound of the weight search")
    p.add_argument("--budget", type=int, default=15)
    p.add_argument("--resolution", type=int, default=1001, help="acquisition grid points")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=1.0, help="GP-Hedge learning rate")
    p.add_argument("--noise", type=float, default=1e-6, help="GP observation noise variance")
    p.add_argument("--refine", action="store_true", help="pick the length scale by marginal likelihood")
    p.add_argument("--patience", type=int, default=None, help="stop after this many steps without a new best")
    p.add_argument("--repeats", type=int, default=1, help="average this many objective calls per weight")


def build_parser(seed_default: int) -> tuple[_Parser, dict]:
    parser = _Parser(prog="ckptmerge", description="Checkpoint merging with Bayesian-optimized weights.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("merge", help="merge two checkpoints with a fixed weight")
    p.add_argument("--prev", required=True)
    p.add_argument("--curr", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out", required=True)
    subs["merge"] = p

    p = sub.add_parser("optimize", help="search the merge weight by Bayesian optimization")
    p.add_argument("--prev")
    p.add_argument("--curr")
    p.add_argument("--evaluator", default="toy", help="evaluator or weight-objective spec")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out-report", required=True)
    p.add_argument("--out-ckpt")
    p.add_argument("--config")
    _add_bo_flags(p)
    subs["optimize"] = p

    p = sub.add_parser("sweep", help="lambda curve, pairwise matrix, or soup-k table")
    p.add_argument("--mode", choices=("lambda-curve", "pairwise-matrix", "soup-k"), default="lambda-curve")
    p.add_argument("--prev")
    p.add_argument("--curr")
    p.add_argument("--checkpoints", nargs="+", default=[])
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--ks", type=_int_list, default=[2, 3, 4], help="soup window sizes")
    p.add_argument("--evaluator", default="toy")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--config")
    subs["sweep"] = p

    p = sub.add_parser("compare", help="compare search strategies at equal budget")
    p.add_argument("--strategies", default="bo,random")
    p.add_argument("--objective", default="gp-sample", help="weight-objective or checkpoint-evaluator spec")
    p.add_argument("--prev")
    p.add_argument("--curr")
    p.add_argument("--seeds", type=int, default=1, help="run seeds 0..N-1")
    p.add_argument("--seed-list", type=_int_list)
    p.add_argument("--greedy-step", type=float, default=0.1)
    p.add_argument("--greedy-shrink", type=float, default=0.5)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--summary", help="write the per-strategy summary as JSON here")
    p.add_argument("--config")
    _add_bo_flags(p)
    subs["compare"] = p

    p = sub.add_parser("diag", help="evaluate bounds, contraction factors and regret")
    dsub = p.add_subparsers(dest="diag", required=True, parser_class=_Parser)
    d = dsub.add_parser("bound")
    d.add_argument("--f-curr", type=float, required=True)
    d.add_argument("--f-prev", type=float, required=True)
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    d.add_argument("--lipschitz-grad", type=float, required=True)
    d.add_argument("--hess-max", type=float, required=True)
    d.add_argument("--hess-min", type=float, default=0.0)
    d.add_argument("--dist-sq", type=float, required=True)
    d = dsub.add_parser("kl")
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    d.add_argument("--dist-sq", type=float, required=True)
    d.add_argument("--sigma-sq", type=float, required=True)
    d = dsub.add_parser("pacbayes")
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    d.add_argument("--dist-sq", type=float, required=True)
    d.add_argument("--sigma-sq", type=float, required=True)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--delta", type=float, default=0.05)
    d.add_argument("--empirical-loss", type=float, default=0.0)
    d = dsub.add_parser("rho")
    d.add_argument("--eta", type=float, required=True)
    d.add_argument("--mu", type=float, required=True)
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    d.add_argument("--hess-max", type=float, required=True)
    d = dsub.add_parser("regret")
    d.add_argument("--report", required=True)
    d.add_argument("--f-star", type=float, required=True)
    d = dsub.add_parser("descent")
    d.add_argument("--dim", type=int, default=1)
    d.add_argument("--eta", type=float, required=True)
    d.add_argument("--mu", type=float, required=True)
    d.add_argument("--hess-max", type=float, required=True)
    d.add_argument("--lambda", dest="lam", type=_float_list, required=True, help="one weight or one per step")
    d.add_argument("--steps", type=int, default=20)
    d.add_argument("--seed", type=int, default=seed_default)
    d.add_argument("--partner", choices=("lookahead", "history"), default="lookahead")
    d = dsub.add_parser("distance")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    subs["diag"] = p

    p = sub.add_parser("toy-train", help="train the toy MLP and write snapshot checkpoints")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--task-seed", type=int)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--snapshots", type=_int_list, default=[600, 700, 800, 900, 1000])
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--out-dir", required=True)
    subs["toy-train"] = p
    return parser, subs


def parse_args(argv):
    parser, subs = build_parser(_default_seed())
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        try:
            with open(cfg_path, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise IoError(exc.errno, f"cannot read config: {exc.strerror}", cfg_path) from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {cfg_path} is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(cfg) - known - {"config"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        # flags > config file > defaults: re-parse with the file as defaults
        sp.set_defaults(**{k: v for k, v in cfg.items() if k != "config"})
        args = parser.parse_args(argv)
    return args


def _opt_config(args) -> tuple[SearchBounds, OptConfig]:
    try:
        bounds = SearchBounds(args.alpha)
        cfg = OptConfig(
            budget=args.budget,
            grid_resolution=args.resolution,
            seed=args.seed,
            kernel=KernelPolicy(noise=args.noise, refine=args.refine),
            acq=AcqConfig(beta=args.beta, xi=args.xi),
            hedge_eta=args.eta,
            patience=args.patience,
            repeats=args.repeats,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return bounds, cfg


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if not callable(v)}


def _write_csv(rows, header, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


# -- commands ------------------------------------------------------------------


def cmd_merge(args) -> int:
    if not 0.0 <= args.lam <= 1.0:
        raise UsageError(f"--lambda must lie in [0, 1], got {args.lam}")
    prev, curr = load_checkpoint(args.prev), load_checkpoint(args.curr)
    merged = pairwise_merge(prev, curr, args.lam).with_meta(merge_lambda=repr(args.lam))
    save_checkpoint(merged, args.out)
    print(f"merged {merged.n_elements} elements with lambda={fmt(args.lam)} -> {args.out}")
    return EXIT_OK


def _load_pair(args):
    if not (args.prev and args.curr):
        raise UsageError("--prev and --curr are required for checkpoint evaluators")
    return load_checkpoint(args.prev), load_checkpoint(args.curr)


def cmd_optimize(args) -> int:
    bounds, cfg = _opt_config(args)
    config = _echo(args)
    weight_only = is_weight_objective(args.evaluator) or (
        parse_spec(args.evaluator)[0] == "constant" and not (args.prev or args.curr)
    )
    if weight_only:
        objective = make_weight_objective(args.evaluator, args.seed)
        pair = None
    else:
        pair = _load_pair(args)
        config["inputs_sha256"] = {"prev": file_sha256(args.prev), "curr": file_sha256(args.curr)}
        evaluator = make_ckpt_evaluator(args.evaluator, args.seed)

        def objective(lam):
            return evaluator(pairwise_merge(pair[0], pair[1], lam))

    t0 = time.perf_counter()
    try:
        result = optimize(objective, bounds, cfg)
    except ObjectiveError as exc:
        report = RunReport.from_result("optimize", config, args.seed, exc.partial, status="evaluator-error")
        report.error = str(exc)
        report.timing = {"wall_seconds": time.perf_counter() - t0}
        write_report(report, args.out_report)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    wall = time.perf_counter() - t0

    artifacts = {"report": args.out_report}
    if pair is not None and args.out_ckpt:
        merged = pairwise_merge(pair[0], pair[1], result.best_lambda)
        save_checkpoint(merged.with_meta(merge_lambda=repr(result.best_lambda)), args.out_ckpt)
        artifacts["checkpoint"] = args.out_ckpt
    report = RunReport.from_result("optimize", config, args.seed, result, artifacts=artifacts)
    report.timing = {"wall_seconds": wall}
    write_report(report, args.out_report)
    print(f"best lambda={fmt(result.best_lambda)} value={fmt(result.best_value)} after {result.n_evals} evaluations")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.mode == "lambda-curve":
        if args.resolution < 2:
            raise UsageError("--resolution must be >= 2")
        lams = np.linspace(args.lo, args.hi, args.resolution)
        if is_weight_objective(args.evaluator) and not (args.prev or args.checkpoints):
            obj = make_weight_objective(args.evaluator, args.seed)
            scores = [float(obj(float(l))) for l in lams]
        else:
            if args.prev and args.curr:
                prev, curr = _load_pair(args)
            elif len(args.checkpoints) == 2:
                prev, curr = (load_checkpoint(p) for p in args.checkpoints)
            else:
                raise UsageError("lambda-curve needs --prev/--curr or exactly two --checkpoints")
            ev = make_ckpt_evaluator(args.evaluator, args.seed)
            scores = [float(ev(pairwise_merge(prev, curr, float(l)))) for l in lams]
            f0, f1 = float(ev(prev)), float(ev(curr))
            frac = float(np.mean(np.asarray(scores) > max(f0, f1)))
            print(f"improvement fraction (beats both endpoints): {fmt(frac)}", file=sys.stderr)
        _write_csv([(fmt(l), fmt(s)) for l, s in zip(lams, scores)], ["lambda", "score"], args.out)
        return EXIT_OK

    if len(args.checkpoints) < 2:
        raise UsageError(f"{args.mode} needs at least two --checkpoints")
    ckpts = [load_checkpoint(p) for p in args.checkpoints]
    names = [os.path.basename(p) for p in args.checkpoints]
    ev = make_ckpt_evaluator(args.evaluator, args.seed)

    if args.mode == "pairwise-matrix":
        n = len(ckpts)
        rows = []
        for i in range(n):
            row = [names[i]]
            for j in range(n):
                row.append(fmt(float(ev(pairwise_merge(ckpts[i], ckpts[j], 0.5)))))
            rows.append(row)
        _write_csv(rows, ["checkpoint", *names], args.out)
        return EXIT_OK

    rows = []
    for k in args.ks:
        if k < 1:
            raise UsageError("soup window sizes must be >= 1")
        for start in range(len(ckpts) - k + 1):
            window = ckpts[start : start + k]
            _, trace = greedy_soup(window, ev, ids=names[start : start + k])
            uni = float(ev(uniform_soup(window)))
            rows.append((start, k, fmt(trace.final_score), fmt(uni), ";".join(trace.final_members)))
    _write_csv(rows, ["start", "k", "greedy_score", "uniform_score", "members"], args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    bad = [s for s in strategies if s not in STRATEGIES]
    if bad or not strategies:
        raise UsageError(f"unknown strategies {bad}; choose from {STRATEGIES}")
    seeds = args.seed_list if args.seed_list else list(range(args.seeds))
    args.seed = seeds[0] if seeds else 0
    bounds, _ = _opt_config(args)

    pair = None
    if not (is_weight_objective(args.objective) or parse_spec(args.objective)[0] == "constant"):
        pair = _load_pair(args)

    rows, best = [], {s: [] for s in strategies}
    for seed in seeds:
        if pair is None:
            objective = make_weight_objective(args.objective, seed)
        else:
            ev = make_ckpt_evaluator(args.objective, seed)

            def objective(lam, ev=ev):
                return ev(pairwise_merge(pair[0], pair[1], lam))

        for strategy in strategies:
            args.seed = seed
            _, cfg = _opt_config(args)
            try:
                bcfg = BaselineConfig(args.budget, seed, args.greedy_step, args.greedy_shrink)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            try:
                if strategy == "bo":
                    res = optimize(objective, bounds, cfg)
                elif strategy == "grid":
                    res = grid_search(objective, bounds, bcfg)
                elif strategy == "random":
                    res = random_search(objective, bounds, bcfg)
                else:
                    res = greedy_search(objective, bounds, bcfg)
            except ValueError as exc:
                raise UsageError(f"{strategy}: {exc}") from None
            best[strategy].append(res.best_value)
            rows.append((strategy, seed, fmt(res.best_lambda), fmt(res.best_value), res.n_evals))
    _write_csv(rows, ["strategy", "seed", "best_lambda", "best_value", "n_evals"], args.out)

    summary = {}
    for s, vals in best.items():
        q25, med, q75 = (float(v) for v in np.percentile(vals, [25, 50, 75]))
        summary[s] = {"median": med, "q25": q25, "q75": q75, "iqr": q75 - q25, "n": len(vals)}
        print(f"{s:>7}: median={fmt(med)} iqr={fmt(q75 - q25)} (n={len(vals)}, budget={args.budget})", file=sys.stderr)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            json.dump({"budget": args.budget, "strategies": summary}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_diag(args) -> int:
    kind = args.diag
    if kind == "bound":
        lo, hi = performance_bound(
            BoundInputs(args.f_curr, args.f_prev, args.lam, args.lipschitz_grad, args.hess_max, args.hess_min, args.dist_sq)
        )
        _write_csv([(fmt(lo), fmt(hi))], ["lower", "upper"], None)
    elif kind == "kl":
        print(fmt(kl_divergence(PacBayesInputs(args.lam, args.dist_sq, args.sigma_sq))))
    elif kind == "pacbayes":
        inp = PacBayesInputs(args.lam, args.dist_sq, args.sigma_sq, args.n, args.delta, args.empirical_loss)
        print(fmt(pac_bayes_bound(inp)))
    elif kind == "rho":
        print(fmt(convergence_rate(ConvergenceInputs(args.eta, args.mu, args.lam, args.hess_max))))
    elif kind == "regret":
        try:
            report = load_report(args.report)
        except OSError as exc:
            raise IoError(exc.errno, f"cannot read report: {exc.strerror}", args.report) from exc
        except (ValueError, KeyError) as exc:
            raise FormatError(f"bad report {args.report}: {exc}") from None
        values = [float(o["value"]) for o in report["trace"]]
        series = cumulative_regret(values, args.f_star)
        _write_csv([(t + 1, fmt(r)) for t, r in enumerate(series)], ["t", "cumulative_regret"], None)
    elif kind == "descent":
        try:
            tr = simulate_merged_descent(
                args.dim, args.eta, args.mu, args.hess_max, args.lam, args.steps, args.seed, partner=args.partner
            )
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        rows = [
            (t + 1, fmt(l), fmt(a), fmt(b), fmt(c), fmt(r))
            for t, (l, a, b, c, r) in enumerate(zip(tr.lambdas, tr.loss_step, tr.loss_merged, tr.contraction, tr.rho))
        ]
        _write_csv(rows, ["step", "lambda", "loss_step", "loss_merged", "contraction", "rho"], None)
    elif kind == "distance":
        print(fmt(merge_distance(load_checkpoint(args.a), load_checkpoint(args.b))))
    return EXIT_OK


def cmd_toy_train(args) -> int:
    task = ToyTask(seed=args.seed if args.task_seed is None else args.task_seed)
    try:
        sgd = SGDConfig(lr=args.lr, steps=args.steps, batch_size=args.batch_size, snapshot_steps=tuple(args.snapshots))
        ckpts = make_toy_checkpoints(task, sgd=sgd, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    os.makedirs(args.out_dir, exist_ok=True)
    width = len(str(args.steps))
    for ck in ckpts:
        path = os.path.join(args.out_dir, f"step_{int(ck.meta['step']):0{width}d}.ckpt")
        save_checkpoint(ck, path)
        print(path)
    with open(os.path.join(args.out_dir, "task.json"), "w", encoding="utf-8") as fh:
        json.dump({"task": asdict(task), "sgd": asdict(sgd), "seed": args.seed}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


COMMANDS = {
    "merge": cmd_merge,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "diag": cmd_diag,
    "toy-train": cmd_toy_train,
}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CompatError as exc:
        print("incompatible checkpoints:", file=sys.stderr)
        for name, kind, detail in exc.report.mismatches:
            print(f"  {name}: {kind} ({detail})", file=sys.stderr)
        return EXIT_COMPAT
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ObjectiveError as exc:
        print(f"evaluator error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except (FormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
