"""``miht`` command line: train, evaluate, predict, explain, bench.

Structured output goes to stdout; logs go to stderr. Set ``MIHT_LOG`` to a
logging level name (e.g. ``INFO``) for progress messages.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing as mp
import os
import sys
import time
from pathlib import Path
from queue import Empty

from . import metrics
from .baselines import DTWNN, EuclideanNN
from .datasets import load_ts
from .estimator import MIHTClassifier
from .persistence import load_model, save_model

logger = logging.getLogger("miht")

MODEL_NAMES = ("miht", "1nn-ed", "1nn-dtw")


class CLIError(Exception):
    pass


def _add_hyperparameters(p):
    p.add_argument("--omega", type=float, default=0.21, help="window width, fraction of mean length")
    p.add_argument("--lambda", dest="lambda_", type=float, default=0.02,
                   help="stride between windows, fraction of mean length")
    p.add_argument("-k", type=int, default=4, help="consecutive windows selected per bag")
    p.add_argument("--kappa", type=float, default=3.665, help="grace period, multiple of mean bag size")
    p.add_argument("--delta", type=float, default=0.005615, help="Hoeffding bound significance")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nb", choices=("product", "sum"), default="product")
    p.add_argument("--tie-threshold", type=float, default=None)


def _estimator(args) -> MIHTClassifier:
    return MIHTClassifier(
        window=args.omega, stride=args.lambda_, k=args.k, grace_period=args.kappa,
        delta=args.delta, max_iter=args.max_iters, nb_mode=args.nb,
        tie_threshold=args.tie_threshold, random_state=args.seed,
    )


def _load(path, impute=False):
    try:
        return load_ts(path, impute=impute)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_model(path):
    try:
        return load_model(path)
    except OSError as exc:
        raise CLIError(f"cannot read model {path}: {exc.strerror or exc}") from None


def _emit(rows, fmt, out=None):
    text = metrics.rows_to_json(rows) if fmt == "json" else metrics.rows_to_csv(rows)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_train(args):
    train = _load(args.train, args.impute)
    model = _estimator(args)
    start = time.perf_counter()
    model.fit(train)
    elapsed = time.perf_counter() - start
    save_model(model, args.out)
    p = model.params_
    logger.info("resolved window=%d stride=%d k=%d grace_period=%d", p.window, p.stride, p.k, p.grace_period)
    report = {
        "dataset": train.name,
        "window_steps": p.window,
        "stride_steps": p.stride,
        "k": p.k,
        "grace_period": p.grace_period,
        **model.fit_report_.to_dict(),
        "tree_nodes": model.tree_.n_nodes,
    }
    if not args.no_timings:
        report["train_seconds"] = round(elapsed, 3)
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_evaluate(args):
    model = _load_model(args.model)
    test = _load(args.test, args.impute)
    start = time.perf_counter()
    result = metrics.evaluate(model, test)
    elapsed = None if args.no_timings else time.perf_counter() - start
    _emit([metrics.result_row(test.name, "miht", result, None, elapsed)], args.format)


def cmd_predict(args):
    model = _load_model(args.model)
    data = _load(args.series, args.impute)
    predicted = model.predict(data)
    truth = data.label_names()
    sys.stdout.write("index,predicted,actual\n")
    for i, (p, t) in enumerate(zip(predicted, truth)):
        sys.stdout.write(f"{i},{p},{'' if t is None else t}\n")


def cmd_explain(args):
    model = _load_model(args.model)
    dot = model.to_dot()
    outputs = {"dot": dot}
    if args.series:
        data = _load(args.series, args.impute)
        if not 0 <= args.index < len(data):
            raise CLIError(f"index {args.index} out of range for {len(data)} series")
        values = data.series[args.index].values
        exp = model.explain([values])[0]
        names = [str(c) for c in model.classes_]
        outputs["json"] = exp.to_json(names, indent=2) + "\n"
        outputs["csv"] = exp.to_csv(values)
    if args.out_prefix:
        for ext, text in outputs.items():
            path = f"{args.out_prefix}.{ext}"
            Path(path).write_text(text, encoding="utf-8")
            logger.info("wrote %s", path)
    else:
        for text in outputs.values():
            sys.stdout.write(text)


def _find_datasets(data_dir):
    found = {}
    for train in sorted(Path(data_dir).rglob("*_TRAIN.ts")):
        name = train.name[: -len("_TRAIN.ts")]
        test = train.with_name(f"{name}_TEST.ts")
        if test.exists():
            found.setdefault(name, (train, test))
        else:
            logger.warning("skipping %s: no matching _TEST.ts", train)
    return found


def _bench_models(names, args):
    made = {}
    for name in names:
        if name == "miht":
            made[name] = _estimator(args)
        elif name == "1nn-ed":
            made[name] = EuclideanNN()
        elif name == "1nn-dtw":
            made[name] = DTWNN()
    return made


def _bench_dataset(name, train_path, test_path, model_names, args, timings):
    train = load_ts(train_path, impute=args.impute)
    test = load_ts(test_path, impute=args.impute)
    rows = []
    for model_name, model in _bench_models(model_names, args).items():
        try:
            t0 = time.perf_counter()
            model.fit(train)
            t1 = time.perf_counter()
            result = metrics.evaluate(model, test)
            t2 = time.perf_counter()
        except Exception as exc:  # one failing model must not sink the table
            logger.error("%s on %s failed: %s", model_name, name, exc)
            rows.append(metrics.result_row(name, model_name, None))
            continue
        rows.append(metrics.result_row(name, model_name, result,
                                       t1 - t0 if timings else None, t2 - t1 if timings else None))
    return rows


def _bench_worker(queue, *job):
    try:
        queue.put(_bench_dataset(*job))
    except Exception as exc:
        queue.put(exc)


def cmd_bench(args):
    model_names = [m.strip() for m in args.models.split(",") if m.strip()]
    unknown = sorted(set(model_names) - set(MODEL_NAMES))
    if unknown:
        raise CLIError(f"unknown models {unknown}; choose from {', '.join(MODEL_NAMES)}")
    datasets = _find_datasets(args.data_dir)
    if not datasets:
        raise CLIError(f"no <name>_TRAIN.ts / <name>_TEST.ts pairs under {args.data_dir}")

    ctx = mp.get_context("fork" if "fork" in mp.get_all_start_methods() else "spawn")
    pending = list(datasets.items())
    running = {}
    results = {}
    while pending or running:
        while pending and len(running) < max(1, args.jobs):
            name, (train, test) = pending.pop(0)
            queue = ctx.Queue()
            proc = ctx.Process(target=_bench_worker,
                               args=(queue, name, train, test, model_names, args, not args.no_timings))
            proc.start()
            running[name] = (proc, queue, time.monotonic())
        for name, (proc, queue, started) in list(running.items()):
            outcome = None
            if not queue.empty():
                outcome = queue.get()
            elif not proc.is_alive():
                try:
                    outcome = queue.get(timeout=1.0)
                except Empty:
                    outcome = RuntimeError(f"worker exited with code {proc.exitcode}")
            elif args.timeout is not None and time.monotonic() - started > args.timeout:
                outcome = TimeoutError(f"exceeded {args.timeout}s")
            if outcome is None:
                continue
            if proc.is_alive():
                proc.terminate()
            proc.join()
            del running[name]
            if isinstance(outcome, Exception):
                logger.error("dataset %s failed: %s", name, outcome)
                outcome = [metrics.result_row(name, m, None) for m in model_names]
            results[name] = outcome
        if running:
            time.sleep(0.001)

    rows = [row for name in datasets for row in results[name]]
    _emit(rows, args.format, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="miht", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on a .ts training file")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--report", help="also write the JSON fit report here")
    p.add_argument("--impute", action="store_true", help="interpolate '?' missing values")
    p.add_argument("--no-timings", action="store_true")
    _add_hyperparameters(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a model on a labelled .ts file")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--impute", action="store_true")
    p.add_argument("--no-timings", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="label every series of a .ts file")
    p.add_argument("--model", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--impute", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", help="export the tree and, optionally, one series' relevant span")
    p.add_argument("--model", required=True)
    p.add_argument("--series")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out-prefix", help="write <prefix>.dot/.json/.csv instead of stdout")
    p.add_argument("--impute", action="store_true")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("bench", help="run several models over a directory of datasets")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--models", default=",".join(MODEL_NAMES))
    p.add_argument("--out", help="results file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--timeout", type=float, default=None, help="per-dataset wall-clock limit in seconds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--impute", action="store_true")
    p.add_argument("--no-timings", action="store_true", help="leave timing columns empty")
    _add_hyperparameters(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("MIHT_LOG", "WARNING").upper()
    logging.basicConfig(
        level=level if isinstance(logging.getLevelName(level), int) else "WARNING",
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (CLIError, ValueError) as exc:
        print(f"miht {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
