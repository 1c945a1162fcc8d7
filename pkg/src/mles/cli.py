"""``mles`` command line: build, preprocess, train, evaluate and explain.

Exit status: 0 success, 1 domain findings (invalid network, fact-id
mismatch), 2 unreadable or malformed input, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import liar, phishing
from .dataset import fact_id_mismatches, read_cases, write_cases
from .errors import HeaderMismatch, MLESError, ParseError
from .evaluation import (
    DesignResult,
    Metrics,
    compare_designs,
    comparison_markdown,
    predict,
    score_split,
)
from .explain import explain
from .network import load, save, validate
from .training import (
    ShapeSpec,
    TrainConfig,
    TrainHistory,
    generate_perfect_system,
    randomize_weights,
    train,
)

EXIT_OK, EXIT_FINDINGS, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 64

KINDS = {"phish": "phish", "phishing": "phish", "liar": "liar", "fake-news": "liar"}


class UsageError(Exception):
    pass


class Findings(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _unit(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def _velocity(text):
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {value}")
    return value


def _ratios(text):
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b,c got {text!r}") from None
    if len(parts) != 3 or min(parts) <= 0 or abs(sum(parts) - 1) > 1e-9:
        raise argparse.ArgumentTypeError("need three positive ratios summing to 1")
    return parts


def _existing(path):
    if path is not None and not os.path.exists(path):
        raise FileNotFoundError(path)
    return path


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_cases_for(network, path):
    cases = read_cases(_existing(path))
    problems = fact_id_mismatches(network.input_ids, cases)
    if problems:
        raise Findings(
            f"{len(problems)} fact-id mismatches between network and data; first 10:\n  "
            + "\n  ".join(problems[:10])
        )
    return cases


# -- commands -----------------------------------------------------------


def cmd_validate(args):
    network = load(_existing(args.network), check=False)
    report = validate(network)
    print(report)
    return EXIT_OK if report.clean else EXIT_FINDINGS


def cmd_build(args):
    kind = KINDS[args.kind]
    network = phishing.build_phish_network() if kind == "phish" else liar.build_liar_network()
    if args.out in (None, "-"):
        from .network import dumps

        sys.stdout.write(dumps(network))
    else:
        save(network, args.out)
    return EXIT_OK


def cmd_preprocess(args):
    kind = KINDS[args.kind]
    for path in args.data:
        _existing(path)
    if kind == "phish":
        if len(args.data) != 1:
            raise UsageError("phishing preprocessing takes one --data CSV")
        sizes = phishing.preprocess_phish(args.data[0], args.out, seed=args.seed,
                                          ratios=args.ratios)
        print(f"records {sizes['records']} (rejected {sizes['rejected']})")
    else:
        if len(args.data) not in (1, 3):
            raise UsageError("fake-news preprocessing takes a directory or three CSVs")
        source = args.data[0] if len(args.data) == 1 else args.data
        sizes = liar.preprocess_liar(source, args.out)
    print(f"train {sizes['train']} / test {sizes['test']} / validation {sizes['validation']}")
    return EXIT_OK


def cmd_train(args):
    network = load(_existing(args.network))
    cases = _load_cases_for(network, args.data)
    config = TrainConfig(
        velocity=args.velocity,
        epochs=args.epochs,
        distribution=args.distribution,
        shuffle_seed=args.seed,
        stop_tolerance=args.stop_tolerance,
    )
    trained, history = train(network, cases, config)
    os.makedirs(args.out, exist_ok=True)
    save(trained, os.path.join(args.out, "network.json"))
    history.to_csv(os.path.join(args.out, "history.csv"))
    print(
        f"{history.epochs_run} epochs, {history.cases_seen} cases, "
        f"final epoch MAE {history.epoch_mae[-1]:.6f}"
    )
    return EXIT_OK


def cmd_eval(args):
    network = load(_existing(args.network))
    cases = _load_cases_for(network, args.data)
    metrics = score_split(network, cases, args.threshold)
    text = metrics.to_json() if args.format == "json" else metrics.to_text()
    if args.out and os.path.isdir(args.out):
        _write_text(os.path.join(args.out, "metrics.json"), metrics.to_json())
        sys.stdout.write(text)
    else:
        _write_text(args.out, text)
    return EXIT_OK


def cmd_predict(args):
    network = load(_existing(args.network))
    cases = _load_cases_for(network, args.data)
    outputs = predict(network, cases)
    lines = [
        json.dumps({"index": i, "output": float(y), "positive": bool(y >= args.threshold)})
        for i, y in enumerate(outputs)
    ]
    _write_text(args.out, "".join(line + "\n" for line in lines))
    return EXIT_OK


def cmd_explain(args):
    network = load(_existing(args.network))
    cases = _load_cases_for(network, args.data)
    if not 0 <= args.case_index < len(cases):
        raise UsageError(f"--case-index must lie in [0, {len(cases)})")
    trace = explain(network, cases[args.case_index].inputs)
    _write_text(args.out, trace.to_json() if args.format == "json" else trace.to_text())
    return EXIT_OK


def cmd_gen_synthetic(args):
    shape = ShapeSpec(args.inputs, args.rules, args.cases + args.holdout, args.topology)
    truth, cases = generate_perfect_system(shape, args.seed)
    os.makedirs(args.out, exist_ok=True)
    save(truth, os.path.join(args.out, "truth.json"))
    save(randomize_weights(truth, [args.seed, 1]), os.path.join(args.out, "start.json"))
    write_cases(os.path.join(args.out, "train.jsonl"), cases[: args.cases])
    write_cases(os.path.join(args.out, "holdout.jsonl"), cases[args.cases:])
    print(f"{len(truth.rules)} rules, {args.cases} training cases, {args.holdout} held out")
    return EXIT_OK


def _run_result(directory):
    network = load(_existing(os.path.join(directory, "network.json")))
    history = metrics = None
    hist_path = os.path.join(directory, "history.csv")
    if os.path.exists(hist_path):
        history = TrainHistory.from_csv(hist_path)
    metrics_path = os.path.join(directory, "metrics.json")
    if os.path.exists(metrics_path):
        with open(metrics_path, encoding="utf-8") as fh:
            metrics = Metrics.from_dict(json.load(fh))
    name = network.metadata.get("name") or os.path.basename(os.path.normpath(directory))
    return DesignResult(name, network, metrics, history)


def cmd_compare(args):
    report = compare_designs(_run_result(args.run_a), _run_result(args.run_b))
    text = json.dumps(report, indent=2) + "\n" if args.format == "json" else comparison_markdown(report)
    _write_text(args.out, text)
    return EXIT_OK


# -- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mles", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a network file")
    p.add_argument("network", nargs="?")
    p.add_argument("--network", dest="network_flag")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build", help="write an application network")
    p.add_argument("kind", choices=sorted(KINDS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("preprocess", help="turn a raw corpus into JSON-lines splits")
    p.add_argument("kind", choices=sorted(KINDS))
    p.add_argument("--data", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratios", type=_ratios, default=(0.70, 0.15, 0.15))
    p.set_defaults(func=cmd_preprocess)

    def network_and_data(p):
        p.add_argument("--network", required=True)
        p.add_argument("--data", required=True)

    p = sub.add_parser("train", help="refine rule weights")
    network_and_data(p)
    p.add_argument("--out", required=True)
    p.add_argument("--velocity", type=_velocity, default=0.1)
    p.add_argument("--epochs", type=_positive_int, default=1)
    p.add_argument("--distribution", choices=["uniform", "flat"], default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stop-tolerance", type=float, default=0.0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a network on labeled cases")
    network_and_data(p)
    p.add_argument("--threshold", type=_unit, default=0.5)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="network output per case")
    network_and_data(p)
    p.add_argument("--threshold", type=_unit, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", help="influence trace for one case")
    network_and_data(p)
    p.add_argument("--case-index", type=int, default=0)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("gen-synthetic", help="ground-truth network and cases")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inputs", type=_positive_int, default=10)
    p.add_argument("--rules", type=_positive_int, default=9)
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--holdout", type=int, default=200)
    p.add_argument("--topology", choices=["dag", "chain"], default="dag")
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("compare", help="compare two training runs")
    p.add_argument("run_a")
    p.add_argument("run_b")
    p.add_argument("--format", choices=["json", "markdown"], default="markdown")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "validate":
        args.network = args.network_flag or args.network
        if not args.network:
            parser.error("validate needs a network path")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, HeaderMismatch, FileNotFoundError, IsADirectoryError) as exc:
        print(f"mles: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (Findings, MLESError) as exc:
        print(f"mles: {exc}", file=sys.stderr)
        return EXIT_FINDINGS


if __name__ == "__main__":
    sys.exit(main())
