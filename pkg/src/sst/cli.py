"""Command-line entry point: ``sst <subcommand> ...``."""

from __future__ import annotations

import argparse
import io as _io
import json
import logging
import sys
from pathlib import Path

from .counter import CounterConfig, count_transitions, default_threads
from .generators import barabasi_albert_stream
from .graph import GraphChange, InvalidArgument, InvalidChange
from .io import ParseError, load_static, load_temporal, write_temporal
from .labeler import LabelRegistry, TransitionLabeler
from .predictor import (StaticTrainConfig, TemporalTrainConfig, interpret, run_static_lp,
                        run_temporal_lp, static_baselines, temporal_baselines, to_dot,
                        version_string, write_interpretation, write_outputs)
from .svm import LinearModel


class ConfigError(ValueError):
    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path
        self.message = message


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so usage errors become JSON."""

    def error(self, message):
        raise ConfigError(self.prog, message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file supplying defaults; flags override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--dataset", help="dataset name for the report")
    p.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sst", description="Subgraph-to-subgraph transition tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("static-lp", help="static link prediction on an edge list")
    _add_common(p)
    p.add_argument("--graph", required=False)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--alpha", type=int, default=10)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--tune-C", action="store_true", help="pick C on the validation split")
    p.add_argument("--no-baselines", action="store_true")

    p = sub.add_parser("temporal-lp", help="temporal link prediction on a timestamped stream")
    _add_common(p)
    p.add_argument("--stream", default="-", help="timestamped edge list, '-' for stdin")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--tau", type=int, default=10)
    p.add_argument("--base-buckets", type=int, default=None, help="default: tau - 2")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--no-baselines", action="store_true")

    p = sub.add_parser("interpret", help="rank SSTs of a saved model")
    _add_common(p)
    p.add_argument("--model", required=False)
    p.add_argument("--top", type=int, default=12)

    p = sub.add_parser("generate-ba", help="preferential-attachment stream to stdout")
    _add_common(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=2)

    p = sub.add_parser("enumerate", help="SST vector of a single change as JSON")
    _add_common(p)
    p.add_argument("--graph", required=False)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--k", type=int, default=3)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--add-edge", nargs=2, metavar=("U", "V"))
    group.add_argument("--delete-edge", nargs=2, metavar=("U", "V"))
    group.add_argument("--delete-node", metavar="X")

    p = sub.add_parser("eval-baselines", help="common-neighbors and random baselines")
    _add_common(p)
    p.add_argument("--mode", choices=["static", "temporal"], default="static")
    p.add_argument("--graph")
    p.add_argument("--stream")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--tau", type=int, default=10)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError("config", str(exc)) from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config:{n}", f"expected key=value, got {line!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _coerce(parser_action: argparse.Action, raw: str, field_path: str):
    if parser_action.nargs == 0:  # store_true
        low = raw.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(field_path, f"expected a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    if parser_action.type is None:
        return raw
    try:
        return parser_action.type(raw)
    except ValueError:
        raise ConfigError(field_path, f"invalid value {raw!r}") from None


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        actions = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, raw in read_config(args.config).items():
            if key not in actions or key in ("help", "config"):
                raise ConfigError(f"config.{key}", "unknown setting")
            defaults[key] = _coerce(actions[key], raw, f"config.{key}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _fail(kind: str, message: str, field_path: str | None = None, code: int = 2) -> int:
    err = {"error": {"type": kind, "message": message}}
    if field_path:
        err["error"]["field"] = field_path
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    return code


def _require(args, name: str) -> str:
    value = getattr(args, name)
    if not value:
        raise ConfigError(name, "is required")
    return value


def _run_config(args) -> dict:
    skip = {"config", "out", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _threads(args) -> int:
    t = args.threads if args.threads is not None else default_threads()
    if t < 1:
        raise ConfigError("threads", "must be positive")
    return t


def _summary(report) -> str:
    line = f"{report.dataset} {report.mode} k={report.k} seed={report.seed}: auc={report.auc:.4f} aupr3={report.aupr3:.4f}"
    for name, vals in sorted(report.baselines.items()):
        line += f" | {name} auc={vals['auc']:.4f} aupr3={vals['aupr3']:.4f}"
    return line


def _finish(result, args) -> None:
    result.report.config["run"] = _run_config(args)
    if args.out:
        write_outputs(result, args.out)
    print(_summary(result.report))


def _load_stream(path: str, directed: bool):
    if path == "-":
        return load_temporal(_io.StringIO(sys.stdin.read()), directed)
    return load_temporal(path, directed)


def cmd_static_lp(args) -> None:
    path = _require(args, "graph")
    cfg = StaticTrainConfig(k=args.k, alpha=args.alpha, seed=args.seed, C=args.C, epochs=args.epochs,
                            tune_C=args.tune_C, baselines=not args.no_baselines, threads=_threads(args))
    g = load_static(path, args.directed)
    _finish(run_static_lp(g, cfg, args.dataset or Path(path).stem), args)


def cmd_temporal_lp(args) -> None:
    stream = _load_stream(args.stream, not args.undirected)
    base = args.base_buckets if args.base_buckets is not None else args.tau - 2
    cfg = TemporalTrainConfig(k=args.k, tau=args.tau, base_buckets=base, seed=args.seed, C=args.C,
                              epochs=args.epochs, baselines=not args.no_baselines, threads=_threads(args))
    name = args.dataset or ("stdin" if args.stream == "-" else Path(args.stream).stem)
    _finish(run_temporal_lp(stream, cfg, name), args)


def cmd_interpret(args) -> None:
    model = LinearModel.load(_require(args, "model"))
    rows = interpret(model)
    if args.out:
        out = Path(args.out)
        (out / "ssts").mkdir(parents=True, exist_ok=True)
        write_interpretation(rows, out / "interpretation.csv")
        for row in rows[:args.top]:
            (out / "ssts" / f"sst_{row.rank:03d}.dot").write_text(
                to_dot(row.H, f"rank {row.rank} weight {row.weight:+.3f}"))
    for row in rows[:args.top]:
        print(f"{row.rank:3d} {row.weight:+.3f} {row.decode}")


def cmd_generate_ba(args) -> None:
    stream = barabasi_albert_stream(args.n, args.m, args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            write_temporal(stream, fh)
    else:
        write_temporal(stream, sys.stdout)


def cmd_enumerate(args) -> None:
    g = load_static(_require(args, "graph"), args.directed)
    ids = {lab: i for i, lab in g.labels.items()}

    def node(label: str) -> int:
        if label not in ids:
            raise InvalidArgument(f"node {label!r} not in graph")
        return ids[label]

    if args.add_edge:
        change = GraphChange.edge_addition(*map(node, args.add_edge))
    elif args.delete_edge:
        change = GraphChange.edge_deletion(*map(node, args.delete_edge))
    elif args.delete_node:
        change = GraphChange.node_deletion(g, node(args.delete_node))
    else:
        raise ConfigError("change", "one of --add-edge, --delete-edge, --delete-node is required")
    if change.kind.is_addition and g.has_edge(*change.anchors):
        raise InvalidChange(f"edge {args.add_edge} already present")
    registry = LabelRegistry()
    vec = count_transitions(g, change, CounterConfig(k=args.k), TransitionLabeler((), registry))
    out = vec.to_json(registry)
    out["change"]["labels"] = [g.labels.get(a, str(a)) for a in change.anchors]
    text = json.dumps(out, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "sst_vector.json").write_text(text + "\n")
    print(text)


def cmd_eval_baselines(args) -> None:
    if args.mode == "static":
        path = _require(args, "graph")
        g = load_static(path, args.directed)
        res = static_baselines(g, StaticTrainConfig(seed=args.seed))
        name = args.dataset or Path(path).stem
    else:
        path = _require(args, "stream")
        stream = _load_stream(path, not args.undirected)
        res = temporal_baselines(stream, TemporalTrainConfig(tau=args.tau, base_buckets=args.tau - 2,
                                                             seed=args.seed))
        name = args.dataset or Path(path).stem
    report = {"dataset": name, "mode": args.mode, "seed": args.seed, "baselines": res,
              "config": {"run": _run_config(args)}, "version": version_string()}
    text = json.dumps(report, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "report.json").write_text(text + "\n")
    print(text)


COMMANDS = {
    "static-lp": cmd_static_lp,
    "temporal-lp": cmd_temporal_lp,
    "interpret": cmd_interpret,
    "generate-ba": cmd_generate_ba,
    "enumerate": cmd_enumerate,
    "eval-baselines": cmd_eval_baselines,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        return _fail("config", exc.message, exc.field)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail("config", exc.message, exc.field)
    except ParseError as exc:
        return _fail("parse", str(exc))
    except (InvalidArgument, InvalidChange) as exc:
        return _fail("invalid-argument", str(exc))
    except OSError as exc:
        return _fail("io", str(exc), code=3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
