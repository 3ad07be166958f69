"""paraac-lab command line.

Exit codes: 0 success, 1 a checked assertion failed, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .circuits import load_circuit
from .colorcoding import find_injective_hash, hash_value
from .decision_trees import dt_depth_v
from .experiments import (
    DEFAULT_SEED,
    DEFAULT_SWITCHING,
    ConfigError,
    ExperimentConfig,
    cmd_gap,
    cmd_planted,
    cmd_switching,
    cmd_verify,
)
from .graphs import format_graph, parse_graph
from .random_models import sample_er, sample_planted
from .reductions import reduce_clique_to_ds
from .restrictions import EdgeFunction, Restriction, restrict_function
from .rng import RngStream

log = logging.getLogger("paraac_lab")

DEFAULT_TRIALS = {"planted": 10_000, "switching": 10_000, "verify": 1, "gap": 1_000}


def _load_config(args) -> dict:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            doc[key] = json.loads(value)
        except json.JSONDecodeError:
            doc[key] = value
    return doc


def _experiment(args, command: str) -> ExperimentConfig:
    doc = _load_config(args)
    seed = args.seed if args.seed is not None else int(doc.pop("seed", DEFAULT_SEED))
    doc.pop("seed", None)
    trials = args.trials if args.trials is not None else int(doc.pop("trials", DEFAULT_TRIALS[command]))
    doc.pop("trials", None)
    out = args.out if args.out is not None else doc.pop("out", None)
    doc.pop("out", None)
    if command == "switching" and not doc:
        doc = dict(DEFAULT_SWITCHING)
    return ExperimentConfig(command, doc, seed, trials, out)


def _emit(text: str, cfg: ExperimentConfig) -> None:
    if not cfg.output_path:
        sys.stdout.write(text)


def run_planted(args) -> int:
    cfg = _experiment(args, "planted")
    if args.workers:
        cfg.params["workers"] = args.workers
    text, code = cmd_planted(cfg)
    _emit(text, cfg)
    return code


def run_switching(args) -> int:
    cfg = _experiment(args, "switching")
    text, code = cmd_switching(cfg)
    _emit(text, cfg)
    return code


def run_verify(args) -> int:
    cfg = _experiment(args, "verify")
    text, code = cmd_verify(cfg)
    _emit(text, cfg)
    return code


def run_gap(args) -> int:
    cfg = _experiment(args, "gap")
    text, code = cmd_gap(cfg)
    if args.out is None and cfg.output_path is None:
        log.info("instances written to ./gap_out")
    return code


def run_colorcode(args) -> int:
    try:
        xs = sorted(int(x) for x in args.set_elements.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"--elements must be comma-separated integers, got {args.set_elements!r}") from None
    k = args.k if args.k is not None else len(xs)
    cfg = ExperimentConfig("colorcode", {"n": args.n, "k": k, "set": xs}, args.seed or 0, 1, args.out)
    params = find_injective_hash(xs, k, args.n)
    doc = {"header": cfg.header(), "n": args.n, "k": k, "set": xs, "found": params is not None}
    if params is not None:
        doc.update(p=params.p, q=params.q, hashes=[hash_value(params, x) for x in xs])
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    _write_or_print(text, args.out)
    return 0 if params is not None else 1


def run_reduce(args) -> int:
    g = parse_graph(Path(args.graph).read_text())
    if args.k is None:
        raise ConfigError("reduce needs --k")
    inst = reduce_clique_to_ds(g, args.k)
    cfg = ExperimentConfig("reduce", {"graph": format_graph(g), "k": args.k}, args.seed or 0, 1, args.out)
    prefix = Path(args.out or "instance")
    graph_path = prefix.with_name(prefix.name + ".graph")
    side_path = prefix.with_name(prefix.name + ".labels.json")
    graph_path.write_text(cfg.header_line() + format_graph(inst.graph))
    side = json.loads(inst.sidecar_json())
    side["header"] = cfg.header()
    side_path.write_text(json.dumps(side, indent=1, sort_keys=True) + "\n")
    print(f"{graph_path} {side_path} target_size={inst.target_size} vertices={inst.graph.n}")
    return 0


def run_sample(args) -> int:
    if args.n is None or args.p is None:
        raise ConfigError("sample needs --n and --p")
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    params = {"n": args.n, "p": args.p, "c": args.c}
    cfg = ExperimentConfig("sample", params, seed, 1, args.out)
    header = cfg.header()
    rng = RngStream(seed)
    if args.c is None:
        g = sample_er(args.n, args.p, rng)
    else:
        s = sample_planted(args.n, args.p, args.c, rng)
        g = s.planted_graph
        header["planted_set"] = list(s.planted_set)
    text = "# " + json.dumps(header, sort_keys=True) + "\n" + format_graph(g)
    _write_or_print(text, args.out)
    return 0


def run_dtdepth(args) -> int:
    if not args.circuit:
        raise ConfigError("dtdepth needs --circuit")
    c = load_circuit(Path(args.circuit).read_text())
    if args.restriction:
        mu = Restriction.from_dict(json.loads(Path(args.restriction).read_text()))
        f = restrict_function(c, mu)
    else:
        f = EdgeFunction.from_circuit(c)
    print(dt_depth_v(f))
    return 0


def _write_or_print(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "planted": run_planted,
    "switching": run_switching,
    "verify": run_verify,
    "gap": run_gap,
    "colorcode": run_colorcode,
    "reduce": run_reduce,
    "sample": run_sample,
    "dtdepth": run_dtdepth,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paraac-lab", description="Experiments on parameterized AC0 clique problems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
        p.add_argument("--trials", type=int)
        p.add_argument("--out", help="output path (directory for gap, prefix for reduce)")
        p.add_argument("--set", action="append", metavar="KEY=JSON", help="override a config parameter")
        if name == "planted":
            p.add_argument("--workers", type=int, default=0)
        if name in ("colorcode", "sample"):
            p.add_argument("--n", type=int, required=name == "colorcode")
        if name in ("colorcode", "reduce"):
            p.add_argument("--k", type=int)
        if name == "colorcode":
            p.add_argument("--elements", dest="set_elements", required=True, help="comma-separated subset of [n]")
        if name == "sample":
            p.add_argument("--p", type=float)
            p.add_argument("--c", type=int, help="plant a clique of this size")
        if name == "reduce":
            p.add_argument("--graph", required=True)
        if name == "dtdepth":
            p.add_argument("--circuit")
            p.add_argument("--restriction")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"paraac-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
