"""Experiment drivers behind the CLI.

Every driver is deterministic in (config, master_seed): trial t of a run draws
from its own RngStream keyed by t, and per-trial results are reduced with
order-independent sums, so serial and parallel runs emit identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from . import formulas
from .circuits import ZOO, circuit_from_dict, eval_circuit, zoo_circuit
from .colorcoding import count_oracle, distinct_witness_decide
from .decision_trees import CSV_FIELDS, TailResult, switching_tail
from .graphs import (
    Graph,
    _triu,
    all_graphs,
    format_graph,
    has_clique,
    max_clique_size,
)
from .random_models import planted_edge_marginal, planted_vectors
from .reductions import verify_equivalence
from .rng import RngStream
from .stats import wilson_interval

log = logging.getLogger(__name__)

DEFAULT_SEED = 20160704


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    master_seed: int = DEFAULT_SEED
    trials: int = 1
    output_path: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def canonical(self) -> dict:
        return {"command": self.command, "params": self.params, "seed": self.master_seed, "trials": self.trials}

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def header(self) -> dict:
        return {"tool": "paraac-lab", "version": __version__, "config_sha256": self.digest(), "seed": self.master_seed}

    def header_line(self) -> str:
        return "# " + json.dumps(self.header(), sort_keys=True) + "\n"


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    return repr(x) if isinstance(x, float) else str(x)


def _write_csv(path, cfg: ExperimentConfig, header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    buf.write(cfg.header_line())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path:
        Path(path).write_text(text)
    return text


# -- parameter schedules ----------------------------------------------------------


def k_of_n(spec, n: int, position: int = 0) -> float:
    """k(n) from a schedule spec: "log2", "sqrt_log2", {"const": c} or {"explicit": [...]}."""
    if spec == "log2":
        return math.log2(n)
    if spec == "sqrt_log2":
        return float(math.ceil(math.sqrt(math.log2(n))))
    if isinstance(spec, dict) and "const" in spec:
        c = float(spec["const"])
        if c <= 0:
            raise ConfigError("constant k must be positive")
        return c
    if isinstance(spec, dict) and "explicit" in spec:
        values = spec["explicit"]
        if position >= len(values):
            raise ConfigError("explicit k schedule shorter than the n list")
        return float(values[position])
    raise ConfigError(f"unknown k_schedule {spec!r}")


def rho_function(spec):
    """rho(k) from {"const": c}, {"power": a} (rho = k^a) or {"table": {k: value}}.

    Tables are interpolated linearly; a step function would make k/rho(k)
    drop at every step.
    """
    if isinstance(spec, dict) and "const" in spec:
        c = float(spec["const"])
        return lambda k: np.full_like(np.asarray(k, dtype=float), c)
    if isinstance(spec, dict) and "power" in spec:
        a = float(spec["power"])
        return lambda k: np.asarray(k, dtype=float) ** a
    if isinstance(spec, dict) and "table" in spec:
        items = sorted((int(k), float(v)) for k, v in spec["table"].items())
        if not items:
            raise ConfigError("empty rho table")
        keys = np.array([k for k, _ in items], dtype=float)
        vals = np.array([v for _, v in items])

        def rho(k):
            # piecewise linear between keys, flat after the last one
            k = np.asarray(k, dtype=float)
            if np.any(k < keys[0]):
                raise ConfigError("rho table does not cover k")
            return np.interp(k, keys, vals)

        return rho
    raise ConfigError(f"unknown rho spec {spec!r}")


def validate_rho(spec, grid_max: int = 10**6) -> None:
    rho = rho_function(spec)
    lo = 1
    if isinstance(spec, dict) and "table" in spec:
        lo = min(int(k) for k in spec["table"])
    ks = np.arange(lo, grid_max + 1, dtype=float)
    r = rho(ks)
    if np.any(r < 1):
        raise ConfigError("rho must take values >= 1")
    ratio = ks / r
    if np.any(np.diff(ratio) < -1e-12 * ratio[1:]):
        raise ConfigError("k / rho(k) must be nondecreasing")
    if not ratio[-1] > ratio[min(999, len(ratio) - 1)]:
        raise ConfigError("k / rho(k) must be unbounded")


def growth_function(spec):
    if spec == "exp2":
        return lambda x: 2**x
    if isinstance(spec, dict) and "power" in spec:
        t = int(spec["power"])
        if t < 1:
            raise ConfigError("power must be at least 1")
        return lambda x: x**t
    raise ConfigError(f"unknown f spec {spec!r}")


def f_inverse(spec, n: int) -> int:
    """max({l : f(l) <= n} ∪ {0}) for nondecreasing f."""
    f = growth_function(spec)
    best = 0
    ell = 1
    while f(ell) <= n:
        best = ell
        ell += 1
    return best


# -- planted indistinguishability -------------------------------------------------

PLANTED_FIELDS = ["circuit", "n", "k", "c", "q", "trials", "agreement", "wilson_lo", "wilson_hi", "seed"]
DEFAULT_CIRCUITS = ["const", "edge_probe", "triangle", "star", "clique_probe"]


def _adjacency(n: int, vec: np.ndarray) -> np.ndarray:
    a = np.zeros((n, n), dtype=bool)
    r, c = _triu(n)
    a[r, c] = vec
    return a | a.T


def _planted_chunk(n: int, q: float, c: int, names: tuple[str, ...], extra: tuple, seed: int,
                   trials: range) -> list[int]:
    agree = [0] * (len(names) + len(extra))
    fast = [ZOO[name].fast for name in names]
    for t in trials:
        gen = RngStream(seed, t, (n,)).generator()
        base, a, planted = planted_vectors(n, q, c, gen)
        adj_g = _adjacency(n, base)
        adj_h = adj_g.copy()
        if c >= 2:
            idx = np.asarray(a) - 1
            adj_h[np.ix_(idx, idx)] = True
            adj_h[idx, idx] = False
        for i, fn in enumerate(fast):
            if fn(adj_g, base) == fn(adj_h, planted):
                agree[i] += 1
        if extra:
            g = Graph.from_edge_vector(n, base)
            h = Graph.from_edge_vector(n, planted)
            for j, circ in enumerate(extra):
                if eval_circuit(circ, g) == eval_circuit(circ, h):
                    agree[len(names) + j] += 1
    return agree


def _run_chunks(fn, trials: int, workers: int) -> list[int]:
    if workers <= 1:
        return fn(range(trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    chunks = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(fn, chunks))
    return [sum(col) for col in zip(*parts)]


@dataclass(frozen=True)
class AgreementRow:
    circuit: str
    n: int
    k: float
    c: int
    q: float
    trials: int
    agree: int
    wilson_lo: float
    wilson_hi: float
    seed: int

    @property
    def agreement(self) -> float:
        return self.agree / self.trials

    def csv_row(self) -> list[str]:
        return [self.circuit, str(self.n), fmt(self.k), str(self.c), fmt(self.q), str(self.trials),
                fmt(self.agreement), fmt(self.wilson_lo), fmt(self.wilson_hi), str(self.seed)]


def planted_agreement(cfg: ExperimentConfig) -> list[AgreementRow]:
    p = cfg.params
    ns = [int(x) for x in p.get("n", [32, 64, 128, 256])]
    xi = float(p.get("xi", 0.5))
    if not 0 <= xi < 1:
        raise ConfigError("xi must lie in [0, 1)")
    spec = p.get("k_schedule", "sqrt_log2")
    names = list(p.get("circuits", DEFAULT_CIRCUITS))
    for name in names:
        if name not in ZOO:
            raise ConfigError(f"unknown zoo circuit {name!r}")
    files = {str(k): str(v) for k, v in p.get("circuit_files", {}).items()}
    loaded = {name: circuit_from_dict(json.loads(Path(path).read_text())) for name, path in files.items()}
    workers = int(p.get("workers", 1))
    rows = []
    for pos, n in enumerate(ns):
        k = k_of_n(spec, n, pos)
        q = n ** (-1.0 / k)
        c = min(n, math.ceil(n**xi))
        usable = tuple(name for name in names if n >= ZOO[name].min_n)
        extra_names = tuple(name for name, circ in loaded.items() if circ.n_vertices == n)
        extra = tuple(loaded[name] for name in extra_names)
        fn = partial(_planted_chunk, n, q, c, usable, extra, cfg.master_seed)
        counts = _run_chunks(fn, cfg.trials, workers)
        for name, agree in zip(usable + extra_names, counts):
            lo, hi = wilson_interval(agree, cfg.trials)
            rows.append(AgreementRow(name, n, k, c, q, cfg.trials, agree, lo, hi, cfg.master_seed))
        log.info("planted n=%d k=%s c=%d done", n, fmt(k), c)
    return rows


def edge_probe_exact(n: int, q: float, c: int) -> float:
    """Pr[edge {1,2} in G equals edge {1,2} in G + C(A)]."""
    return 1 - (1 - q) * planted_edge_marginal(n, 0.0, c)


def cmd_planted(cfg: ExperimentConfig) -> tuple[str, int]:
    rows = planted_agreement(cfg)
    text = _write_csv(cfg.output_path, cfg, PLANTED_FIELDS, [r.csv_row() for r in rows])
    return text, 0


# -- switching sweep -----------------------------------------------------------------

SWITCHING_FIELDS = ["function", *CSV_FIELDS]

DEFAULT_SWITCHING = {
    "rows": [
        {"function": "triangle", "n": 12, "ell": 4, "q": 0.25, "s": 2},
        {"function": "edge_probe", "n": 64, "ell": 2, "q": 0.5, "s": 1},
        {"function": "edge_probe", "n": 48, "ell": 2, "q": 0.5, "s": 1},
        {"function": "edge_probe", "n": 8, "ell": 3, "q": 0.5, "s": 1},
        {"function": "edge_probe", "n": 96, "ell": 3, "q": 0.5, "s": 2},
        {"function": "triangle_probe", "n": 200, "ell": 2, "q": 0.5, "s": 1},
        {"function": "triangle_probe", "n": 10, "ell": 4, "q": 0.5, "s": 1},
        {"function": "star", "n": 16, "ell": 4, "q": 0.25, "s": 2},
        {"function": "clique_probe", "n": 12, "ell": 5, "q": 0.5, "s": 3},
    ]
}


def switching_rows(params: dict) -> list[dict]:
    if "grid" in params:
        grid = params["grid"]
        keys = ["function", "n", "ell", "q", "s"]
        missing = [k for k in keys if k not in grid]
        if missing:
            raise ConfigError(f"grid is missing axes {missing}")
        return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
    return list(params.get("rows", []))


def _switching_function(name: str, n: int):
    if name.startswith("circuit:"):
        circ = circuit_from_dict(json.loads(Path(name[len("circuit:"):]).read_text()))
        if circ.n_vertices != n:
            raise ConfigError(f"{name} is over n={circ.n_vertices}, row asks n={n}")
        return circ
    return zoo_circuit(name, n)


def switching_sweep(cfg: ExperimentConfig) -> list[tuple[str, TailResult]]:
    out = []
    for i, row in enumerate(switching_rows(cfg.params)):
        try:
            n, ell, q, s = int(row["n"]), int(row["ell"]), float(row["q"]), int(row["s"])
            name = str(row["function"])
        except KeyError as exc:
            raise ConfigError(f"switching row {i} lacks {exc}") from None
        f = _switching_function(name, n)
        res = switching_tail(n, ell, q, f, s, cfg.trials, RngStream(cfg.master_seed, i), r=row.get("r"))
        out.append((name, res))
        log.info("switching row %d (%s n=%d ell=%d) tail=%s bound=%s", i, name, n, ell, res.empirical_tail,
                 res.beame_bound)
    return out


def cmd_switching(cfg: ExperimentConfig) -> tuple[str, int]:
    results = switching_sweep(cfg)
    text = _write_csv(cfg.output_path, cfg, SWITCHING_FIELDS, [[name, *res.csv_row()] for name, res in results])
    bad = [name for name, res in results if not res.consistent]
    return text, 1 if bad else 0


# -- verification suites ------------------------------------------------------------

DEFAULT_VERIFY = {
    "suites": {
        "reduction": {"n": 4, "ks": [2, 3]},
        "weighted_sat": {"n": 4, "k_max": 4},
        "gamma11": {"vars": 6},
        "colorcoding": {"universe": 16, "predicates": 200, "k_max": 8},
    }
}


def _suite_reduction(opts: dict, cfg: ExperimentConfig) -> dict:
    mode = opts.get("mode", "exhaustive")
    rep = verify_equivalence(int(opts.get("n", 4)), opts.get("ks", [2, 3]), mode, int(opts.get("count", 0)),
                             RngStream(cfg.master_seed, 1))
    log.info("reduction suite took %.2fs", rep.elapsed)
    return {"checked": rep.checked, "mismatches": len(rep.mismatches), "details": rep.mismatches[:10]}


def _suite_weighted_sat(opts: dict, cfg: ExperimentConfig) -> dict:
    n = int(opts.get("n", 4))
    k_max = int(opts.get("k_max", n))
    checked = 0
    bad = []
    for g in all_graphs(n):
        delta = formulas.build_delta_g(g)
        for k in range(k_max + 1):
            checked += 1
            if has_clique(g, k) != formulas.weighted_sat_bruteforce(delta, k):
                bad.append({"edges": list(g.edges()), "k": k})
    return {"checked": checked, "mismatches": len(bad), "details": bad[:10]}


def gamma11_patterns(nvars: int):
    """Every conjunction of literals where each variable is positive, negative or absent."""
    for pattern in itertools.product((0, 1, 2), repeat=nvars):
        lits = []
        for i, kind in enumerate(pattern, start=1):
            if kind == 1:
                lits.append(formulas.pos(f"x{i}"))
            elif kind == 2:
                lits.append(formulas.neg(f"x{i}"))
        yield formulas.And(tuple(lits))


def _suite_gamma11(opts: dict, cfg: ExperimentConfig) -> dict:
    nvars = int(opts.get("vars", 6))
    k_max = int(opts.get("k_max", nvars))
    checked = 0
    bad = []
    for f in gamma11_patterns(nvars):
        weights = formulas.satisfying_weights(f)
        for k in range(k_max + 1):
            checked += 1
            if formulas.gamma11_decide(f, k) != (k in weights):
                bad.append({"formula": formulas.format_formula(f), "k": k})
    return {"checked": checked, "mismatches": len(bad), "details": bad[:10]}


def _suite_colorcoding(opts: dict, cfg: ExperimentConfig) -> dict:
    universe = int(opts.get("universe", 16))
    count = int(opts.get("predicates", 200))
    k_max = int(opts.get("k_max", 8))
    rnd = random.Random(cfg.master_seed)
    checked = 0
    bad = []
    for _ in range(count):
        n = rnd.randint(1, universe)
        members = frozenset(u for u in range(1, n + 1) if rnd.random() < rnd.random())
        for k in range(k_max + 1):
            checked += 1
            if distinct_witness_decide(n, members.__contains__, k) != count_oracle(n, members.__contains__, k):
                bad.append({"n": n, "set": sorted(members), "k": k})
    return {"checked": checked, "mismatches": len(bad), "details": bad[:10]}


SUITES = {
    "reduction": _suite_reduction,
    "weighted_sat": _suite_weighted_sat,
    "gamma11": _suite_gamma11,
    "colorcoding": _suite_colorcoding,
}


def run_verify(cfg: ExperimentConfig) -> dict:
    suites = cfg.params.get("suites", DEFAULT_VERIFY["suites"])
    if isinstance(suites, list):
        suites = {name: {} for name in suites}
    report: dict[str, Any] = {"header": cfg.header(), "suites": {}}
    if not suites:
        log.warning("verify: empty scope, nothing checked")
        report["warning"] = "empty scope: vacuous pass"
    for name, opts in suites.items():
        if name not in SUITES:
            raise ConfigError(f"unknown verify suite {name!r}")
        res = SUITES[name](opts or {}, cfg)
        res["pass"] = res["mismatches"] == 0
        report["suites"][name] = res
    report["all_pass"] = all(s["pass"] for s in report["suites"].values())
    return report


def cmd_verify(cfg: ExperimentConfig) -> tuple[str, int]:
    report = run_verify(cfg)
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    return text, 0 if report["all_pass"] else 1


# -- gap clique instances -----------------------------------------------------------


def gap_parameter(n: int, f_spec, rho_spec) -> int:
    """Largest k >= 1 with 2k+1 <= min(f^-1(n), sqrt(n)/rho(sqrt(n))) and k <= log2 n."""
    validate_rho(rho_spec)
    rho = rho_function(rho_spec)
    root = math.sqrt(n)
    limit = min(f_inverse(f_spec, n), root / float(rho(root)))
    k = math.floor((limit - 1) / 2)
    k = min(k, math.floor(math.log2(n)))
    if k < 1:
        raise ConfigError(f"no k >= 1 satisfies 2k+1 <= {limit:.3f} at n={n}")
    return k


@dataclass
class GapSample:
    index: int
    planted_set: list[int]
    planted_certified: bool
    cn_planted: int | None
    cn_base: int | None
    base_reaches_threshold: bool

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "planted_set": self.planted_set,
            "planted_certified": self.planted_certified,
            "cn_planted": self.cn_planted,
            "cn_base": self.cn_base,
            "base_reaches_threshold": self.base_reaches_threshold,
        }


def gap_instances(n: int, f_spec, rho_spec, samples: int, seed: int, exact_samples: int | None = None):
    """Sample gap pairs; the first ``exact_samples`` (default all) get exact clique numbers."""
    k = gap_parameter(n, f_spec, rho_spec)
    threshold = 2 * k + 1
    c = math.ceil(math.sqrt(n))
    q = n ** (-1.0 / k)
    results = []
    graphs = []
    for i in range(samples):
        base, a, planted = planted_vectors(n, q, c, RngStream(seed, i).generator())
        g = Graph.from_edge_vector(n, base)
        h = Graph.from_edge_vector(n, planted)
        exact = exact_samples is None or i < exact_samples
        cn_h = max_clique_size(h) if exact else None
        cn_g = max_clique_size(g) if exact else None
        certified = (cn_h >= c) if exact else has_clique(h, c)
        reaches = (cn_g >= threshold) if exact else has_clique(g, threshold)
        results.append(GapSample(i, a, certified, cn_h, cn_g, reaches))
        if i == 0:
            graphs = [h, g]
    return {"k": k, "threshold": threshold, "planted_size": c, "edge_probability": q}, results, graphs


def cmd_gap(cfg: ExperimentConfig) -> tuple[str, int]:
    p = cfg.params
    n = int(p.get("n", 256))
    f_spec = p.get("f", "exp2")
    rho_spec = p.get("rho", {"const": 1})
    samples = int(p.get("samples", cfg.trials))
    exact = p.get("exact_samples")
    info, results, graphs = gap_instances(n, f_spec, rho_spec, samples, cfg.master_seed,
                                          None if exact is None else int(exact))
    out = Path(cfg.output_path or "gap_out")
    out.mkdir(parents=True, exist_ok=True)
    head = cfg.header_line()
    yes, no = graphs
    (out / "yes.graph").write_text(head + format_graph(yes))
    (out / "no.graph").write_text(head + format_graph(no))
    reach = sum(r.base_reaches_threshold for r in results)
    manifest = {
        "header": cfg.header(),
        "n": n,
        "f": f_spec,
        "rho": rho_spec,
        **info,
        "f_inverse": f_inverse(f_spec, n),
        "yes_instance": {"file": "yes.graph", "k": info["threshold"]},
        "no_instance": {"file": "no.graph", "k": info["threshold"]},
        "samples": len(results),
        "all_planted_certified": all(r.planted_certified for r in results),
        "fraction_base_reaches_threshold": reach / len(results),
        "base_reaches_threshold_wilson99": list(wilson_interval(reach, len(results))),
        "records": [r.as_dict() for r in results],
    }
    text = json.dumps(manifest, indent=1, sort_keys=True) + "\n"
    (out / "manifest.json").write_text(text)
    return text, 0 if manifest["all_planted_certified"] else 1
