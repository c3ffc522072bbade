"""Command-line front end.

Subcommands: generate (planted | calibrated | clique-ring | rewire),
detect, qicd, benchmark, mrg. Every command writes a manifest with the
fully resolved configuration; re-running with --from-manifest reproduces
the result files byte for byte. Exit status 0 on success, 1 for usage
errors, 2 for data or domain errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .bench import (
    METHODS,
    ExperimentOptions,
    PlantedSpec,
    calibrate_planted,
    clique_ring_truth,
    degree_preserving_rewire,
    generate_planted,
    mrg_significance,
    ring_of_cliques,
    run_experiment,
)
from .detect import DetectorConfig, leiden, louvain
from .engine import PerturbationKind, QicdConfig, result_to_json, run_qicd, trace_to_csv
from .graph import dump_edge_list, load_edge_list, load_labeled_edge_list
from .partition import modularity, partition_to_csv
from .rng import RNG_NAME, mix
from .sampling import HyperuniformParams
from .stats import summarize, welch_t_test

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

KIND_CHOICES = ("pt", "haar", "hu", "pt-hu", "haar-hu")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _stem(path: str) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix else p


def _write_text(path: Path | str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_graph(config: dict):
    path = config["graph"]
    with open(path, "r", encoding="utf-8") as fh:
        if config.get("relabel"):
            graph, labels = load_labeled_edge_list(fh, merge_duplicates=config.get("merge_duplicates", False))
            sidecar = Path(str(_stem(config["out"])) + ".labels.csv")
            _write_text(sidecar, "node_id,label\n" + "".join(f"{i},{lab}\n" for i, lab in enumerate(labels)))
            return graph
        return load_edge_list(fh, merge_duplicates=config.get("merge_duplicates", False))


def _write_manifest(stem: Path, command: str, config: dict, inputs: dict, outputs: dict, started: float) -> Path:
    manifest = {
        "command": command,
        "tool": "qicd",
        "version": __version__,
        "rng": RNG_NAME,
        "base_seed": config.get("seed"),
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "duration_seconds": time.perf_counter() - started,
    }
    path = Path(str(stem) + ".manifest.json")
    _write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _detector_from(config: dict) -> DetectorConfig:
    return DetectorConfig(
        seed=config["seed"],
        max_levels=config.get("max_levels", 20),
        max_sweeps_per_level=config.get("max_sweeps", 100),
        min_gain=config.get("min_gain", 1e-7),
        resolution=config.get("resolution", 1.0),
        random_ties=config.get("random_ties", False),
    )


def _qicd_config(config: dict) -> QicdConfig:
    return QicdConfig(
        kind=PerturbationKind(config["kind"], config.get("proposal_seeds")),
        iterations=config.get("iterations", 10),
        stall_limit=config.get("stall_limit", 5),
        hu=HyperuniformParams(config.get("alpha", 2.0), config.get("fraction", 0.1)),
        detector=_detector_from(config),
        init_mode=config.get("init_mode", "quick-leiden"),
        base=config.get("base", "leiden"),
        refine_before_accept=config.get("refine_before_accept", False),
        seed=mix(config["seed"], 1),
    )


# ---------------------------------------------------------------- generate


def _emit_graph_files(graph, truth_labels, config, command, started):
    out = Path(config["out"])
    stem = _stem(config["out"])
    _write_text(out, dump_edge_list(graph))
    outputs = {"graph": str(out)}
    if truth_labels is not None:
        truth_path = Path(str(stem) + ".truth.csv")
        _write_text(truth_path, "node_id,community_id\n" + "".join(f"{i},{c}\n" for i, c in enumerate(truth_labels)))
        outputs["truth"] = str(truth_path)
    extra = config.get("_achieved_q")
    manifest = _write_manifest(stem, command, {k: v for k, v in config.items() if not k.startswith("_")},
                               {}, outputs if extra is None else {**outputs, "achieved_q": extra}, started)
    outputs["manifest"] = str(manifest)
    return outputs


def _run_generate_planted(config: dict) -> int:
    started = time.perf_counter()
    spec = PlantedSpec(config["n"], config["k"], config["p_in"], config["p_out"], config["seed"])
    graph, truth = generate_planted(spec)
    _emit_graph_files(graph, truth.labels, config, "generate-planted", started)
    print(f"wrote {config['out']} (n={graph.node_count}, m={graph.total_weight:g})")
    return EXIT_OK


def _run_generate_calibrated(config: dict) -> int:
    started = time.perf_counter()
    spec, achieved = calibrate_planted(
        config["n"],
        config["k"],
        config["target_q"],
        config.get("tolerance", 0.01),
        avg_degree=config.get("avg_degree", 20.0),
        seed=config["seed"],
        runs=config.get("calibration_runs", 3),
    )
    graph, truth = generate_planted(spec)
    config = dict(config)
    config["_achieved_q"] = achieved
    config["p_in"] = spec.p_in
    config["p_out"] = spec.p_out
    _emit_graph_files(graph, truth.labels, config, "generate-calibrated", started)
    print(f"wrote {config['out']} (achieved Q={achieved:.4f}, p_in={spec.p_in:.6g}, p_out={spec.p_out:.6g})")
    return EXIT_OK


def _run_generate_clique_ring(config: dict) -> int:
    started = time.perf_counter()
    graph = ring_of_cliques(config["cliques"], config["size"])
    truth = clique_ring_truth(config["cliques"], config["size"])
    _emit_graph_files(graph, truth, config, "generate-clique-ring", started)
    print(f"wrote {config['out']} (n={graph.node_count}, m={graph.total_weight:g})")
    return EXIT_OK


def _run_generate_rewire(config: dict) -> int:
    started = time.perf_counter()
    with open(config["input"], "r", encoding="utf-8") as fh:
        graph = load_edge_list(fh, merge_duplicates=config.get("merge_duplicates", False))
    rewired = degree_preserving_rewire(graph, config.get("swap_factor", 10.0), config["seed"])
    _emit_graph_files(rewired, None, config, "generate-rewire", started)
    print(f"wrote {config['out']} (n={rewired.node_count}, m={rewired.total_weight:g})")
    return EXIT_OK


# ------------------------------------------------------------------ detect


def _run_detect(config: dict) -> int:
    started = time.perf_counter()
    graph = _load_graph(config)
    det = _detector_from(config)
    part = louvain(graph, det) if config["method"] == "louvain" else leiden(graph, det)
    q = modularity(graph, part, det.resolution)
    out = Path(config["out"])
    _write_text(out, partition_to_csv(part))
    _write_manifest(_stem(config["out"]), "detect", config, {"graph": config["graph"]}, {"partition": str(out)}, started)
    print(f"Q={q:.6f}")
    return EXIT_OK


# ------------------------------------------------------------------- qicd


def _run_qicd_cmd(config: dict) -> int:
    started = time.perf_counter()
    graph = _load_graph(config)
    cfg = _qicd_config(config)
    result = run_qicd(graph, cfg)
    stem = _stem(config["out"])
    part_path = Path(str(stem) + ".partition.csv")
    trace_path = Path(str(stem) + ".trace.csv")
    json_path = Path(str(stem) + ".json")
    _write_text(part_path, partition_to_csv(result.best_partition))
    _write_text(trace_path, trace_to_csv(result.trace))
    envelope = result_to_json(result, cfg)
    envelope["graph"] = config["graph"]
    _write_text(json_path, json.dumps(envelope, indent=2, sort_keys=True) + "\n")
    _write_manifest(
        stem,
        "qicd",
        config,
        {"graph": config["graph"]},
        {"partition": str(part_path), "trace": str(trace_path), "result": str(json_path)},
        started,
    )
    print(f"Q*={result.q_star:.6f} baseline={result.q_baseline:.6f} MRG={result.mrg:.6f}")
    return EXIT_OK


# -------------------------------------------------------------- benchmark


def _parse_runs_spec(spec: str, methods: list[str]) -> dict[str, int]:
    default = 6
    overrides: dict[str, int] = {}
    for part in str(spec).split(","):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            name, _, count = part.partition("=")
            if name not in METHODS:
                raise UsageError(f"unknown method in --runs: {name!r}")
            overrides[name] = int(count)
        else:
            default = int(part)
    return {m: overrides.get(m, default) for m in methods}


def _parse_generate_spec(text: str) -> tuple[str, dict]:
    head, _, rest = text.partition(":")
    head = head.strip()
    params: dict[str, float] = {}
    for item in rest.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, value = item.partition("=")
        if not value:
            raise UsageError(f"bad --generate-spec entry {item!r}; expected key=value")
        params[key.strip().replace("-", "_")] = float(value)
    return head, params


def _graph_from_spec(kind: str, params: dict, seed: int):
    if kind == "planted":
        spec = PlantedSpec(int(params["n"]), int(params["k"]), params["p_in"], params["p_out"], seed)
        return generate_planted(spec)[0]
    if kind == "calibrated":
        spec, _q = calibrate_planted(
            int(params["n"]),
            int(params["k"]),
            params["target_q"],
            params.get("tolerance", 0.01),
            avg_degree=params.get("avg_degree", 20.0),
            seed=seed,
        )
        return generate_planted(spec)[0]
    if kind == "clique-ring":
        return ring_of_cliques(int(params["cliques"]), int(params["size"]))
    raise UsageError(f"unknown --generate-spec type {kind!r}")


def _render_table(rows: list[dict], baseline: str) -> str:
    header = f"{'Method':<18}{'Runs':>5}  {'Mean±Std':<16}{'95% CI':<20}{'p':<10}"
    lines = [header, "-" * len(header)]
    for row in rows:
        ci = f"[{row['ci_low']:.4f}, {row['ci_high']:.4f}]"
        if row["p_vs_baseline"] is None:
            p_text = "--"
        else:
            mark = " *" if row["p_vs_baseline"] < 0.05 else ""
            p_text = f"{row['p_vs_baseline']:.4f}{mark}"
        lines.append(
            f"{row['method']:<18}{row['n']:>5}  "
            f"{row['mean']:.4f}±{row['std']:.4f}   "
            f"{ci:<20}{p_text:<10}"
        )
    lines.append("")
    lines.append(f"baseline: {baseline}; * marks p < 0.05")
    return "\n".join(lines) + "\n"


def _run_benchmark(config: dict) -> int:
    started = time.perf_counter()
    methods = [m.strip() for m in config["methods"].split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise UsageError(f"unknown method names: {', '.join(unknown)}")
    runs = _parse_runs_spec(config.get("runs", "6"), methods)
    for name, count in runs.items():
        if count < 2:
            raise UsageError(f"method {name!r} needs at least 2 runs for statistics, got {count}")
    baseline = config.get("baseline", "leiden")
    if len(methods) > 1 and baseline not in methods:
        raise UsageError(f"baseline {baseline!r} must be one of --methods")

    seed = config["seed"]
    graph = None
    factory = None
    if config.get("graph"):
        graph = _load_graph(config)
        inputs = {"graph": config["graph"]}
    else:
        kind, params = _parse_generate_spec(config["generate_spec"])
        inputs = {"generate_spec": config["generate_spec"]}
        if config.get("fresh_graphs"):
            if kind == "clique-ring":
                raise UsageError("--fresh-graphs needs a randomized generator spec")
            factory = lambda s: _graph_from_spec(kind, params, s)
        else:
            graph = _graph_from_spec(kind, params, mix(seed, 71))

    options = ExperimentOptions(
        iterations=config.get("iterations", 10),
        stall_limit=config.get("stall_limit", 5),
        proposal_seeds=config.get("proposal_seeds"),
        hu=HyperuniformParams(config.get("alpha", 2.0), config.get("fraction", 0.1)),
        refine_before_accept=config.get("refine_before_accept", False),
        resolution=config.get("resolution", 1.0),
    )
    samples = run_experiment(
        graph,
        methods,
        runs,
        seed,
        options=options,
        jobs=config.get("jobs", 1),
        graph_factory=factory,
    )

    stem = _stem(config["out"])
    runs_path = Path(str(stem) + ".runs.csv")
    lines = ["method,run,seed,Q"]
    for sample in samples:
        for run_idx, (q, run_seed) in enumerate(zip(sample.q_values, sample.seeds)):
            lines.append(f"{sample.method},{run_idx},{run_seed},{q!r}")
    _write_text(runs_path, "\n".join(lines) + "\n")

    by_name = {s.method: s for s in samples}
    base_sample = by_name.get(baseline)
    rows = []
    for sample in samples:
        stats = summarize(sample)
        p_value = None
        if base_sample is not None and sample.method != baseline:
            p_value = welch_t_test(sample, base_sample).p
        rows.append(
            {
                "method": sample.method,
                "n": stats.n,
                "mean": stats.mean,
                "std": stats.std,
                "ci_low": stats.ci_low,
                "ci_high": stats.ci_high,
                "p_vs_baseline": p_value,
            }
        )
    rows.sort(key=lambda r: -r["mean"])

    summary_path = Path(str(stem) + ".summary.json")
    summary = {
        "baseline": baseline,
        "methods": {
            row["method"]: {k: v for k, v in row.items() if k != "method"} for row in rows
        },
    }
    _write_text(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")

    table_path = Path(str(stem) + ".table.txt")
    table = _render_table(rows, baseline)
    _write_text(table_path, table)

    _write_manifest(
        stem,
        "benchmark",
        config,
        inputs,
        {"runs": str(runs_path), "summary": str(summary_path), "table": str(table_path)},
        started,
    )
    sys.stdout.write(table)
    return EXIT_OK


# -------------------------------------------------------------------- mrg


def _run_mrg(config: dict) -> int:
    started = time.perf_counter()
    nulls = config.get("nulls", 20)
    if nulls < 5:
        raise UsageError("--nulls must be at least 5")
    graph = _load_graph(config)
    cfg = _qicd_config(config)
    report = mrg_significance(graph, cfg, nulls, seed=mix(config["seed"], 2), swap_factor=config.get("swap_factor", 10.0))
    stem = _stem(config["out"])
    path = Path(str(stem) + ".mrg.json")
    payload = {
        "observed_mrg": report.observed,
        "null_mean": report.null_mean,
        "null_std": report.null_std,
        "percentile": report.percentile,
        "null_gaps": list(report.null_gaps),
        "null_count": nulls,
        "swap_factor": config.get("swap_factor", 10.0),
    }
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_manifest(stem, "mrg", config, {"graph": config["graph"]}, {"report": str(path)}, started)
    print(f"MRG={report.observed:.6f} null_mean={report.null_mean:.6f} percentile={report.percentile:.1f}")
    return EXIT_OK


RUNNERS = {
    "generate-planted": _run_generate_planted,
    "generate-calibrated": _run_generate_calibrated,
    "generate-clique-ring": _run_generate_clique_ring,
    "generate-rewire": _run_generate_rewire,
    "detect": _run_detect,
    "qicd": _run_qicd_cmd,
    "benchmark": _run_benchmark,
    "mrg": _run_mrg,
}


# ------------------------------------------------------------ CLI parsing


def _add_graph_input(p: _Parser) -> None:
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--merge-duplicates", action="store_true", help="sum duplicate edges instead of rejecting")
    p.add_argument("--relabel", action="store_true", help="accept arbitrary node labels; writes a .labels.csv sidecar")


def _add_detector_flags(p: _Parser) -> None:
    p.add_argument("--max-levels", type=int, default=20)
    p.add_argument("--max-sweeps", type=int, default=100)
    p.add_argument("--min-gain", type=float, default=1e-7)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--random-ties", action="store_true")


def _add_qicd_flags(p: _Parser) -> None:
    p.add_argument("--kind", choices=KIND_CHOICES, default="haar")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--seeds", dest="proposal_seeds", type=int, default=None,
                   help="proposal seed count K (default: ceil(sqrt(n)))")
    p.add_argument("--alpha", type=float, default=2.0, help="oversize threshold factor")
    p.add_argument("--fraction", type=float, default=0.1, help="reassignment fraction")
    p.add_argument("--stall-limit", type=int, default=5)
    p.add_argument("--init-mode", choices=("singleton", "quick-leiden"), default="quick-leiden")
    p.add_argument("--base", choices=("leiden", "louvain"), default="leiden")
    p.add_argument("--refine-before-accept", action="store_true",
                   help="polish proposals with a full seeded pass before the acceptance check")


def build_parser(default_seed: int) -> _Parser:
    parser = _Parser(prog="qicd", description="Community detection with quantum-inspired refinement")
    parser.add_argument("--from-manifest", help="re-run a command from its manifest file")
    parser.add_argument("--config", help="key=value defaults file (flags override)")
    parser.add_argument("--version", action="version", version=f"qicd {__version__}")
    sub = parser.add_subparsers(dest="command")

    gen = sub.add_parser("generate", help="write synthetic graphs")
    gen_sub = gen.add_subparsers(dest="generator")

    g_pl = gen_sub.add_parser("planted", help="planted-partition graph")
    g_pl.add_argument("--n", type=int, required=True)
    g_pl.add_argument("--k", type=int, required=True)
    g_pl.add_argument("--p-in", type=float, required=True)
    g_pl.add_argument("--p-out", type=float, required=True)
    g_pl.add_argument("--seed", type=int, default=default_seed)
    g_pl.add_argument("--out", required=True)

    g_cal = gen_sub.add_parser("calibrated", help="planted graph calibrated to a target Leiden Q")
    g_cal.add_argument("--n", type=int, required=True)
    g_cal.add_argument("--k", type=int, required=True)
    g_cal.add_argument("--target-q", type=float, required=True)
    g_cal.add_argument("--tolerance", type=float, default=0.01)
    g_cal.add_argument("--avg-degree", type=float, default=20.0)
    g_cal.add_argument("--calibration-runs", type=int, default=3)
    g_cal.add_argument("--seed", type=int, default=default_seed)
    g_cal.add_argument("--out", required=True)

    g_ring = gen_sub.add_parser("clique-ring", help="ring of cliques control graph")
    g_ring.add_argument("--cliques", type=int, required=True)
    g_ring.add_argument("--size", type=int, required=True)
    g_ring.add_argument("--seed", type=int, default=default_seed)
    g_ring.add_argument("--out", required=True)

    g_rw = gen_sub.add_parser("rewire", help="degree-preserving rewiring of an existing graph")
    g_rw.add_argument("--input", required=True)
    g_rw.add_argument("--swap-factor", type=float, default=10.0)
    g_rw.add_argument("--merge-duplicates", action="store_true")
    g_rw.add_argument("--seed", type=int, default=default_seed)
    g_rw.add_argument("--out", required=True)

    det = sub.add_parser("detect", help="run a classical detector")
    _add_graph_input(det)
    det.add_argument("--method", choices=("louvain", "leiden"), required=True)
    _add_detector_flags(det)
    det.add_argument("--seed", type=int, default=default_seed)
    det.add_argument("--out", required=True)

    qic = sub.add_parser("qicd", help="run the quantum-inspired refinement loop")
    _add_graph_input(qic)
    _add_qicd_flags(qic)
    _add_detector_flags(qic)
    qic.add_argument("--seed", type=int, default=default_seed)
    qic.add_argument("--out", required=True)

    ben = sub.add_parser("benchmark", help="multi-method experiment with statistics")
    ben.add_argument("--graph")
    ben.add_argument("--merge-duplicates", action="store_true")
    ben.add_argument("--relabel", action="store_true")
    ben.add_argument("--generate-spec", help="e.g. planted:n=1000,k=10,p_in=0.05,p_out=0.02")
    ben.add_argument("--fresh-graphs", action="store_true", help="new graph per run (with --generate-spec)")
    ben.add_argument("--methods", required=True, help="comma list of method names")
    ben.add_argument("--runs", default="6", help="run count, with name=count overrides")
    ben.add_argument("--baseline", default="leiden")
    ben.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    _add_qicd_flags(ben)
    ben.add_argument("--seed", type=int, default=default_seed)
    ben.add_argument("--out", required=True)

    mrg_p = sub.add_parser("mrg", help="MRG significance against rewired null graphs")
    _add_graph_input(mrg_p)
    mrg_p.add_argument("--nulls", type=int, default=20)
    mrg_p.add_argument("--swap-factor", type=float, default=10.0)
    _add_qicd_flags(mrg_p)
    _add_detector_flags(mrg_p)
    mrg_p.add_argument("--seed", type=int, default=default_seed)
    mrg_p.add_argument("--out", required=True)

    return parser


_COMMON_KEYS = (
    "seed",
    "out",
    "graph",
    "merge_duplicates",
    "relabel",
    "max_levels",
    "max_sweeps",
    "min_gain",
    "resolution",
    "random_ties",
    "kind",
    "iterations",
    "proposal_seeds",
    "alpha",
    "fraction",
    "stall_limit",
    "init_mode",
    "base",
    "refine_before_accept",
)


def _config_from_args(args: argparse.Namespace) -> tuple[str, dict]:
    if args.command == "generate":
        generator = getattr(args, "generator", None)
        if generator is None:
            raise UsageError("generate requires a subcommand: planted | calibrated | clique-ring | rewire")
        command = f"generate-{generator}"
        keys = {
            "planted": ("n", "k", "p_in", "p_out", "seed", "out"),
            "calibrated": ("n", "k", "target_q", "tolerance", "avg_degree", "calibration_runs", "seed", "out"),
            "clique-ring": ("cliques", "size", "seed", "out"),
            "rewire": ("input", "swap_factor", "merge_duplicates", "seed", "out"),
        }[generator]
        return command, {k: getattr(args, k) for k in keys}
    if args.command == "detect":
        config = {k: getattr(args, k) for k in _COMMON_KEYS if hasattr(args, k)}
        config["method"] = args.method
        return "detect", config
    if args.command == "qicd":
        return "qicd", {k: getattr(args, k) for k in _COMMON_KEYS if hasattr(args, k)}
    if args.command == "benchmark":
        config = {k: getattr(args, k) for k in _COMMON_KEYS if hasattr(args, k)}
        config.update(
            {
                "generate_spec": args.generate_spec,
                "fresh_graphs": args.fresh_graphs,
                "methods": args.methods,
                "runs": args.runs,
                "baseline": args.baseline,
                "jobs": args.jobs,
            }
        )
        if bool(config.get("graph")) == bool(config.get("generate_spec")):
            raise UsageError("benchmark needs exactly one of --graph or --generate-spec")
        return "benchmark", config
    if args.command == "mrg":
        config = {k: getattr(args, k) for k in _COMMON_KEYS if hasattr(args, k)}
        config["nulls"] = args.nulls
        config["swap_factor"] = args.swap_factor
        return "mrg", config
    raise UsageError("a command is required; see --help")


def _inject_config_file(argv: list[str]) -> list[str]:
    """Splice key=value defaults from --config in before explicit flags."""
    path = None
    stripped: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            skip = True
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
        else:
            stripped.append(token)
    if path is None:
        return argv
    argv = stripped
    extra: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip().replace("_", "-")
            value = value.strip()
            if not key or not value:
                raise UsageError(f"bad config line: {raw.strip()!r}")
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    extra.append(f"--{key}")
            else:
                extra.extend([f"--{key}", value])
    # insert after the command tokens so explicit flags win
    head = []
    tail = list(argv)
    while tail and not tail[0].startswith("-"):
        head.append(tail.pop(0))
    return head + extra + tail


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        default_seed = int(os.environ.get("QICD_SEED", "0"))
    except ValueError:
        print("error: QICD_SEED must be an integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        argv = _inject_config_file(argv)
        parser = build_parser(default_seed)
        args = parser.parse_args(argv)
        if args.from_manifest:
            with open(args.from_manifest, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
            command = manifest["command"]
            if command not in RUNNERS:
                raise UsageError(f"manifest names unknown command {command!r}")
            return RUNNERS[command](manifest["config"])
        command, config = _config_from_args(args)
        return RUNNERS[command](config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK
    except (ValueError, ArithmeticError, OSError, KeyError) as exc:
        message = str(exc) or exc.__class__.__name__
        print(message, file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
