"""Command-line entry point: ``nbpagerank <command> ...``.

Every command that writes ``--out FILE`` also writes ``FILE.manifest``;
``nbpagerank replay FILE.manifest`` re-runs it.  Exit codes: 0 success,
1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import accuracy_curve, best_match_accuracy, cluster, nmi
from .experiments import (
    DEFAULT_PERCENTS,
    equivalence_gaps,
    monte_carlo_walk,
    mu_sweep,
    overlap_experiment,
)
from .formats import (
    RunManifest,
    Stopwatch,
    file_digest,
    manifest_path,
    ranks,
    read_graph,
    read_node_values,
    write_csv,
    write_edge_list,
)
from .generators import GeneratorSpec, generate, generate_connected
from .graph import GraphError
from .solvers import PageRankConfig, biregular_closed_form, mu_pagerank, standard_pagerank

log = logging.getLogger("nbpagerank")


class UsageError(Exception):
    pass


class ComputationError(Exception):
    pass


def _mu(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("mu must be non-negative")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [_mu(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> np.ndarray:
    try:
        a, b, count = text.split(":")
        grid = np.linspace(float(a), float(b), int(count))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must look like A:B:COUNT") from None
    if int(count) < 2 or float(b) <= float(a):
        raise argparse.ArgumentTypeError("grid needs COUNT >= 2 and B > A")
    return grid


def _params(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise argparse.ArgumentTypeError(f"malformed parameter {item!r}")
        out[key.strip()] = int(value) if value.strip().isdigit() else float(value)
    return out


def _epsilon(args) -> float:
    if getattr(args, "alpha", None) is not None:
        return 1.0 - args.alpha
    return args.epsilon


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbpagerank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--out", required=out_required, help="CSV output path")
        p.add_argument("--threads", type=int, default=1)
        return p

    p = common(sub.add_parser("compute", help="PageRank variants of one graph"))
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--mu", type=_mu, default=1.0, help="backtrack weight, or 'inf'")
    p.add_argument("--mode", choices=["tail-degree", "head-copy"], default="tail-degree")
    p.add_argument("--teleport", default="uniform", help="'uniform' or a 'node weight' file")
    p.add_argument("--method", choices=["power", "linear", "linear-series"], default="power")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--figure", help="also write a value histogram against infinity-PageRank")

    p = common(sub.add_parser("sweep", help="mu-PageRank over a grid of mu"))
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--grid", type=_grid, default=_grid("0:100:20"))
    p.add_argument("--tol-mono", type=float, default=1e-9)
    p.add_argument("--figure")

    p = common(sub.add_parser("verify", help="regular / biregular equivalence check"), out_required=False)
    p.add_argument("--family", choices=["regular", "biregular"], required=True)
    p.add_argument("--params", type=_params, required=True,
                   help="n=20,k=3 or n1=..,n2=..,d1=..,d2=..")
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--mus", type=_float_list, default=[0.0, 0.3, 2.0, 10.0])
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("overlap", help="top-x%% overlap of standard vs infinity-PageRank"))
    p.add_argument("--model", required=True, help="e.g. pareto-cl:n=1000,gamma=2.5,w_min=3")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--percents", type=_float_list, default=list(DEFAULT_PERCENTS))
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figure")

    p = common(sub.add_parser("cluster", help="infinity-PageRank clustering"))
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--epsilon", type=float, default=0.85)
    group.add_argument("--alpha", type=float, help="jumping factor; epsilon = 1 - alpha")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--truth", help="'gml-value' or a 'node label' file")
    p.add_argument("--figure")

    p = common(sub.add_parser("walk", help="Monte Carlo estimate of mu-PageRank"))
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--mu", type=_mu, default=1.0)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("generate", help="write a random graph as an edge list"))
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--connected", action="store_true", help="redraw until connected")

    p = common(sub.add_parser("benchmark", help="SBM clustering accuracy against separation"))
    p.add_argument("--separations", type=_float_list,
                   default=[round(0.1 * i, 1) for i in range(1, 10)])
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--sizes", default="30,30,30")
    p.add_argument("--p-out", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figure")

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    return parser


def _load(path):
    try:
        return read_graph(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None


def _teleport(spec: str, g) -> np.ndarray | None:
    if spec == "uniform":
        return None
    values = read_node_values(spec, g)
    values = np.nan_to_num(values, nan=0.0)
    if (values < 0).any() or values.sum() <= 0:
        raise UsageError("teleport file needs non-negative weights with a positive sum")
    return values / values.sum()


def cmd_compute(args, manifest):
    g, _ = _load(args.input)
    manifest.inputs["input"] = file_digest(args.input)
    cfg = PageRankConfig(args.epsilon, args.mu, _teleport(args.teleport, g), args.mode,
                         args.method, args.tol, args.max_iter)
    if args.mu == 1.0 and args.mode == "tail-degree":
        vec = standard_pagerank(g, cfg)
    else:
        vec, _ = mu_pagerank(g, cfg)
    if not vec.converged:
        raise ComputationError(f"solver did not converge (residual {vec.residual:.3e})")
    r = ranks(vec.values)
    write_csv(args.out, ["node", "value", "rank"],
              ((g.label_of(i), vec.values[i], r[i]) for i in range(g.n)))
    if args.figure:
        from .plotting import plot_distributions
        from .solvers import infinity_pagerank

        plot_distributions(vec.values, infinity_pagerank(g, args.epsilon, cfg.v).values, args.figure)
    return 0


def cmd_sweep(args, manifest):
    g, _ = _load(args.input)
    manifest.inputs["input"] = file_digest(args.input)
    result = mu_sweep(g, args.epsilon, args.grid, args.tol_mono)
    header = ["mu", "range_width", "failed"] + [str(g.label_of(i)) for i in range(g.n)]
    write_csv(args.out, header,
              ([mu, result.range_widths[j], int(j in result.failed), *result.values[j]]
               for j, mu in enumerate(result.mu_grid)))
    out = Path(args.out)
    write_csv(out.with_name(out.stem + "_verdicts" + out.suffix), ["node", "verdict"],
              ((g.label_of(i), v) for i, v in enumerate(result.verdicts)))
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(result, args.figure, [g.label_of(i) for i in range(g.n)])
    counts = {v: result.verdicts.count(v) for v in sorted(set(result.verdicts))}
    print(f"verdicts: {counts}; range shrinks: {result.range_shrinks(args.tol_mono)}")
    return 1 if result.failed else 0


def cmd_verify(args, manifest):
    params = args.params
    if args.family == "regular":
        need = ("n", "k")
    else:
        need = ("n1", "n2", "d1", "d2")
    missing = [k for k in need if k not in params]
    if missing:
        raise UsageError(f"--params for {args.family} needs {', '.join(need)}")
    spec = GeneratorSpec(args.family, {k: int(params[k]) for k in need}, args.seed)
    g = generate_connected(spec)
    gaps = equivalence_gaps(g, args.mus, args.epsilon)
    rows = [(mu, gap) for mu, gap in gaps.items()]
    if args.family == "biregular":
        closed = biregular_closed_form(*(int(params[k]) for k in need), args.epsilon)
        expected = np.where(g.partition == 0, closed[0], closed[-1])
        for mu in args.mus:
            node, _ = mu_pagerank(g, PageRankConfig(epsilon=args.epsilon, mu=mu))
            rows.append((f"closed-form@{mu:g}", float(np.abs(node.values - expected).max())))
    worst = max(gap for _, gap in rows)
    for name, gap in rows:
        print(f"mu={name}: gap {gap:.3e}")
    print(f"max gap {worst:.3e} (tol {args.tol:g}) on {spec.describe()}")
    if args.out:
        write_csv(args.out, ["mu", "gap"], rows)
    return 0 if worst <= args.tol else 1


def cmd_overlap(args, manifest):
    spec = GeneratorSpec.parse(args.model, args.seed)
    report = overlap_experiment(spec, args.trials, args.percents, args.epsilon, args.threads)
    write_csv(args.out, ["trial", "percent", "overlap"],
              ((t, p, ov[j]) for t, ov in zip(report.trial_ids, report.per_trial)
               for j, p in enumerate(report.percents)))
    out = Path(args.out)
    write_csv(out.with_name(out.stem + "_summary" + out.suffix),
              ["percent", "mean_overlap", "trials", "skipped"],
              ((p, report.mean_overlap[j], len(report.per_trial), len(report.skipped))
               for j, p in enumerate(report.percents)))
    for j, p in enumerate(report.percents):
        print(f"top {p:g}%: mean overlap {report.mean_overlap[j]:.4f}")
    if args.figure:
        from .plotting import plot_overlap

        plot_overlap({spec.model: report}, args.figure)
    return 0 if report.per_trial else 1


def cmd_cluster(args, manifest):
    g, attrs = _load(args.input)
    manifest.inputs["input"] = file_digest(args.input)
    truth = None
    if args.truth == "gml-value":
        if attrs is None or any("value" not in a for a in attrs):
            raise UsageError("--truth gml-value needs a GML input with a value on every node")
        truth = np.array([a["value"] for a in attrs])
    elif args.truth:
        values = read_node_values(args.truth, g)
        if np.isnan(values).any():
            raise UsageError("truth file does not label every node")
        truth = values.astype(np.int64)
        manifest.inputs["truth"] = file_digest(args.truth)
    model = cluster(g, args.k, _epsilon(args), args.tol, args.seed, args.max_iter,
                    args.restarts, args.threads)
    write_csv(args.out, ["node", "cluster"], ((g.label_of(i), model.labels[i]) for i in range(g.n)))
    print(f"iterations {model.iterations}, final error {model.final_error:.3e}, "
          f"converged {model.converged}")
    if truth is not None:
        print(f"accuracy {best_match_accuracy(model.labels, truth):.4f}")
        print(f"nmi {nmi(model.labels, truth):.4f}")
    if args.figure:
        from .plotting import plot_clusters

        plot_clusters(g, model.labels, args.figure, truth)
    return 0


def cmd_walk(args, manifest):
    g, _ = _load(args.input)
    manifest.inputs["input"] = file_digest(args.input)
    if math.isinf(args.mu):
        raise UsageError("walk needs a finite mu")
    freq = monte_carlo_walk(g, args.epsilon, args.mu, args.steps, args.seed)
    write_csv(args.out, ["node", "frequency"], ((g.label_of(i), freq[i]) for i in range(g.n)))
    return 0


def cmd_generate(args, manifest):
    spec = GeneratorSpec.parse(args.model, args.seed)
    g = generate_connected(spec) if args.connected else generate(spec)
    Path(args.out).write_text(write_edge_list(g))
    print(f"{spec.describe()}: n={g.n} m={g.m} connected={g.connected}")
    return 0


def cmd_benchmark(args, manifest):
    sizes = tuple(int(s) for s in args.sizes.split(","))
    curve = accuracy_curve(args.separations, args.instances, sizes, args.p_out,
                           args.epsilon, args.restarts, args.seed)
    write_csv(args.out, ["separation", "mean_accuracy", "sd_accuracy", "mean_nmi"],
              ((s, curve.mean_accuracy[j], curve.accuracy[:, j].std(), curve.nmi[:, j].mean())
               for j, s in enumerate(curve.separations)))
    for j, s in enumerate(curve.separations):
        print(f"separation {s:g}: accuracy {curve.mean_accuracy[j]:.4f}")
    if args.figure:
        from .plotting import plot_accuracy_curve

        plot_accuracy_curve(curve, args.figure)
    return 0


COMMANDS = {
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "overlap": cmd_overlap,
    "cluster": cmd_cluster,
    "walk": cmd_walk,
    "generate": cmd_generate,
    "benchmark": cmd_benchmark,
}


def cli_main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "replay":
        try:
            recorded = RunManifest.loads(Path(args.manifest).read_text())
        except (OSError, KeyError, ValueError) as exc:
            print(f"error: cannot read manifest: {exc}", file=sys.stderr)
            return 2
        return cli_main(recorded.argv)

    params = {k: v for k, v in vars(args).items() if k not in ("command", "verbose")}
    seeds = [args.seed] if "seed" in params else []
    manifest = RunManifest(args.command, argv, params, seeds, version=__version__)
    try:
        with Stopwatch() as sw:
            code = COMMANDS[args.command](args, manifest)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ComputationError, GraphError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest.wall_time = sw.elapsed
    if getattr(args, "out", None):
        manifest.write(manifest_path(args.out))
    return code


def main():
    sys.exit(cli_main())
