"""``seriate`` command line.

Exit codes: 0 success, 2 invalid arguments or values, 3 unreadable or
malformed files, 4 too few usable subsamples (threshold likely unsuitable).
"""
import argparse
import csv
import json
import os
import sys

from . import io
from .alphascan import pick_alpha, scan_alpha
from .experiment import ExperimentConfig, run_experiment, sketch_params_for
from .graph import Graph
from .graphon import Constant, Step, graphon_from_dict, sample_graph
from .metrics import ordering_error, precision_agreement
from .refine import iterative_estimate
from .rng import resolve_seed
from .sketch import BudgetExhaustedError, main_estimate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_BUDGET = 4


def parse_graphon(text):
    """A graphon from inline JSON, a JSON file, or ``step:p,q,d`` / ``constant:c``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return graphon_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad graphon JSON: {exc}") from None
    if ":" in text:
        name, _, args = text.partition(":")
        try:
            values = [float(v) for v in args.split(",")]
        except ValueError:
            raise ValueError(f"bad graphon arguments {args!r}") from None
        if name == "step" and len(values) == 3:
            return Step(*values)
        if name == "constant" and len(values) == 1:
            return Constant(values[0])
        raise ValueError(f"unknown graphon shorthand {text!r}")
    return graphon_from_dict(io.read_json(text))


def _threads(value):
    # 0 means every available core
    return (os.cpu_count() or 1) if value == 0 else value


def _emit_ordering(ranks, out):
    if out:
        io.write_ordering(out, ranks)
    else:
        sys.stdout.write("".join(f"{int(r)}\n" for r in ranks))


def cmd_sample(args):
    spec = parse_graphon(args.graphon)
    sample = sample_graph(spec, args.n, resolve_seed(args.seed))
    io.write_edge_list(args.out, Graph(sample.adjacency))
    io.write_latents(args.latents or f"{args.out}.latents", sample.latents)
    return EXIT_OK


def cmd_seriate(args):
    g = io.read_edge_list(args.graph)
    overrides = {"m": args.m, "t": args.t, "zeta": args.zeta, "max_attempts": args.max_attempts}
    params = sketch_params_for(g.n, {k: v for k, v in overrides.items() if v is not None},
                               asymptotic=args.paper_params)
    ranks = main_estimate(g, args.alpha, params, seed=resolve_seed(args.seed),
                          n_jobs=_threads(args.threads))
    _emit_ordering(ranks, args.out)
    return EXIT_OK


def cmd_refine(args):
    g = io.read_edge_list(args.graph)
    seed = resolve_seed(args.seed)
    rule = "asymptotic" if args.paper_params else "desk"
    initial = io.read_ordering(args.initial) if args.initial else None
    ranks = iterative_estimate(g, args.alpha, args.epsilon, initial=initial, seed=seed,
                               rule=rule, n_jobs=_threads(args.threads))
    _emit_ordering(ranks, args.out)
    return EXIT_OK


def cmd_eval(args):
    ranks = io.read_ordering(args.ordering)
    latents = io.read_latents(args.latents)
    if ranks.size != latents.size:
        raise ValueError(f"ordering has {ranks.size} entries, latents have {latents.size}")
    report = ordering_error(ranks, latents)
    row = {"n": ranks.size, "error_D": report.error_D,
           "misordered_pairs": report.misordered_pairs, "chosen_correct": report.chosen_correct}
    for d in args.d or []:
        agrees, _ = precision_agreement(ranks, latents, d)
        row[f"agrees_at_{d:g}"] = agrees
    writer = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    return EXIT_OK


def cmd_experiment(args):
    config = ExperimentConfig.from_dict(io.read_json(args.config))
    out = args.out or config.out
    threads = _threads(args.threads)
    if out:
        with open(out, "w", newline="") as fh:
            run_experiment(config, fh, threads)
    else:
        run_experiment(config, sys.stdout, threads)
    return EXIT_OK


def _grid(text):
    try:
        grid = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"bad alpha grid {text!r}") from None
    if not grid:
        raise ValueError("alpha grid is empty")
    return grid


def cmd_alpha_scan(args):
    g = io.read_edge_list(args.graph)
    diags = scan_alpha(g, _grid(args.grid), trials=args.trials, m=args.m,
                       seed=resolve_seed(args.seed))
    rows = [d.row() for d in diags]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        chosen = pick_alpha(diags, args.min_rate)
        fh.write(f"# chosen_alpha,{'NONE' if chosen is None else chosen}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $SERIATE_SEED or 0)")
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 for all cores")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="seriate", description="Seriation of latent-position random graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a graph from a graphon")
    p.add_argument("--graphon", required=True, help="JSON, JSON file, or step:p,q,d / constant:c")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--latents", default=None, help="latents file (default: OUT.latents)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="edge-list file")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("seriate", help="coarse ordering from subsample voting")
    p.add_argument("graph")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--zeta", type=int)
    p.add_argument("--max-attempts", type=int)
    p.add_argument("--paper-params", action="store_true", help="asymptotic parameter formulas")
    _add_common(p)
    p.set_defaults(func=cmd_seriate)

    p = sub.add_parser("refine", help="staged refinement of a coarse ordering")
    p.add_argument("graph")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.45)
    p.add_argument("--initial", default=None, help="ordering file used instead of the coarse stage")
    p.add_argument("--paper-params", action="store_true", help="asymptotic threshold formulas")
    _add_common(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("eval", help="score an ordering against latents")
    p.add_argument("ordering")
    p.add_argument("latents")
    p.add_argument("--d", type=float, action="append", help="precision level (repeatable)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="run a JSON-configured grid and emit CSV")
    p.add_argument("config")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("alpha-scan", help="diagnostics for candidate thresholds")
    p.add_argument("graph")
    p.add_argument("--grid", default="0.05,0.07,0.09,0.11,0.13,0.15")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--min-rate", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_alpha_scan)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhaustedError as exc:
        print(f"seriate: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except io.FormatError as exc:
        print(f"seriate: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"seriate: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"seriate: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
