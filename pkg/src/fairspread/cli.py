"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence

from .errors import CapExceededError, DataError, UsageError
from .experiment import METHODS, ExperimentConfig, run_experiment, write_outputs
from .graph import assign_wc_probabilities, group_connectivity, load_edge_list, load_groups, write_edge_list, write_groups
from .metrics import evaluate
from .oracle import EDGE_CAP, LiveEdgeEnumeration, exact_group_sigmas, exact_sigma, exact_utilities
from .streams import THREADS_ENV
from .synth import SynthSpec, planted_partition

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True, help="edge-list file")
    p.add_argument("--groups", required=True, help="group file ('node label' per line)")
    p.add_argument("--undirected", action="store_true", help="materialize both directions of every edge")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairspread", description="Fair influence maximization under the maximin objective.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run methods over budgets and write CSV + JSON reports")
    run.add_argument("--config", help="flat JSON configuration; flags override its keys")
    run.add_argument("--edge-file", dest="edge_file")
    run.add_argument("--group-file", dest="group_file")
    run.add_argument("--undirected", dest="directed", action="store_const", const=False, default=None)
    run.add_argument("--synth-group-sizes", dest="synth_group_sizes", type=_int_list)
    run.add_argument("--p-in", dest="p_in", type=float)
    run.add_argument("--p-out", dest="p_out", type=float)
    run.add_argument("--synth-seed", dest="synth_seed", type=int)
    run.add_argument("--methods", type=_str_list, help=f"comma-separated subset of {','.join(METHODS)}")
    run.add_argument("--budgets", type=_int_list, help="comma-separated budgets k")
    run.add_argument("--epsilon", type=float)
    run.add_argument("--ell", type=float)
    run.add_argument("--R-eval", dest="R_eval", type=int)
    run.add_argument("--R-myopic", dest="R_myopic", type=int)
    run.add_argument("--theta-override", dest="theta_override", type=int)
    run.add_argument("--theta-min", dest="theta_min", type=int)
    run.add_argument("--master-seed", dest="master_seed", type=int)
    run.add_argument("--output", help="output CSV path (JSON report is written next to it)")
    run.add_argument("--threads", type=int, help=f"worker threads (fallback: ${THREADS_ENV})")

    synth = sub.add_parser("synth", help="write a planted-partition graph and its groups")
    synth.add_argument("--group-sizes", required=True, type=_int_list)
    synth.add_argument("--p-in", required=True, type=float)
    synth.add_argument("--p-out", required=True, type=float)
    synth.add_argument("--seed", required=True, type=int)
    synth.add_argument("--out", required=True, help="output prefix; writes PREFIX.edges and PREFIX.groups")

    rho = sub.add_parser("rho", help="print group connectivity statistics")
    _add_graph_args(rho)

    oracle = sub.add_parser("oracle", help="exact spread and maximin value by live-edge enumeration")
    _add_graph_args(oracle)
    oracle.add_argument("--seeds", required=True, type=_str_list, help="comma-separated node ids")
    oracle.add_argument("--edge-cap", type=int, default=EDGE_CAP)

    ev = sub.add_parser("eval", help="Monte Carlo evaluation of a seed set")
    _add_graph_args(ev)
    ev.add_argument("--seeds", required=True, type=_str_list)
    ev.add_argument("--R", type=int, default=10_000)
    ev.add_argument("--seed", type=int, required=True, help="evaluation master seed")
    ev.add_argument("--threads", type=int)
    return parser


def _load(args):
    with open(args.edges, encoding="utf-8") as fh:
        g = load_edge_list(fh, directed=not args.undirected, source=args.edges)
    with open(args.groups, encoding="utf-8") as fh:
        c = load_groups(fh, g, source=args.groups)
    return g, c


def _seed_ids(g, labels: Sequence[str]) -> list[int]:
    index = g.index_map()
    missing = [s for s in labels if s not in index]
    if missing:
        raise DataError(f"unknown seed node(s): {', '.join(missing)}")
    return [index[s] for s in labels]


def cmd_run(args) -> int:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("configuration must be a JSON object")
    cfg = ExperimentConfig.from_dict(data)
    for key in ExperimentConfig.__dataclass_fields__:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if cfg.output is None:
        raise UsageError("--output (or config key 'output') is required")
    result = run_experiment(cfg)
    csv_path, json_path = write_outputs(cfg, result)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def cmd_synth(args) -> int:
    g, c = planted_partition(SynthSpec(tuple(args.group_sizes), args.p_in, args.p_out, args.seed))
    with open(f"{args.out}.edges", "w", encoding="utf-8") as fh:
        write_edge_list(g, fh)
    with open(f"{args.out}.groups", "w", encoding="utf-8") as fh:
        write_groups(g, c, fh)
    stats = group_connectivity(g, c)
    print(f"nodes={g.n} edges={g.edge_count} rho={stats.rho:.6g}")
    return EXIT_OK


def cmd_rho(args) -> int:
    g, c = _load(args)
    stats = group_connectivity(g, c)
    print(f"{stats.rho:.6g}")
    print(f"m={len(stats.group_sizes)} nodes={g.n} edges={stats.edge_count} "
          f"inner={stats.inner_edge_count} cross={stats.cross_edge_count}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    g, c = _load(args)
    g = assign_wc_probabilities(g)
    seeds = _seed_ids(g, args.seeds)
    enum = LiveEdgeEnumeration(g, edge_cap=args.edge_cap)
    sigma = exact_sigma(g, seeds, enum=enum)
    sigmas = exact_group_sigmas(g, c, seeds, enum)
    utilities = exact_utilities(g, c, seeds, enum)
    print(f"sigma={sigma.value} ({float(sigma):.6f})")
    for label, s, u in zip(c.labels, sigmas, utilities):
        print(f"group {label}: sigma_c={s.value} u_c={float(u):.6f}")
    phi = min(utilities)
    print(f"phi={phi} ({float(phi):.6f})")
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.R < 1:
        raise UsageError("--R must be >= 1")
    g, c = _load(args)
    g = assign_wc_probabilities(g)
    report = evaluate(g, c, _seed_ids(g, args.seeds), args.R, args.seed, "eval", args.threads)
    print(json.dumps(report.to_json(), indent=2))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "synth": cmd_synth, "rho": cmd_rho, "oracle": cmd_oracle, "eval": cmd_eval}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"fairspread: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fairspread: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"fairspread: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (DataError, OSError, json.JSONDecodeError) as exc:
        print(f"fairspread: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
