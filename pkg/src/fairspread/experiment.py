"""Experiment runner: ingest or synthesize a graph, run methods per budget, evaluate, emit CSV/JSON."""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .agm import GS, US, run_agm
from .baselines import DEFAULT_MYOPIC_SAMPLES, GREEDY, IMM, MYOPIC, global_imm, myopic, naive_greedy
from .diffusion import DEFAULT_EVAL_SAMPLES
from .errors import DataError, UsageError
from .graph import Graph, GroupStructure, assign_wc_probabilities, group_connectivity, load_edge_list, load_groups
from .igm import run_igm
from .metrics import EvalReport, evaluate, write_csv
from .ris import ImmParams
from .streams import substream
from .synth import SynthSpec, planted_partition

METHODS = (IMM, MYOPIC, GREEDY, US, GS)


@dataclass
class ExperimentConfig:
    """Flat experiment record; every key has a matching ``run`` flag."""

    edge_file: str | None = None
    group_file: str | None = None
    directed: bool = True
    synth_group_sizes: list[int] | None = None
    p_in: float | None = None
    p_out: float | None = None
    synth_seed: int | None = None
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    budgets: list[int] = field(default_factory=lambda: [10])
    epsilon: float = 0.1
    ell: float = 1.0
    R_eval: int = DEFAULT_EVAL_SAMPLES
    R_myopic: int = DEFAULT_MYOPIC_SAMPLES
    theta_override: int | None = None
    theta_min: int = 1000
    master_seed: int | None = None
    output: str | None = None
    threads: int | None = None

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown configuration key(s): {', '.join(unknown)}")
        cfg = cls(**data)
        if isinstance(cfg.methods, str):
            cfg.methods = [m.strip() for m in cfg.methods.split(",") if m.strip()]
        if isinstance(cfg.budgets, (int, str)):
            cfg.budgets = [int(b) for b in str(cfg.budgets).split(",") if b.strip()]
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def synth(self) -> SynthSpec | None:
        if self.synth_group_sizes is None:
            return None
        if self.p_in is None or self.p_out is None or self.synth_seed is None:
            raise UsageError("synthetic graphs need synth_group_sizes, p_in, p_out and synth_seed")
        return SynthSpec(tuple(self.synth_group_sizes), self.p_in, self.p_out, self.synth_seed)

    def validate(self) -> None:
        if self.master_seed is None:
            raise UsageError("master_seed is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise UsageError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
        if not self.methods:
            raise UsageError("at least one method is required")
        if not self.budgets:
            raise UsageError("at least one budget is required")
        if self.R_eval < 1 or self.R_myopic < 1:
            raise UsageError("R_eval and R_myopic must be >= 1")
        if (self.edge_file is None) == (self.synth_group_sizes is None):
            raise UsageError("give exactly one of edge_file (with group_file) or synthetic graph settings")
        if self.edge_file is not None and self.group_file is None:
            raise UsageError("group_file is required with edge_file")
        try:
            ImmParams(self.epsilon, self.ell, self.theta_override, self.theta_min)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def output_paths(self) -> tuple[Path, Path] | None:
        if self.output is None:
            return None
        out = Path(self.output)
        if out.suffix == ".csv":
            return out, out.with_suffix(".json")
        return Path(f"{out}.csv"), Path(f"{out}.json")


def load_inputs(cfg: ExperimentConfig) -> tuple[Graph, GroupStructure]:
    """Read (or synthesize) the graph and groups and fill in weighted-cascade probabilities."""
    spec = cfg.synth
    if spec is not None:
        g, c = planted_partition(spec)
    else:
        with open(cfg.edge_file, encoding="utf-8") as fh:
            g = load_edge_list(fh, directed=cfg.directed, source=cfg.edge_file)
        with open(cfg.group_file, encoding="utf-8") as fh:
            c = load_groups(fh, g, source=cfg.group_file)
    return assign_wc_probabilities(g), c


@dataclass
class ExperimentResult:
    reports: list[EvalReport]
    document: dict

    def csv_text(self) -> str:
        buf = io.StringIO()
        write_csv(self.reports, buf)
        return buf.getvalue()

    def json_text(self) -> str:
        return json.dumps(self.document, indent=2) + "\n"


def run_experiment(cfg: ExperimentConfig, g: Graph | None = None, c: GroupStructure | None = None) -> ExperimentResult:
    """Run every configured method at every budget.

    All methods at one budget are evaluated on the same Monte Carlo stream,
    and PoF is measured against the IMM seed set of that budget.
    """
    cfg.validate()
    if g is None or c is None:
        g, c = load_inputs(cfg)
    for k in cfg.budgets:
        if not 1 <= k <= g.n:
            raise UsageError(f"budget {k} outside [1, {g.n}]")
    stats = group_connectivity(g, c) if g.edge_count else None
    rho = stats.rho if stats else 0.0
    params = ImmParams(cfg.epsilon, cfg.ell, cfg.theta_override, cfg.theta_min)
    root = np.random.SeedSequence(cfg.master_seed)
    methods = list(dict.fromkeys(cfg.methods))
    threads = cfg.threads

    reports: list[EvalReport] = []
    per_budget = []
    for k in cfg.budgets:
        igm = None
        if any(m in methods for m in (GREEDY, US, GS)):
            igm = run_igm(g, c, k, params, seed=substream(root, "igm", k), threads=threads)
        selections = {IMM: global_imm(g, k, params, seed=substream(root, "imm", k), threads=threads)}
        if MYOPIC in methods:
            selections[MYOPIC] = myopic(g, k, cfg.R_myopic, seed=substream(root, "myopic", k), threads=threads)
        if GREEDY in methods:
            selections[GREEDY] = naive_greedy(g, c, k, igm.pools)
        for strategy in (US, GS):
            if strategy in methods:
                selections[strategy] = run_agm(igm, k, strategy)

        eval_seed = substream(root, "eval", k)
        imm_report = evaluate(g, c, selections[IMM].seeds, cfg.R_eval, eval_seed, IMM, threads)
        entries = []
        for method in methods:
            sel = selections[method]
            report = imm_report if method == IMM else evaluate(g, c, sel.seeds, cfg.R_eval, eval_seed, method, threads)
            report = report.with_pof(imm_report.sigma.mean)
            if method in (US, GS):
                report = report.with_bounds(sel.floors(rho), sel.diagnostics.k_prime)
            reports.append(report)
            entries.append({"selection": sel.to_json(g, c, rho), "evaluation": report.to_json()})
        per_budget.append({
            "k": k,
            "seed_matrix": igm.matrix.to_json(g, c) if igm else None,
            "thetas": dict(zip(c.labels, igm.thetas)) if igm else None,
            "methods": entries,
        })

    record = cfg.to_dict()
    record.pop("threads")  # never affects results
    document = {
        "config": record,
        "graph": {
            "nodes": g.n,
            "edges": g.edge_count,
            "rho": rho,
            "inner_edges": stats.inner_edge_count if stats else 0,
            "cross_edges": stats.cross_edge_count if stats else 0,
            "groups": dict(zip(c.labels, (int(s) for s in c.sizes))),
        },
        "budgets": per_budget,
    }
    return ExperimentResult(reports, document)


def write_outputs(cfg: ExperimentConfig, result: ExperimentResult) -> tuple[Path, Path]:
    paths = cfg.output_paths()
    if paths is None:
        raise UsageError("output path is required")
    csv_path, json_path = paths
    if csv_path.parent and not csv_path.parent.exists():
        raise DataError(f"output directory {csv_path.parent} does not exist")
    csv_path.write_text(result.csv_text(), encoding="utf-8")
    json_path.write_text(result.json_text(), encoding="utf-8")
    return csv_path, json_path
