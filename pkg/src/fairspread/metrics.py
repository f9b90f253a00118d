"""Seed-set evaluation independent of the selection estimator, Price of Fairness and CSV output."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import TextIO

from .agm import BoundFloors
from .diffusion import DEFAULT_EVAL_SAMPLES, SpreadEstimate, estimate_group_utilities
from .errors import DataError
from .graph import Graph, GroupStructure
from .streams import SeedLike

CSV_HEADER = (
    "method", "k", "phi", "sigma", "pof", "group_id", "utility", "std_err",
    "k_prime", "xi", "floor_us", "floor_us_emp", "floor_gs",
)


@dataclass(frozen=True)
class EvalReport:
    method: str
    k: int
    sigma: SpreadEstimate
    utilities: tuple[SpreadEstimate, ...]
    phi: float
    seed_list: tuple[str, ...]
    group_labels: tuple[str, ...]
    pof: float | None = None
    floors: BoundFloors | None = None
    k_prime: int | None = None

    def with_pof(self, sigma_imm: float) -> EvalReport:
        return replace(self, pof=price_of_fairness(sigma_imm, self.sigma.mean))

    def with_bounds(self, floors: BoundFloors, k_prime: int | None) -> EvalReport:
        return replace(self, floors=floors, k_prime=k_prime)

    def csv_rows(self) -> list[list[str]]:
        f = self.floors
        tail = [
            _fmt(self.k_prime),
            _fmt(f.xi if f else None),
            _fmt(f.us_theoretical if f else None),
            _fmt(f.us_empirical if f else None),
            _fmt(f.gs_disconnected if f else None),
        ]
        head = [self.method, str(self.k), _fmt(self.phi), _fmt(self.sigma.mean), _fmt(self.pof)]
        return [head + [label, _fmt(u.mean), _fmt(u.std_error)] + tail
                for label, u in zip(self.group_labels, self.utilities)]

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "seeds": list(self.seed_list),
            "phi": self.phi,
            "sigma": {"mean": self.sigma.mean, "std_error": self.sigma.std_error, "samples": self.sigma.samples},
            "pof": self.pof,
            "utilities": {label: {"mean": u.mean, "std_error": u.std_error}
                          for label, u in zip(self.group_labels, self.utilities)},
        }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, str)):
        return str(x)
    if isinstance(x, Fraction):
        x = float(x)
    return f"{x:.10g}"


def evaluate(
    g: Graph,
    c: GroupStructure,
    seeds: Iterable[int],
    samples: int = DEFAULT_EVAL_SAMPLES,
    seed: SeedLike = None,
    method: str = "",
    threads: int | None = None,
) -> EvalReport:
    """Monte Carlo spread, per-group utilities and maximin value of ``seeds``.

    Pass the same ``seed`` for every method compared at one budget so that all
    of them share the evaluation stream.
    """
    seeds = [int(v) for v in seeds]
    est = estimate_group_utilities(g, c, seeds, samples, seed, threads)
    return EvalReport(
        method=method,
        k=len(seeds),
        sigma=est.sigma,
        utilities=est.utilities,
        phi=est.phi,
        seed_list=tuple(g.labels[v] for v in seeds),
        group_labels=tuple(c.labels),
    )


def price_of_fairness(sigma_imm: float, sigma_s: float) -> float:
    """Relative spread lost against the IMM seed set; negative when ``sigma_s`` beats it."""
    if sigma_imm <= 0:
        raise DataError("reference IMM spread must be positive")
    return (sigma_imm - sigma_s) / sigma_imm


def write_csv(reports: Sequence[EvalReport], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        writer.writerows(report.csv_rows())
