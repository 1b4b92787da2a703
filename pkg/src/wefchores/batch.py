"""Batch experiments: generate instances, run algorithms, audit every output.

A config (JSON) looks like::

    {"instances": [{"kind": "random", "n": 3, "m": 6, "seed": 1, "count": 100}],
     "algorithms": ["rwps", "waw"],
     "audits": ["wef1", "wprop1"],
     "x": "1/2", "y": "1/2"}

Rows come out in instance order and the report holds no timestamps, so the
same config always produces the same bytes.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .audit import (
    check_goods_wef1,
    check_po_bruteforce,
    check_wef1,
    check_wef1t,
    check_wefxy,
    check_wprop1,
    check_wpropx,
    check_wwef1,
)
from .bivalued import check_pwef1, solve_wef1_po, verify_equilibrium
from .core import format_rational, normalize_costs, parse_rational, social_cost
from .errors import BudgetExceeded, InvalidSpec, NotBivalued, WrongAgentCount, ZeroTotalCost
from .generators import GENERATOR_ALGORITHM, GeneratorSpec, generate
from .oracle import opt_social_cost
from .picking import goods_weighted_protocol, rwps, wefxy_allocation
from .two_agent import weighted_adjusted_winner, wef1_po_two_agents

logger = logging.getLogger(__name__)

ALGORITHMS = ("rwps", "wefxy", "bivalued", "waw", "two-po", "goods")

# audits every row of an algorithm gets regardless of the config
DEFAULT_AUDITS = {
    "rwps": ("wef1",),
    "wefxy": ("wefxy",),
    "bivalued": ("wef1", "equilibrium", "pwef1"),
    "waw": ("wef1", "pof-bound"),
    "two-po": ("wef1", "po"),
    "goods": ("goods-wef1",),
}

AUDITS = {
    "wef1": check_wef1,
    "wef1t": check_wef1t,
    "wwef1": check_wwef1,
    "wprop1": check_wprop1,
    "wpropx": check_wpropx,
    "goods-wef1": check_goods_wef1,
}


@dataclass
class BatchConfig:
    specs: list
    algorithms: tuple
    audits: tuple = ()
    x: Fraction = Fraction(1)
    y: Fraction = Fraction(0)
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "BatchConfig":
        if "instances" not in data:
            raise InvalidSpec("batch config needs an 'instances' list")
        specs = []
        for entry in data["instances"]:
            spec = GeneratorSpec.from_dict(entry)
            count = int(entry.get("count", 1))
            if count < 1:
                raise InvalidSpec("count must be positive")
            specs.append((spec, count))
        algorithms = tuple(data.get("algorithms", ("rwps",)))
        for a in algorithms:
            if a not in ALGORITHMS:
                raise InvalidSpec(f"unknown algorithm {a!r}; expected one of {ALGORITHMS}")
        audits = tuple(data.get("audits", ()))
        for a in audits:
            if a not in AUDITS and a not in ("po", "wefxy"):
                raise InvalidSpec(f"unknown audit {a!r}")
        return cls(
            specs=specs,
            algorithms=algorithms,
            audits=audits,
            x=parse_rational(data.get("x", 1)),
            y=parse_rational(data.get("y", 0)),
            workers=int(data.get("workers", 1)),
        )


@dataclass
class BatchReport:
    header: dict
    rows: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(1 for row in self.rows for v in row["verdicts"].values() if v in ("fail", "error"))

    @property
    def audits(self) -> int:
        return sum(1 for row in self.rows for v in row["verdicts"].values() if v in ("pass", "fail", "error"))

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "rows": self.rows,
            "summary": {"rows": len(self.rows), "audits": self.audits, "failures": self.failures},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def human_summary(self) -> str:
        lines = [f"{len(self.rows)} rows, {self.audits} audits, {self.failures} failures"]
        per = {}
        for row in self.rows:
            key = row["algorithm"]
            stats = per.setdefault(key, {"pass": 0, "fail": 0, "error": 0, "skipped": 0})
            if row.get("status") == "skipped":
                stats["skipped"] += 1
            for v in row["verdicts"].values():
                if v in stats:
                    stats[v] += 1
        for key in sorted(per):
            s = per[key]
            lines.append(f"  {key}: {s['pass']} pass, {s['fail']} fail, {s['error']} error, {s['skipped']} skipped rows")
        ratios = [Fraction(r["ratio"]) for r in self.rows if r.get("ratio") is not None]
        if ratios:
            lines.append(f"  max sc/opt ~ {float(max(ratios)):.6f} (approximate)")
        return "\n".join(lines)


def _run_algorithm(name, inst, cfg):
    if name == "rwps":
        return rwps(inst), None
    if name == "wefxy":
        return wefxy_allocation(inst, cfg.x, cfg.y), None
    if name == "bivalued":
        return solve_wef1_po(inst)
    if name == "waw":
        return weighted_adjusted_winner(inst), None
    if name == "two-po":
        return wef1_po_two_agents(inst), None
    if name == "goods":
        return goods_weighted_protocol(inst), None
    raise InvalidSpec(f"unknown algorithm {name!r}")


def _audit(name, inst, alloc, state, cfg):
    if name in AUDITS:
        return AUDITS[name](inst, alloc).verdict
    if name == "wefxy":
        return check_wefxy(inst, alloc, cfg.x, cfg.y).verdict
    if name == "po":
        return check_po_bruteforce(inst, alloc).verdict
    if name == "equilibrium":
        return "pass" if verify_equilibrium(inst, state) else "fail"
    if name == "pwef1":
        return check_pwef1(state).verdict
    if name == "pof-bound":
        norm = normalize_costs(inst)
        alpha = max(norm.weights) / min(norm.weights)
        opt, _ = opt_social_cost(norm)
        return "pass" if social_cost(norm, alloc) <= (4 + alpha) / 4 * opt else "fail"
    raise InvalidSpec(f"unknown audit {name!r}")


def _process(job):
    instance_id, spec, cfg = job
    inst = generate(spec)
    opt, _ = opt_social_cost(inst)
    rows = []
    for algo in cfg.algorithms:
        row = {"instance_id": instance_id, "algorithm": algo, "n": inst.n, "m": inst.m, "verdicts": {}}
        try:
            alloc, state = _run_algorithm(algo, inst, cfg)
        except (NotBivalued, WrongAgentCount) as exc:
            row.update(status="skipped", reason=type(exc).__name__, sc=None, opt=format_rational(opt), ratio=None)
            rows.append(row)
            continue
        except Exception as exc:  # reported per row, never aborts the batch
            row.update(status="error", reason=f"{type(exc).__name__}: {exc}", sc=None, opt=format_rational(opt), ratio=None)
            row["verdicts"]["run"] = "error"
            rows.append(row)
            continue
        audits = list(DEFAULT_AUDITS[algo]) + [a for a in cfg.audits if a not in DEFAULT_AUDITS[algo]]
        for name in audits:
            try:
                row["verdicts"][name] = _audit(name, inst, alloc, state, cfg)
            except (BudgetExceeded, ZeroTotalCost):
                row["verdicts"][name] = "skipped"
            except Exception:
                logger.exception("audit %s failed on %s", name, instance_id)
                row["verdicts"][name] = "error"
        sc = social_cost(inst, alloc)
        row.update(
            status="ok",
            allocation=alloc.to_dict(inst),
            sc=format_rational(sc),
            opt=format_rational(opt),
            ratio=format_rational(sc / opt) if opt else None,
        )
        rows.append(row)
    return rows


def run_batch(config) -> BatchReport:
    """Run a batch described by a :class:`BatchConfig` or its dict form."""
    cfg = config if isinstance(config, BatchConfig) else BatchConfig.from_dict(config)
    jobs = []
    for block, (spec, count) in enumerate(cfg.specs):
        for idx in range(count):
            jobs.append((f"{block + 1}-{spec.kind}-{idx + 1}", spec.with_seed(spec.seed + idx), cfg))
    header = {
        "tool": "wefchores",
        "version": __version__,
        "generator": GENERATOR_ALGORITHM,
        "algorithms": list(cfg.algorithms),
        "audits": list(cfg.audits),
        "specs": [dict(spec.to_dict(), count=count) for spec, count in cfg.specs],
    }
    report = BatchReport(header)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_process, jobs, chunksize=8))
    else:
        results = [_process(job) for job in jobs]
    for rows in results:
        report.rows.extend(rows)
    return report
