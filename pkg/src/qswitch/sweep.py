"""Parameter sweeps over (p, q), heralding experiments and table output."""
from __future__ import annotations

import csv
import enum
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .channels import FlipParams
from .fidelity import (
    FidelitySweepPoint,
    QuadratureSpec,
    avg_fidelity_numeric,
    f_ct_closed,
    f_qs_closed,
    gain_ratio,
)
from .qmat import bell_state
from .switch import distribute_ct, distribute_qs

BASE_COLUMNS = ["p", "q", "f_qs", "f_plus", "f_minus", "f_ct", "ratio", "herald_prob"]
SWITCH_COLUMNS = {"f_qs", "f_plus", "f_minus", "herald_prob"}
CLASSICAL_COLUMNS = {"f_ct"}
HERALD_COLUMNS = ["herald_trials", "minus_count", "empirical_rate"]


class Mode(enum.Enum):
    SWITCH = "switch"
    CLASSICAL = "classical"
    BOTH = "both"


class Format(enum.Enum):
    CSV = "csv"
    JSON = "json"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    p_steps: int = 21
    q_steps: int = 21
    p_range: Tuple[float, float] = (0.0, 1.0)
    q_range: Tuple[float, float] = (0.0, 1.0)
    mode: Mode = Mode.BOTH
    quadrature: Optional[QuadratureSpec] = None
    seed: int = 0
    herald_trials: int = 0
    diagonal: bool = False
    output_path: Optional[Path] = None
    format: Format = Format.CSV
    workers: int = 1

    def __post_init__(self):
        for name in ("p", "q"):
            steps = getattr(self, f"{name}_steps")
            lo, hi = getattr(self, f"{name}_range")
            if steps < 2:
                raise ConfigError(f"{name}_steps must be at least 2")
            if not 0.0 <= lo < hi <= 1.0:
                raise ConfigError(f"{name}_range ({lo}, {hi}) must satisfy 0 <= min < max <= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.herald_trials < 0:
            raise ConfigError("herald_trials must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def grid(self) -> List[Tuple[int, int, float, float]]:
        ps = np.linspace(*self.p_range, self.p_steps)
        if self.diagonal:
            return [(i, i, float(p), float(p)) for i, p in enumerate(ps)]
        qs = np.linspace(*self.q_range, self.q_steps)
        return [(i, j, float(p), float(q)) for i, p in enumerate(ps) for j, q in enumerate(qs)]

    def columns(self) -> List[str]:
        cols = list(BASE_COLUMNS)
        if self.quadrature is not None:
            if self.mode is not Mode.CLASSICAL:
                cols += ["f_qs_num", "f_plus_num", "f_minus_num"]
            if self.mode is not Mode.SWITCH:
                cols += ["f_ct_num"]
        if self.herald_trials > 0 and self.mode is not Mode.CLASSICAL:
            cols += HERALD_COLUMNS
        return cols

    def meta(self) -> Dict[str, Any]:
        # output path and worker count do not affect results and stay out
        return {
            "tool": "qswitch",
            "version": __version__,
            "p_steps": self.p_steps,
            "q_steps": self.q_steps,
            "p_range": list(self.p_range),
            "q_range": list(self.q_range),
            "mode": self.mode.value,
            "quadrature": None if self.quadrature is None else str(self.quadrature),
            "seed": self.seed,
            "herald_trials": self.herald_trials,
            "diagonal": self.diagonal,
        }


@dataclass
class SweepTable:
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def points(self) -> List[FidelitySweepPoint]:
        return [FidelitySweepPoint(**{c: r.get(c) for c in BASE_COLUMNS}) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, SweepTable):
            return NotImplemented
        return self.columns == other.columns and self.rows == other.rows and self.meta == other.meta


@dataclass(frozen=True)
class HeraldExperimentRecord:
    p: float
    q: float
    trials: int
    minus_count: int
    empirical_rate: float
    expected_rate: float


def point_seed(seed: int, i: int, j: int, stream: int) -> int:
    """64-bit seed for grid point ``(i, j)``, independent of evaluation order."""
    return int(np.random.SeedSequence([seed, i, j, stream]).generate_state(1, np.uint64)[0])


def run_herald_experiment(p: float, q: float, trials: int, seed: int) -> HeraldExperimentRecord:
    """Sample ``trials`` control measurements from the exact branch probabilities."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    params = FlipParams(p, q)
    _, minus = distribute_qs(params, bell_state())
    rng = np.random.default_rng(seed)
    count = int(np.count_nonzero(rng.random(trials) < minus.probability))
    return HeraldExperimentRecord(p, q, trials, count, count / trials, params.herald_prob)


def _evaluate(task) -> Dict[str, Any]:
    config, (i, j, p, q) = task
    params = FlipParams(p, q)
    row: Dict[str, Any] = dict.fromkeys(config.columns())
    row["p"], row["q"] = p, q
    qs = f_qs_closed(params)
    if config.mode is not Mode.CLASSICAL:
        row["f_qs"], row["f_plus"], row["f_minus"] = qs.f_combined, qs.f_plus, qs.f_minus
        row["herald_prob"] = params.herald_prob
    if config.mode is not Mode.SWITCH:
        row["f_ct"] = f_ct_closed(params)
    if config.mode is Mode.BOTH:
        row["ratio"] = gain_ratio(params)

    quad = config.quadrature
    if quad is not None:
        quad = quad.with_seed(point_seed(config.seed, i, j, 1))
        rho_e = bell_state()
        if config.mode is not Mode.CLASSICAL:
            plus, minus = distribute_qs(params, rho_e)
            f_plus = None if plus.empty else avg_fidelity_numeric(plus.pair_state, quad)
            f_minus = None if minus.empty else avg_fidelity_numeric(minus.pair_state, quad)
            row["f_plus_num"], row["f_minus_num"] = f_plus, f_minus
            row["f_qs_num"] = sum(
                b.probability * f for b, f in ((plus, f_plus), (minus, f_minus)) if f is not None
            )
        if config.mode is not Mode.SWITCH:
            row["f_ct_num"] = avg_fidelity_numeric(distribute_ct(params, rho_e), quad)

    if config.herald_trials > 0 and config.mode is not Mode.CLASSICAL:
        rec = run_herald_experiment(p, q, config.herald_trials, point_seed(config.seed, i, j, 0))
        row["herald_trials"] = rec.trials
        row["minus_count"] = rec.minus_count
        row["empirical_rate"] = rec.empirical_rate
    return row


def run_sweep(config: SweepConfig) -> SweepTable:
    """Evaluate every grid point; rows come back in (p index, q index) order.

    When ``config.output_path`` is set the table is also written there.
    """
    tasks = [(config, point) for point in config.grid()]
    if config.workers == 1:
        rows = [_evaluate(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    table = SweepTable(config.columns(), rows, config.meta())
    if config.output_path is not None:
        emit(table, config.format, config.output_path)
    return table


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.12g}"


def to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(row.get(c)) for c in table.columns])
    return buf.getvalue()


def to_json(table: SweepTable) -> str:
    doc = {
        "meta": table.meta,
        "columns": table.columns,
        "rows": [{c: row.get(c) for c in table.columns} for row in table.rows],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit(table: SweepTable, fmt: Format, path) -> None:
    """Write ``table`` as CSV or JSON. Identical tables give identical bytes."""
    text = to_csv(table) if Format(fmt) is Format.CSV else to_json(table)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_json(path) -> SweepTable:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return SweepTable(doc["columns"], doc["rows"], doc["meta"])
