"""FLOP accounting, latency timing and energy integration.

FLOPs are counted statically from the operations each model step and payoff
declares, weighted by an :class:`OpCostTable`.  Boolean bookkeeping (the
knock-out flag and the gating it drives) is not floating-point work and is
free; a float comparison or select costs ``compare``.
"""

from __future__ import annotations

import csv
import math
import time
from collections import Counter
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Tuple

from .errors import (
    ConfigurationError,
    DataParseError,
    InsufficientTraceError,
    InvalidEnergyError,
    MalformedTraceError,
)

__all__ = [
    "OpCostTable",
    "FlopReport",
    "PowerSample",
    "EnergyReport",
    "step_ops",
    "accumulate_ops",
    "terminal_ops",
    "flops_per_sim",
    "flop_report",
    "measure_latency",
    "integrate_power",
    "efficiency",
    "load_cost_table",
    "load_power_trace",
]


@dataclass(frozen=True)
class OpCostTable:
    """FLOP weight per operation class (``add`` covers subtraction)."""

    add: int = 1
    mul: int = 1
    div: int = 1
    compare: int = 1
    exp: int = 8
    log: int = 8
    sqrt: int = 1
    icdf: int = 20

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 0:
                raise ConfigurationError(f"cost {f.name}={value!r} must be a non-negative integer")
        if self.compare != 1:
            raise ConfigurationError("compare/select weight is fixed at 1")

    def cost(self, ops) -> int:
        total = 0
        for name, n in ops.items():
            if name not in _OP_CLASSES:
                raise ConfigurationError(f"unknown operation class {name!r}")
            total += getattr(self, name) * n
        return total


_OP_CLASSES = frozenset(f.name for f in fields(OpCostTable))


def step_ops(model) -> Counter:
    """Operations per path per time step for ``model``."""
    from .simcore import GbmParams, HestonParams

    if isinstance(model, HestonParams):
        # mirrors simcore.heston_step term by term
        return Counter(icdf=2, compare=1, mul=11, add=6, sqrt=1, exp=1)
    if isinstance(model, GbmParams):
        return Counter(icdf=1, mul=2, add=1, exp=1)
    raise ConfigurationError(f"no cost model for {type(model).__name__}")


def accumulate_ops(spec) -> Counter:
    if spec.is_asian:
        return Counter(add=1)
    if spec.is_barrier:
        return Counter(compare=spec.n_barriers)
    return Counter()


def terminal_ops(spec) -> Counter:
    if spec.is_asian:
        return Counter(div=1, add=1, compare=1)
    ops = Counter(add=1, compare=1)
    if spec.kind == "digital-double-barrier":
        # the fixed amount replaces the intrinsic value via one select
        ops["compare"] += 1
    return ops


def reduce_ops(n: int) -> Counter:
    """Host-side work for ``n`` path values: running sums, then the summary."""
    per_path = Counter(add=2, mul=1)
    finish = Counter(div=3, mul=4, add=2, sqrt=1, exp=1)
    return Counter({k: per_path[k] * n + finish[k] for k in per_path | finish})


def flops_per_sim(task, costs: OpCostTable = OpCostTable()) -> int:
    per_step = costs.cost(step_ops(task.model)) + costs.cost(accumulate_ops(task.payoff))
    return task.steps * per_step + costs.cost(terminal_ops(task.payoff))


@dataclass(frozen=True)
class FlopReport:
    per_sim: int
    total: int
    breakdown: Dict[str, int]


def flop_report(task, costs: OpCostTable = OpCostTable()) -> FlopReport:
    path_step = task.steps * costs.cost(step_ops(task.model)) * task.paths
    payoff = (task.steps * costs.cost(accumulate_ops(task.payoff)) + costs.cost(terminal_ops(task.payoff))) * task.paths
    reduce = costs.cost(reduce_ops(task.paths))
    per_sim = flops_per_sim(task, costs)
    return FlopReport(
        per_sim=per_sim,
        total=per_sim * task.paths + reduce,
        breakdown={"path_step": path_step, "payoff": payoff, "reduce": reduce},
    )


def measure_latency(action: Callable[[], object]) -> Tuple[object, float]:
    """Run ``action`` and return ``(result, elapsed_seconds)`` on a monotonic clock."""
    start = time.perf_counter()
    result = action()
    return result, time.perf_counter() - start


@dataclass(frozen=True)
class PowerSample:
    t: float
    watts: float


@dataclass(frozen=True)
class EnergyReport:
    joules: float
    mean_watts: float
    duration: float


def integrate_power(trace: Iterable[PowerSample]) -> EnergyReport:
    """Trapezoidal energy of a polled total-system power trace."""
    trace = list(trace)
    if len(trace) < 2:
        raise InsufficientTraceError("need at least two power samples")
    areas = []
    for a, b in zip(trace, trace[1:]):
        if b.t < a.t:
            raise MalformedTraceError(f"timestamp decreases at t={b.t}")
        if a.watts < 0 or b.watts < 0:
            raise MalformedTraceError("negative power sample")
        areas.append(0.5 * (a.watts + b.watts) * (b.t - a.t))
    joules = math.fsum(areas)
    duration = trace[-1].t - trace[0].t
    mean_watts = joules / duration if duration > 0 else trace[0].watts
    return EnergyReport(joules=joules, mean_watts=mean_watts, duration=duration)


def efficiency(flops, joules) -> float:
    """FLOP per joule."""
    if not joules > 0:
        raise InvalidEnergyError(f"energy must be positive, got {joules}")
    return flops / joules


def load_cost_table(path) -> OpCostTable:
    """Read ``name = weight`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, weight = line.partition("=")
        name = name.strip()
        if not sep:
            raise DataParseError(f"expected name=value, got {raw!r}", path, lineno)
        if name not in _OP_CLASSES:
            raise ConfigurationError(f"{path}:{lineno}: unknown operation class {name!r}")
        try:
            values[name] = int(weight.strip())
        except ValueError:
            raise DataParseError(f"weight for {name!r} is not an integer", path, lineno) from None
    return OpCostTable(**values)


def load_power_trace(path) -> List[PowerSample]:
    """Read ``t_seconds,watts`` rows; a non-numeric first row is a header."""
    samples = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            try:
                t, w = (float(x) for x in row)
            except ValueError:
                if lineno == 1:
                    continue
                raise DataParseError(f"bad power sample {row!r}", path, lineno) from None
            samples.append(PowerSample(t, w))
    return samples
