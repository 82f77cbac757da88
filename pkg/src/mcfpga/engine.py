"""Map/reduce Monte Carlo executor with interchangeable schedules.

The map phase simulates paths and reduces them locally to a
:class:`~mcfpga._accum.Partial` (sum, sum of squares, count).  Only partials
leave a worker, mirroring the device/host split where just the per-range
results cross the bus.  The reduce phase combines partials in ascending range
order on the calling thread.

Schedules
---------
``baseline``
    One worker, paths processed batch after batch.
``task-parallel`` (``tp:P``)
    ``P`` workers over the contiguous ranges of :func:`partition_indices`.
``pipeline-parallel`` (``pp:U``)
    One worker keeping ``U`` path batches in flight, advanced round-robin one
    step at a time (the software analogue of an unrolled pipeline).
``combined`` (``combined:P,U``)
    Both at once.

Because draws are addressed by path id and sums are exact, every schedule
returns bit-identical prices.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import metrics, payoffs, simcore
from ._accum import Partial
from .errors import ConfigurationError, IncompleteReductionError

__all__ = [
    "MODES",
    "ExecutionStrategy",
    "RunResult",
    "partition_indices",
    "interleave_schedule",
    "map_range",
    "reduce_deterministic",
    "run",
]

MODES = ("baseline", "task-parallel", "pipeline-parallel", "combined")

# Paths per vectorised batch; bounds memory, does not affect results.
DEFAULT_BATCH = 1 << 15


@dataclass(frozen=True)
class ExecutionStrategy:
    mode: str = "baseline"
    workers: int = 1
    interleave: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown execution mode {self.mode!r}")
        if self.workers < 1 or self.interleave < 1:
            raise ConfigurationError("workers and interleave must be >= 1")
        if self.mode == "baseline" and (self.workers, self.interleave) != (1, 1):
            raise ConfigurationError("baseline requires P=1 and U=1")
        if self.mode == "task-parallel" and self.interleave != 1:
            raise ConfigurationError("task-parallel requires U=1")
        if self.mode == "pipeline-parallel" and self.workers != 1:
            raise ConfigurationError("pipeline-parallel requires P=1")

    @classmethod
    def parse(cls, text: str) -> "ExecutionStrategy":
        """Parse ``baseline``, ``tp:P``, ``pp:U`` or ``combined:P,U``."""
        text = text.strip()
        name, _, arg = text.partition(":")
        try:
            if name == "baseline" and not arg:
                return cls()
            if name == "tp":
                return cls("task-parallel", workers=int(arg))
            if name == "pp":
                return cls("pipeline-parallel", interleave=int(arg))
            if name == "combined":
                p, u = arg.split(",")
                return cls("combined", workers=int(p), interleave=int(u))
        except ValueError as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad strategy {text!r}: {exc}") from None
        raise ConfigurationError(f"bad strategy {text!r}")

    def label(self) -> str:
        if self.mode == "baseline":
            return "baseline"
        if self.mode == "task-parallel":
            return f"tp:{self.workers}"
        if self.mode == "pipeline-parallel":
            return f"pp:{self.interleave}"
        return f"combined:{self.workers},{self.interleave}"


@dataclass(frozen=True)
class RunResult:
    price: float
    stderr: float
    latency: float
    flops: int
    strategy: ExecutionStrategy
    seed: int
    paths: int
    energy: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "price": self.price,
            "stderr": self.stderr,
            "latency": self.latency,
            "flops": self.flops,
            "energy": self.energy,
            "strategy": self.strategy.label(),
            "seed": self.seed,
            "paths": self.paths,
        }


def partition_indices(N: int, P: int) -> List[range]:
    """Split ``[0, N)`` into ``P`` contiguous ranges at ``floor(p*N/P)``."""
    if P < 1:
        raise ConfigurationError("P must be >= 1")
    if N < 0:
        raise ConfigurationError("N must be >= 0")
    bounds = [p * N // P for p in range(P + 1)]
    return [range(bounds[p], bounds[p + 1]) for p in range(P)]


def interleave_schedule(path_range: Sequence[int], U: int, steps: int) -> Iterator[Tuple[int, int]]:
    """Work-item order for ``U`` paths in flight.

    Paths are taken in groups of ``U``; within a group every path advances
    one step before any advances the next.  ``U=1`` is plain sequential order.
    """
    if U < 1:
        raise ConfigurationError("U must be >= 1")
    ids = list(path_range)
    for g in range(0, len(ids), U):
        group = ids[g : g + U]
        for step in range(steps):
            for pid in group:
                yield pid, step


def _batches(path_range: range, batch: int) -> List[np.ndarray]:
    return [
        np.arange(start, min(start + batch, path_range.stop), dtype=np.uint64)
        for start in range(path_range.start, path_range.stop, batch)
    ]


def map_range(task, path_range: range, seed: int, interleave: int = 1, batch: int = DEFAULT_BATCH) -> Partial:
    """Simulate one contiguous range and reduce it to a partial.

    Batches of paths play the role of in-flight paths: with ``interleave=U``
    groups of ``U`` batches are stepped round-robin following
    :func:`interleave_schedule`.
    """
    units = _batches(path_range, batch)
    if not units:
        return Partial.empty()
    model, spec, dt = task.model, task.payoff, task.dt
    states = {}
    obs = {}
    partial = Partial.empty()
    for g in range(0, len(units), interleave):
        group = range(g, min(g + interleave, len(units)))
        for k in group:
            states[k] = simcore.initial_state(model, units[k].size)
            obs[k] = payoffs.initial_observation(units[k].size)
        for k, step in interleave_schedule(group, interleave, task.steps):
            states[k] = simcore.advance(model, states[k], seed, units[k], step, dt)
            obs[k] = payoffs.accumulate(obs[k], spec, states[k].s)
        for k in group:
            values = payoffs.payoff(spec, states.pop(k), obs.pop(k))
            partial = partial + Partial.of(values)
    return partial


def reduce_deterministic(partials: Sequence[Optional[Partial]]) -> Partial:
    """Combine per-range partials in ascending range order."""
    if any(p is None for p in partials):
        missing = [i for i, p in enumerate(partials) if p is None]
        raise IncompleteReductionError(f"missing partials for ranges {missing}")
    total = Partial.empty()
    for p in partials:
        total = total + p
    return total


def run(
    task,
    strategy: ExecutionStrategy = ExecutionStrategy(),
    seed: int = 0,
    power_trace=None,
    costs=None,
    batch: int = DEFAULT_BATCH,
) -> RunResult:
    """Price ``task`` under ``strategy``.

    ``power_trace`` (a sequence of :class:`~mcfpga.metrics.PowerSample`)
    attaches an energy figure to the result.
    """
    simcore.RngKey(seed, 0, 0)  # validates the seed range
    ranges = partition_indices(task.paths, strategy.workers)
    partials: List[Optional[Partial]] = [None] * len(ranges)

    def work(i):
        partials[i] = map_range(task, ranges[i], seed, strategy.interleave, batch)

    def execute():
        if strategy.workers == 1:
            work(0)
        else:
            with ThreadPoolExecutor(max_workers=strategy.workers) as pool:
                # consume to surface worker exceptions
                list(pool.map(work, range(len(ranges))))
        return reduce_deterministic(partials)

    total, latency = metrics.measure_latency(execute)
    mean, stderr = total.mean_stderr()
    price = payoffs.discount(mean, _rate(task.model), task.maturity, task.valuation_time)
    stderr = payoffs.discount(stderr, _rate(task.model), task.maturity, task.valuation_time)
    report = metrics.flop_report(task, costs or metrics.OpCostTable())
    energy = None
    if power_trace is not None:
        energy = metrics.integrate_power(power_trace).joules
    return RunResult(
        price=float(price),
        stderr=float(stderr),
        latency=latency,
        flops=report.total,
        strategy=strategy,
        seed=seed,
        paths=task.paths,
        energy=energy,
    )


def _rate(model) -> float:
    return float(model.r)


def available_cores() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1
