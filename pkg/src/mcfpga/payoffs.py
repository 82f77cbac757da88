"""Option contracts, discrete path monitoring and the Monte Carlo estimator.

Barrier kinds are knock-out options monitored at every path point; touching
a barrier (``s <= lower`` or ``s >= upper``) extinguishes the payoff.  The
Asian kind is a call on the arithmetic mean of the monitored spots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr

from . import _accum
from .errors import EmptySampleError, InvalidObservationError

__all__ = [
    "KINDS",
    "BARRIER_KINDS",
    "PayoffSpec",
    "PathObservation",
    "OptionTask",
    "initial_observation",
    "accumulate",
    "payoff",
    "discount",
    "estimate",
    "bs_closed_form",
]

KINDS = (
    "european-call",
    "european-put",
    "barrier-knockout",
    "double-barrier-knockout",
    "digital-double-barrier",
    "arithmetic-asian-call",
)
BARRIER_KINDS = ("barrier-knockout", "double-barrier-knockout", "digital-double-barrier")
_STRIKE_KINDS = (
    "european-call",
    "european-put",
    "barrier-knockout",
    "double-barrier-knockout",
    "arithmetic-asian-call",
)


@dataclass(frozen=True)
class PayoffSpec:
    kind: str
    strike: float = 0.0
    lower_barrier: Optional[float] = None
    upper_barrier: Optional[float] = None
    digital_amount: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown payoff kind {self.kind!r}")
        if self.kind in _STRIKE_KINDS and not self.strike > 0:
            raise ValueError(f"{self.kind} requires a positive strike")
        if self.kind == "barrier-knockout":
            if self.lower_barrier is None and self.upper_barrier is None:
                raise ValueError("barrier-knockout requires a barrier")
        elif self.kind in ("double-barrier-knockout", "digital-double-barrier"):
            if self.lower_barrier is None or self.upper_barrier is None:
                raise ValueError(f"{self.kind} requires both barriers")
        if (
            self.lower_barrier is not None
            and self.upper_barrier is not None
            and not self.lower_barrier < self.upper_barrier
        ):
            raise ValueError("lower_barrier must be below upper_barrier")

    @property
    def is_barrier(self) -> bool:
        return self.kind in BARRIER_KINDS

    @property
    def is_asian(self) -> bool:
        return self.kind == "arithmetic-asian-call"

    @property
    def n_barriers(self) -> int:
        if not self.is_barrier:
            return 0
        return (self.lower_barrier is not None) + (self.upper_barrier is not None)


@dataclass(frozen=True)
class PathObservation:
    """Path-dependent inputs to the terminal payoff.

    Fields are scalars for a single path or arrays for a batch; ``count`` is
    always the number of :func:`accumulate` calls.
    """

    running_sum: Union[float, np.ndarray] = 0.0
    breached: Union[bool, np.ndarray] = False
    count: int = 0


@dataclass(frozen=True)
class OptionTask:
    """One pricing task: model, contract, horizon and simulation size.

    ``model`` is a :class:`~mcfpga.simcore.GbmParams` or
    :class:`~mcfpga.simcore.HestonParams`.  ``reference_flops`` optionally
    records an externally measured FLOP/simulation figure for the task.
    """

    designation: str
    model: object
    payoff: PayoffSpec
    maturity: float
    paths: int
    steps: int
    valuation_time: float = 0.0
    reference_flops: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.valuation_time > self.maturity:
            raise ValueError("valuation time must not exceed maturity")

    @property
    def horizon(self) -> float:
        return self.maturity - self.valuation_time

    @property
    def dt(self) -> float:
        return self.horizon / self.steps if self.steps else 0.0

    def with_size(self, paths=None, steps=None) -> "OptionTask":
        return replace(
            self,
            paths=self.paths if paths is None else int(paths),
            steps=self.steps if steps is None else int(steps),
        )


def initial_observation(n: Optional[int] = None) -> PathObservation:
    if n is None:
        return PathObservation()
    return PathObservation(running_sum=np.zeros(n), breached=np.zeros(n, dtype=bool), count=0)


def accumulate(obs: PathObservation, spec: PayoffSpec, s) -> PathObservation:
    """Record one monitored spot price."""
    running_sum = obs.running_sum
    breached = obs.breached
    if spec.is_asian:
        running_sum = running_sum + s
    elif spec.is_barrier:
        if spec.lower_barrier is not None:
            breached = breached | (s <= spec.lower_barrier)
        if spec.upper_barrier is not None:
            breached = breached | (s >= spec.upper_barrier)
    return PathObservation(running_sum=running_sum, breached=breached, count=obs.count + 1)


def payoff(spec: PayoffSpec, terminal, obs: PathObservation):
    """Undiscounted payoff at maturity (scalar or array, always >= 0)."""
    s = terminal.s
    kind = spec.kind
    if kind == "european-put":
        return np.maximum(spec.strike - s, 0.0)
    if kind == "arithmetic-asian-call":
        if obs.count == 0:
            raise InvalidObservationError("Asian payoff needs at least one observation")
        return np.maximum(obs.running_sum / obs.count - spec.strike, 0.0)
    intrinsic = np.maximum(s - spec.strike, 0.0)
    if kind == "european-call":
        return intrinsic
    if kind == "digital-double-barrier":
        return np.where(obs.breached, 0.0, spec.digital_amount)
    return np.where(obs.breached, 0.0, intrinsic)


def discount(value, r: float, T: float, t: float = 0.0):
    if t > T:
        raise ValueError("valuation time after maturity")
    return value * math.exp(-r * (T - t))


def estimate(values) -> tuple:
    """Mean and standard error of ``values``.

    The sums are accumulated exactly, so the result does not depend on the
    order or grouping of ``values``.  The standard error uses the unbiased
    sample variance and is 0 for a single value.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptySampleError("cannot estimate from an empty sample")
    return _accum.Partial.of(values).mean_stderr()


def bs_closed_form(p, K: float, T: float) -> float:
    """Black-Scholes price of a European call on the GBM model ``p``."""
    if K <= 0:
        return float(p.s0)
    forward_k = K * math.exp(-p.r * T)
    if p.sigma == 0 or T == 0:
        return max(p.s0 - forward_k, 0.0)
    vol = p.sigma * math.sqrt(T)
    d1 = (math.log(p.s0 / K) + (p.r + 0.5 * p.sigma**2) * T) / vol
    d2 = d1 - vol
    return float(p.s0 * ndtr(d1) - forward_k * ndtr(d2))
