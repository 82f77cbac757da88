"""Counter-based random numbers and asset-path evolution.

Every random draw is addressed by ``(global_seed, path_id, step, dim)`` and
produced by a Philox-4x32-10 block cipher, so a path's draws do not depend
on which worker simulates it or in what order.  Two 53-bit uniforms are taken
from each 128-bit Philox block: ``dim`` 0 and 1 share the block keyed by
``dim // 2 == 0`` and use its lower and upper half respectively.

Models
------
* Black-Scholes geometric Brownian motion, exact log-normal step.
* Heston stochastic volatility, full-truncation Euler with a log-Euler
  spot update::

      v+ = max(v, 0)
      s' = s * exp((r - v+/2) dt + sqrt(v+ dt) z1)
      v' = v + kappa (theta - v+) dt + xi sqrt(v+ dt) (rho z1 + sqrt(1 - rho^2) z2)

All step functions accept scalars or numpy arrays and evaluate the same
expression tree either way, so a single path simulated alone is
bit-identical to the same path inside a large batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import ndtri

from . import payoffs

__all__ = [
    "RngKey",
    "GbmParams",
    "HestonParams",
    "PathState",
    "philox4x32",
    "uniform",
    "uniforms",
    "uniform_pair",
    "inverse_normal",
    "gaussian",
    "gbm_step",
    "heston_step",
    "initial_state",
    "advance",
    "simulate_paths",
    "simulate_path",
]

_M32 = 0xFFFFFFFF
_PHILOX_M0 = np.uint64(0xD2511F53)
_PHILOX_M1 = np.uint64(0xCD9E8D57)
_PHILOX_W0 = 0x9E3779B9
_PHILOX_W1 = 0xBB67AE85
_PHILOX_ROUNDS = 10

_TWO_M53 = 2.0**-53
# Substituted for an all-zero draw so the inverse normal CDF stays finite.
_TINY_UNIFORM = 2.0**-54

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class RngKey:
    """Address of one uniform draw."""

    global_seed: int
    path_id: int
    step: int
    dim: int = 0

    def __post_init__(self):
        _check_range("global_seed", self.global_seed, 64)
        _check_range("path_id", self.path_id, 64)
        _check_range("step", self.step, 32)
        _check_range("dim", self.dim, 8)


def _check_range(name, value, bits):
    if not 0 <= int(value) < (1 << bits):
        raise ValueError(f"{name}={value} outside [0, 2**{bits})")


@dataclass(frozen=True)
class GbmParams:
    """Black-Scholes dynamics: spot ``s0``, volatility ``sigma``, rate ``r``."""

    s0: float
    sigma: float
    r: float

    def __post_init__(self):
        if not self.s0 > 0:
            raise ValueError("s0 must be positive")
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class HestonParams:
    """Heston dynamics.

    ``v0`` and ``theta`` are variances (volatility squared), ``kappa`` the
    mean-reversion speed, ``xi`` the volatility of variance and ``rho`` the
    correlation between the spot and variance shocks.
    """

    s0: float
    v0: float
    kappa: float
    theta: float
    xi: float
    rho: float
    r: float

    def __post_init__(self):
        if not self.s0 > 0:
            raise ValueError("s0 must be positive")
        for name in ("v0", "theta", "xi"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")


@dataclass(frozen=True)
class PathState:
    """Spot ``s`` and, for Heston, the untruncated variance ``v``."""

    s: ArrayLike
    v: Optional[ArrayLike] = None


# --------------------------------------------------------------------------
# Random numbers
# --------------------------------------------------------------------------


def philox4x32(counter, key, rounds=_PHILOX_ROUNDS):
    """Philox-4x32 block function.

    ``counter`` is four 32-bit words and ``key`` two; each word may be an int
    or a uint64 array holding 32-bit values (arrays broadcast).  Returns four
    uint64 arrays of 32-bit output words.
    """
    c0, c1, c2, c3 = (np.asarray(w, dtype=np.uint64) for w in counter)
    k0, k1 = int(key[0]) & _M32, int(key[1]) & _M32
    m32 = np.uint64(_M32)
    for i in range(rounds):
        if i:
            k0 = (k0 + _PHILOX_W0) & _M32
            k1 = (k1 + _PHILOX_W1) & _M32
        p0 = c0 * _PHILOX_M0
        p1 = c2 * _PHILOX_M1
        c0, c1, c2, c3 = (
            (p1 >> np.uint64(32)) ^ c1 ^ np.uint64(k0),
            p1 & m32,
            (p0 >> np.uint64(32)) ^ c3 ^ np.uint64(k1),
            p0 & m32,
        )
    return c0, c1, c2, c3


def _blocks(global_seed, path_ids, step, block):
    path_ids = np.asarray(path_ids, dtype=np.uint64)
    seed = int(global_seed)
    counter = (
        path_ids & np.uint64(_M32),
        path_ids >> np.uint64(32),
        np.uint64(step),
        np.uint64(block),
    )
    return philox4x32(counter, (seed & _M32, seed >> 32))


def _to_unit(hi, lo):
    bits = (hi << np.uint64(21)) | (lo >> np.uint64(11))
    u = bits.astype(np.float64) * _TWO_M53
    return np.maximum(u, _TINY_UNIFORM)


def uniform_pair(global_seed, path_ids, step, block=0):
    """Uniforms for ``dim = 2*block`` and ``dim = 2*block + 1`` from one block."""
    w0, w1, w2, w3 = _blocks(global_seed, path_ids, step, block)
    return _to_unit(w0, w1), _to_unit(w2, w3)


def uniforms(global_seed, path_ids, step, dim=0):
    """Vectorised :func:`uniform` over an array of path ids."""
    pair = uniform_pair(global_seed, path_ids, step, dim >> 1)
    return pair[dim & 1]


def uniform(key: RngKey) -> float:
    """Uniform deviate in ``(0, 1)`` with 53-bit resolution, a pure function of ``key``."""
    return float(uniforms(key.global_seed, key.path_id, key.step, key.dim))


def inverse_normal(u):
    """Standard normal quantile function."""
    return ndtri(u)


def gaussian(key: RngKey) -> float:
    return float(inverse_normal(uniform(key)))


# --------------------------------------------------------------------------
# Model steps
# --------------------------------------------------------------------------


def gbm_step(state: PathState, p: GbmParams, z, dt: float) -> PathState:
    drift = (p.r - 0.5 * p.sigma * p.sigma) * dt
    vol = p.sigma * math.sqrt(dt)
    return PathState(s=state.s * np.exp(drift + vol * z))


def heston_step(state: PathState, p: HestonParams, z1, z2, dt: float) -> PathState:
    vp = np.maximum(state.v, 0.0)
    sq = np.sqrt(vp * dt)
    s = state.s * np.exp((p.r - 0.5 * vp) * dt + sq * z1)
    zc = p.rho * z1 + math.sqrt(1.0 - p.rho * p.rho) * z2
    v = state.v + p.kappa * (p.theta - vp) * dt + p.xi * sq * zc
    return PathState(s=s, v=v)


def initial_state(model, n: Optional[int] = None) -> PathState:
    """Starting state for ``n`` paths (scalars when ``n`` is None)."""
    if n is None:
        s = float(model.s0)
        v = float(model.v0) if isinstance(model, HestonParams) else None
    else:
        s = np.full(n, float(model.s0))
        v = np.full(n, float(model.v0)) if isinstance(model, HestonParams) else None
    return PathState(s=s, v=v)


def advance(model, state: PathState, global_seed, path_ids, step: int, dt: float) -> PathState:
    """Apply one model step to the paths ``path_ids`` using draws for ``step``."""
    u1, u2 = uniform_pair(global_seed, path_ids, step)
    if isinstance(model, HestonParams):
        return heston_step(state, model, inverse_normal(u1), inverse_normal(u2), dt)
    if isinstance(model, GbmParams):
        return gbm_step(state, model, inverse_normal(u1), dt)
    raise TypeError(f"unsupported model {type(model).__name__}")


def simulate_paths(task, path_ids, global_seed):
    """Simulate a batch of paths; returns terminal state and observations.

    Results are elementwise identical to calling :func:`simulate_path` on
    each path id separately.
    """
    path_ids = np.asarray(path_ids, dtype=np.uint64)
    state = initial_state(task.model, path_ids.size)
    obs = payoffs.initial_observation(path_ids.size)
    dt = task.dt
    for step in range(task.steps):
        state = advance(task.model, state, global_seed, path_ids, step, dt)
        obs = payoffs.accumulate(obs, task.payoff, state.s)
    return state, obs


def simulate_path(task, path_id: int, global_seed: int):
    """Simulate a single path; a pure function of its arguments."""
    state, obs = simulate_paths(task, np.array([path_id], dtype=np.uint64), global_seed)
    v = None if state.v is None else float(state.v[0])
    return (
        PathState(s=float(state.s[0]), v=v),
        payoffs.PathObservation(
            running_sum=float(obs.running_sum[0]),
            breached=bool(obs.breached[0]),
            count=obs.count,
        ),
    )
