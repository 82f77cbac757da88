"""Monte Carlo option pricing engine with a heterogeneous-platform benchmark lab."""

from .engine import ExecutionStrategy, RunResult, run
from .payoffs import OptionTask, PayoffSpec, bs_closed_form
from .simcore import GbmParams, HestonParams
from .tasks import load_tasks

__all__ = [
    "ExecutionStrategy",
    "RunResult",
    "run",
    "OptionTask",
    "PayoffSpec",
    "bs_closed_form",
    "GbmParams",
    "HestonParams",
    "load_tasks",
]

__version__ = "0.1.0"
