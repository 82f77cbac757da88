"""Task definition files.

A task file is INI-style text with one section per task; keys are the
:class:`~mcfpga.payoffs.OptionTask` fields plus the model parameters::

    [he-eu]
    model = heston          ; or gbm
    s0 = 100.0
    v0 = 0.04
    kappa = 2.0
    theta = 0.04
    xi = 0.3
    rho = -0.7
    r = 0.05
    payoff = european-call
    strike = 100.0
    maturity = 1.0
    paths = 10000000
    steps = 4096
"""

from __future__ import annotations

import configparser
from importlib import resources
from pathlib import Path
from typing import Dict, Optional

from .errors import ConfigurationError, DataParseError
from .payoffs import OptionTask, PayoffSpec
from .simcore import GbmParams, HestonParams

__all__ = ["bundled_task_file", "load_tasks", "resolve_task", "parse_task_section"]

BENCHMARK_TASKS = ("he-eu", "he-ba", "he-do", "he-di", "bl-as")


def bundled_task_file() -> Path:
    return Path(str(resources.files("mcfpga") / "data" / "tasks.ini"))


def ini_error_line(exc):
    """Line number carried by a configparser error, if any."""
    if getattr(exc, "lineno", None):
        return exc.lineno
    errors = getattr(exc, "errors", None)
    return errors[0][0] if errors else None


def _float(section, key, default=None):
    if key not in section:
        if default is None:
            raise KeyError(key)
        return default
    return float(section[key])


def _optional(section, key):
    return float(section[key]) if key in section else None


def parse_task_section(name: str, section) -> OptionTask:
    kind = section.get("model", "").strip().lower()
    r = _float(section, "r")
    s0 = _float(section, "s0")
    if kind == "heston":
        model = HestonParams(
            s0=s0,
            v0=_float(section, "v0"),
            kappa=_float(section, "kappa"),
            theta=_float(section, "theta"),
            xi=_float(section, "xi"),
            rho=_float(section, "rho"),
            r=r,
        )
    elif kind in ("gbm", "black-scholes"):
        model = GbmParams(s0=s0, sigma=_float(section, "sigma"), r=r)
    else:
        raise ValueError(f"unknown model {kind!r}")
    spec = PayoffSpec(
        kind=section.get("payoff", "").strip(),
        strike=_float(section, "strike", 0.0),
        lower_barrier=_optional(section, "lower_barrier"),
        upper_barrier=_optional(section, "upper_barrier"),
        digital_amount=_float(section, "digital_amount", 1.0),
    )
    ref = section.get("reference_flops")
    return OptionTask(
        designation=name,
        model=model,
        payoff=spec,
        maturity=_float(section, "maturity"),
        valuation_time=_float(section, "valuation_time", 0.0),
        paths=int(section["paths"]),
        steps=int(section["steps"]),
        reference_flops=int(ref) if ref not in (None, "") else None,
    )


def load_tasks(path=None) -> Dict[str, OptionTask]:
    """Read a task file (the bundled one when ``path`` is None)."""
    path = Path(path) if path is not None else bundled_task_file()
    parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
    try:
        text = path.read_text(encoding="utf-8")
        parser.read_string(text, source=str(path))
    except OSError as exc:
        raise DataParseError(str(exc), path) from None
    except configparser.Error as exc:
        raise DataParseError(str(exc).splitlines()[0], path, ini_error_line(exc)) from None
    lines = text.splitlines()
    tasks = {}
    for name in parser.sections():
        try:
            tasks[name] = parse_task_section(name, parser[name])
        except (KeyError, ValueError) as exc:
            lineno = next((i for i, ln in enumerate(lines, 1) if ln.strip() == f"[{name}]"), None)
            detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
            raise DataParseError(f"task [{name}]: {detail}", path, lineno) from None
    if not tasks:
        raise DataParseError("no tasks defined", path)
    return tasks


def resolve_task(name: str, path=None, tasks: Optional[Dict[str, OptionTask]] = None) -> OptionTask:
    tasks = tasks if tasks is not None else load_tasks(path)
    try:
        return tasks[name]
    except KeyError:
        raise ConfigurationError(f"unknown task {name!r} (known: {', '.join(tasks)})") from None
