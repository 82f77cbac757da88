"""Measured platform data and the heterogeneous placement method.

The placement flow is::

    receive -> profile -> assess -> [check availability -> implement*]
            -> execute -> return

Profiling reads measured latency/energy tables (10^7 paths per task) and
scales them linearly in the path count.  Assessment ranks platforms by the
objective; FPGA placement is used for a task iff an FPGA ranks first.  An FPGA
variant with no measurement counts as an implementation that does not exist:
it is excluded and the exclusion is recorded in the plan's rationale.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import metrics
from .errors import (
    ConfigurationError,
    DataParseError,
    EmptyDataError,
    InfeasibleWorkloadError,
    PlanIntegrityError,
    UnprofileableTaskError,
)

__all__ = [
    "VARIANTS",
    "OBJECTIVES",
    "MEASURED_PATHS",
    "DeviceProfile",
    "MeasurementRow",
    "MeasurementTable",
    "WorkloadSpec",
    "Option",
    "TaskProfile",
    "Assessment",
    "Allocation",
    "TaskDecision",
    "PartitionPlan",
    "PlatformSummary",
    "PlatformReport",
    "bundled_data_dir",
    "load_platforms",
    "load_measurements",
    "profile_workload",
    "assess_fpga",
    "choose_variant",
    "split_paths",
    "simulate_heterogeneous",
    "plan_partition",
    "report",
    "load_workload",
]

VARIANTS = ("base", "tp", "pp")
OBJECTIVES = ("min-latency", "min-energy", "max-efficiency")
KINDS = ("fpga", "cpu", "gpu")
# Every table cell was measured with this many paths.
MEASURED_PATHS = 10_000_000
MEASURED_STEPS = 4096
_ABSENT = "-"


def bundled_data_dir() -> Path:
    return Path(str(resources.files("mcfpga") / "data"))


# --------------------------------------------------------------------------
# Data model and loading
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DeviceProfile:
    name: str
    kind: str
    idle_watts: float
    active_watts: float
    description: str = ""
    resources: Optional[Dict[str, int]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown device kind {self.kind!r}")
        if not self.active_watts >= self.idle_watts >= 0:
            raise ValueError(f"{self.name}: need active_watts >= idle_watts >= 0")


@dataclass(frozen=True)
class MeasurementRow:
    """One platform x task x variant cell; energy in kilojoules."""

    platform: str
    task: str
    variant: str
    latency: Optional[float] = None
    energy: Optional[float] = None
    resource_pct: Optional[Dict[str, float]] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.latency is None and self.energy is None:
            raise ValueError("a measurement needs latency or energy")
        for name, pct in (self.resource_pct or {}).items():
            if not 0 <= pct <= 100:
                raise ValueError(f"{name} use {pct}% outside [0, 100]")

    @property
    def energy_joules(self) -> Optional[float]:
        return None if self.energy is None else self.energy * 1000.0

    @property
    def mean_watts(self) -> Optional[float]:
        if self.latency is None or self.energy is None or self.latency <= 0:
            return None
        return self.energy_joules / self.latency

    @property
    def throughput(self) -> Optional[float]:
        """Paths per second at the measured scale."""
        if self.latency is None or self.latency <= 0:
            return None
        return MEASURED_PATHS / self.latency


class MeasurementTable:
    """Immutable mapping ``(platform, task, variant) -> MeasurementRow``."""

    def __init__(self, rows: Sequence[MeasurementRow], profiles: Sequence[DeviceProfile]):
        self._rows = {(r.platform, r.task, r.variant): r for r in rows}
        self._profiles = {p.name: p for p in profiles}
        self.platforms: Tuple[str, ...] = tuple(p.name for p in profiles)
        seen = []
        for r in rows:
            if r.task not in seen:
                seen.append(r.task)
        self.tasks: Tuple[str, ...] = tuple(seen)

    def __len__(self):
        return len(self._rows)

    def __iter__(self):
        return iter(self._rows.values())

    def get(self, platform, task, variant) -> Optional[MeasurementRow]:
        return self._rows.get((platform, task, variant))

    def rows_for(self, platform, task) -> List[MeasurementRow]:
        return [r for v in VARIANTS if (r := self._rows.get((platform, task, v))) is not None]

    def profile(self, platform) -> DeviceProfile:
        try:
            return self._profiles[platform]
        except KeyError:
            raise ConfigurationError(f"unknown platform {platform!r}") from None

    @property
    def profiles(self) -> List[DeviceProfile]:
        return [self._profiles[p] for p in self.platforms]

    def kind(self, platform) -> str:
        return self.profile(platform).kind


def _cell(text, path, lineno, cast=float):
    text = text.strip()
    if text == _ABSENT:
        return None
    try:
        return cast(text)
    except ValueError:
        raise DataParseError(f"bad value {text!r}", path, lineno) from None


def _read_csv(path, required):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataParseError(str(exc), path) from None
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise EmptyDataError("empty file", path)
    header = [h.strip() for h in header]
    missing = [c for c in required if c not in header]
    if missing:
        raise DataParseError(f"missing columns {missing}", path, 1)
    rows = []
    for lineno, row in enumerate(reader, 2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != len(header):
            raise DataParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
        rows.append((lineno, dict(zip(header, (c.strip() for c in row)))))
    return rows


def load_platforms(path, table_rows: Sequence[MeasurementRow] = ()) -> List[DeviceProfile]:
    """Read platform profiles.

    Active power is the highest mean power (energy / latency) observed for
    the platform in ``table_rows``; an idle power of ``-`` is replaced by the
    lowest observed mean power.
    """
    powers: Dict[str, List[float]] = {}
    for r in table_rows:
        if r.mean_watts is not None:
            powers.setdefault(r.platform, []).append(r.mean_watts)
    profiles = []
    for lineno, rec in _read_csv(path, ("name", "kind", "idle_watts")):
        name = rec["name"]
        observed = powers.get(name, [])
        idle = _cell(rec["idle_watts"], path, lineno)
        if idle is None:
            idle = min(observed) if observed else 0.0
        active = max(observed + [idle])
        res = {}
        for key in ("lut", "ff", "bram", "dsp"):
            if key in rec:
                val = _cell(rec[key], path, lineno, int)
                if val is not None:
                    res[key] = val
        try:
            profiles.append(
                DeviceProfile(
                    name=name,
                    kind=rec["kind"],
                    idle_watts=idle,
                    active_watts=active,
                    description=rec.get("description", ""),
                    resources=res or None,
                )
            )
        except ValueError as exc:
            raise DataParseError(str(exc), path, lineno) from None
    return profiles


def _load_metric(path, known_platforms):
    cells = {}
    for lineno, rec in _read_csv(path, ("platform", "task") + VARIANTS):
        if rec["platform"] not in known_platforms:
            raise DataParseError(f"unknown platform {rec['platform']!r}", path, lineno)
        for v in VARIANTS:
            value = _cell(rec[v], path, lineno)
            if value is not None:
                if value < 0:
                    raise DataParseError(f"negative value {value}", path, lineno)
                cells[(rec["platform"], rec["task"], v)] = value
    return cells


def _load_resources(path, known_platforms):
    cells: Dict[tuple, Dict[str, float]] = {}
    for lineno, rec in _read_csv(path, ("platform", "resource", "task") + VARIANTS):
        if rec["platform"] not in known_platforms:
            raise DataParseError(f"unknown platform {rec['platform']!r}", path, lineno)
        for v in VARIANTS:
            value = _cell(rec[v], path, lineno)
            if value is not None:
                if not 0 <= value <= 100:
                    raise DataParseError(f"percentage {value} outside [0, 100]", path, lineno)
                cells.setdefault((rec["platform"], rec["task"], v), {})[rec["resource"]] = value
    return cells


def load_measurements(
    source=None,
    *,
    platforms=None,
    latency=None,
    energy=None,
    resources=None,
) -> MeasurementTable:
    """Load platform profiles and measured cells.

    ``source`` is a directory holding ``platforms.csv``, ``latency.csv``,
    ``energy.csv`` and optionally ``resources.csv`` (the bundled tables when
    None).  Individual files may be overridden by keyword.  Cells written as
    ``-`` are absent.
    """
    base = Path(source) if source is not None else bundled_data_dir()
    platforms = Path(platforms) if platforms else base / "platforms.csv"
    latency = Path(latency) if latency else base / "latency.csv"
    energy = Path(energy) if energy else base / "energy.csv"
    if resources is None and (base / "resources.csv").exists():
        resources = base / "resources.csv"

    names = [rec["name"] for _, rec in _read_csv(platforms, ("name",))]
    lat = _load_metric(latency, names)
    en = _load_metric(energy, names)
    res = _load_resources(resources, names) if resources else {}
    order = {n: i for i, n in enumerate(names)}
    task_order: Dict[str, int] = {}
    for k in list(lat) + list(en):
        task_order.setdefault(k[1], len(task_order))
    keys = sorted(set(lat) | set(en), key=lambda k: (order[k[0]], task_order[k[1]], VARIANTS.index(k[2])))
    rows = [MeasurementRow(p, t, v, lat.get((p, t, v)), en.get((p, t, v)), res.get((p, t, v))) for p, t, v in keys]
    if not rows:
        raise DataParseError("no measurements", latency)
    profiles = load_platforms(platforms, rows)
    return MeasurementTable(rows, profiles)


# --------------------------------------------------------------------------
# Workload profiling and assessment
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WorkloadSpec:
    """Tasks with repeat counts, an objective and optional limits.

    ``devices`` restricts placement to named platforms; an entry may pin a
    variant as ``"Max3:tp"``.  With ``split`` the paths of each task are
    spread over every feasible device of the chosen route.
    """

    tasks: Tuple[Tuple[object, int], ...]
    objective: str = "min-latency"
    max_joules: Optional[float] = None
    max_seconds: Optional[float] = None
    devices: Optional[Tuple[str, ...]] = None
    split: bool = False

    def __post_init__(self):
        if not self.tasks:
            raise ConfigurationError("workload has no tasks")
        if self.objective not in OBJECTIVES:
            raise ConfigurationError(f"unknown objective {self.objective!r}")
        for _, repeat in self.tasks:
            if repeat < 1:
                raise ConfigurationError("repeat counts must be >= 1")


@dataclass(frozen=True)
class Option:
    """A platform/variant able to run a task, projected to the task's size."""

    platform: str
    kind: str
    variant: str
    latency: Optional[float]
    energy: Optional[float]  # joules
    flops: float

    @property
    def efficiency(self) -> Optional[float]:
        if self.energy is None or self.energy <= 0:
            return None
        return metrics.efficiency(self.flops, self.energy)


@dataclass(frozen=True)
class TaskProfile:
    task: object
    repeat: int
    paths: int
    flops: float
    options: Tuple[Option, ...]
    missing: Tuple[Tuple[str, str], ...] = ()


def task_flops_per_sim(task, costs) -> int:
    """Reference FLOP/simulation when the task carries one for the measured step count."""
    if task.reference_flops is not None and task.steps == MEASURED_STEPS:
        return task.reference_flops
    return metrics.flops_per_sim(task, costs)


def _allowed(workload) -> Optional[Dict[str, Optional[str]]]:
    if workload.devices is None:
        return None
    allowed: Dict[str, Optional[str]] = {}
    for entry in workload.devices:
        name, _, variant = entry.partition(":")
        allowed[name.strip()] = variant.strip() or None
    return allowed


def profile_workload(workload: WorkloadSpec, table: MeasurementTable, costs=None) -> List[TaskProfile]:
    """Project each task's latency, energy and FLOPs on every available variant."""
    costs = costs or metrics.OpCostTable()
    allowed = _allowed(workload)
    if allowed is not None:
        for name in allowed:
            table.profile(name)
    out = []
    for task, repeat in workload.tasks:
        paths = task.paths * repeat
        scale = paths / MEASURED_PATHS
        flops = float(task_flops_per_sim(task, costs)) * paths
        options, missing = [], []
        for platform in table.platforms:
            if allowed is not None and platform not in allowed:
                continue
            pinned = allowed.get(platform) if allowed is not None else None
            for variant in VARIANTS:
                if pinned is not None and variant != pinned:
                    continue
                row = table.get(platform, task.designation, variant)
                if row is None:
                    if pinned is not None or table.rows_for(platform, task.designation):
                        missing.append((platform, variant))
                    continue
                options.append(
                    Option(
                        platform=platform,
                        kind=table.kind(platform),
                        variant=variant,
                        latency=None if row.latency is None else row.latency * scale,
                        energy=None if row.energy is None else row.energy_joules * scale,
                        flops=flops,
                    )
                )
        if not options and not missing:
            raise UnprofileableTaskError(f"no measurements for task {task.designation!r}")
        out.append(TaskProfile(task, repeat, paths, flops, tuple(options), tuple(missing)))
    return out


def _score(option: Option, objective: str) -> Optional[float]:
    """Lower is better."""
    if objective == "min-latency":
        return option.latency
    if objective == "min-energy":
        return option.energy
    eff = option.efficiency
    return None if eff is None else -eff


def _variant_key(option, objective):
    return (_score(option, objective), VARIANTS.index(option.variant))


def choose_variant(rows: Sequence, objective: str = "max-efficiency") -> str:
    """Pick the variant of one platform+task.

    Minimises latency under ``min-latency`` and energy otherwise (for a
    fixed task the most efficient variant is the least energetic).  Ties go
    to the earlier of base, tp, pp.
    """
    if not rows:
        raise ConfigurationError("no rows to choose from")
    attr = "latency" if objective == "min-latency" else "energy"
    scored = [r for r in rows if getattr(r, attr) is not None]
    if not scored:
        raise ConfigurationError(f"no {attr} measurements for this platform and task")
    best = min(scored, key=lambda r: (getattr(r, attr), VARIANTS.index(r.variant)))
    return best.variant


@dataclass(frozen=True)
class Assessment:
    """Per-task platform ranking (best variant per platform, best first)."""

    objective: str
    rankings: Dict[str, Tuple[Option, ...]]
    use_fpga: Dict[str, bool]
    aggregate: Tuple[Tuple[str, str, float], ...] = ()

    @property
    def any_fpga(self) -> bool:
        return any(self.use_fpga.values())

    def chosen(self, task: str) -> Option:
        return self.rankings[task][0]


def _check_limits(option, workload) -> Optional[str]:
    if workload.max_seconds is not None and (option.latency is None or option.latency > workload.max_seconds):
        return f"max_seconds={workload.max_seconds:g}"
    if workload.max_joules is not None and (option.energy is None or option.energy > workload.max_joules):
        return f"max_joules={workload.max_joules:g}"
    return None


def assess_fpga(profile: Sequence[TaskProfile], workload: WorkloadSpec) -> Assessment:
    """Rank platforms per task and decide where FPGAs should be used."""
    if not profile:
        raise ConfigurationError("empty workload profile")
    objective = workload.objective
    rankings, use_fpga = {}, {}
    for tp in profile:
        name = tp.task.designation
        if not tp.options:
            detail = ", ".join(f"{p}:{v}" for p, v in tp.missing)
            raise InfeasibleWorkloadError(f"{name}: implementation unavailable ({detail})")
        best: Dict[str, Option] = {}
        failed = None
        for opt in tp.options:
            if _score(opt, objective) is None:
                continue
            reason = _check_limits(opt, workload)
            if reason is not None:
                failed = reason
                continue
            cur = best.get(opt.platform)
            if cur is None or _variant_key(opt, objective) < _variant_key(cur, objective):
                best[opt.platform] = opt
        if not best:
            raise InfeasibleWorkloadError(
                f"{name}: no platform satisfies {failed or 'the objective ' + objective}"
            )
        order = {p: i for i, p in enumerate(o.platform for o in tp.options)}
        ranked = sorted(best.values(), key=lambda o: (_score(o, objective), order[o.platform]))
        rankings[name] = tuple(ranked)
        use_fpga[name] = ranked[0].kind == "fpga"
    aggregate = _aggregate(rankings, objective)
    return Assessment(objective, rankings, use_fpga, aggregate)


def _aggregate(rankings, objective):
    """Platforms covering every task, ordered by their mean per-task score."""
    per_platform: Dict[str, List[Option]] = {}
    for ranked in rankings.values():
        for opt in ranked:
            per_platform.setdefault(opt.platform, []).append(opt)
    n = len(rankings)
    rows = []
    for platform, opts in per_platform.items():
        if len(opts) != n:
            continue
        if objective == "max-efficiency":
            score = -sum(o.efficiency for o in opts) / n
        else:
            score = sum(_score(o, objective) for o in opts) / n
        variants = "/".join(sorted({o.variant for o in opts}, key=VARIANTS.index))
        rows.append((platform, variants, score))
    rows.sort(key=lambda r: r[2])
    if objective == "max-efficiency":
        rows = [(p, v, -s) for p, v, s in rows]
    return tuple(rows)


# --------------------------------------------------------------------------
# Splitting and simulated execution
# --------------------------------------------------------------------------


def split_paths(N: int, throughputs: Sequence[float]) -> List[int]:
    """Allocate ``N`` paths in proportion to throughput (largest remainder)."""
    if not throughputs:
        raise ConfigurationError("no devices to split across")
    if any(not t > 0 for t in throughputs):
        raise ConfigurationError("throughputs must be positive")
    total = math.fsum(throughputs)
    quotas = [N * t / total for t in throughputs]
    alloc = [int(math.floor(q)) for q in quotas]
    short = N - sum(alloc)
    by_remainder = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in by_remainder[:short]:
        alloc[i] += 1
    return alloc


@dataclass(frozen=True)
class Allocation:
    platform: str
    variant: str
    paths: int


@dataclass(frozen=True)
class TaskDecision:
    task: str
    allocations: Tuple[Allocation, ...]
    uses_fpga: bool
    makespan: float = 0.0
    energy: float = 0.0


@dataclass(frozen=True)
class PartitionPlan:
    decisions: Tuple[TaskDecision, ...]
    projected_makespan: float
    projected_energy: float
    rationale: Tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "projected_makespan_s": self.projected_makespan,
            "projected_energy_j": self.projected_energy,
            "decisions": [
                {
                    "task": d.task,
                    "uses_fpga": d.uses_fpga,
                    "makespan_s": d.makespan,
                    "energy_j": d.energy,
                    "allocations": [
                        {"platform": a.platform, "variant": a.variant, "paths": a.paths} for a in d.allocations
                    ],
                }
                for d in self.decisions
            ],
            "rationale": list(self.rationale),
        }

    def to_text(self) -> str:
        lines = []
        for d in self.decisions:
            where = "FPGA" if d.uses_fpga else "CPU/GPU"
            lines.append(f"{d.task}: {where}  makespan {d.makespan:.3f} s  energy {d.energy:.1f} J")
            for a in d.allocations:
                lines.append(f"  {a.platform:<10} {a.variant:<4} {a.paths:>12d} paths")
        lines.append(f"projected makespan: {self.projected_makespan:.3f} s")
        lines.append(f"projected energy:   {self.projected_energy:.1f} J")
        lines.append("trace:")
        lines.extend(f"  {step}" for step in self.rationale)
        return "\n".join(lines) + "\n"


def _simulate_task(decision, table) -> Tuple[float, float]:
    busy = []
    for a in decision.allocations:
        row = table.get(a.platform, decision.task, a.variant)
        if row is None or row.throughput is None:
            raise PlanIntegrityError(f"no measurement for {a.platform}/{decision.task}/{a.variant}")
        busy.append((a, row, a.paths / row.throughput))
    makespan = max(t for _, _, t in busy) if busy else 0.0
    energy = 0.0
    for a, row, t in busy:
        profile = table.profile(a.platform)
        active = row.mean_watts if row.mean_watts is not None else profile.active_watts
        energy += active * t + profile.idle_watts * (makespan - t)
    return makespan, energy


def simulate_heterogeneous(plan: PartitionPlan, table: MeasurementTable) -> Tuple[float, float]:
    """Makespan and energy of ``plan`` under the measured model.

    Tasks run one after another; within a task each device is busy for
    ``share / throughput`` seconds at its measured mean power and idles until
    the slowest device finishes.
    """
    makespan = energy = 0.0
    for d in plan.decisions:
        m, e = _simulate_task(d, table)
        makespan += m
        energy += e
    return makespan, energy


# --------------------------------------------------------------------------
# The placement flow
# --------------------------------------------------------------------------


def _fmt_option(o: Option) -> str:
    parts = [f"{o.platform} {o.variant}"]
    if o.latency is not None:
        parts.append(f"{o.latency:g} s")
    if o.energy is not None:
        parts.append(f"{o.energy / 1000:g} kJ")
    return ", ".join(parts)


def plan_partition(workload: WorkloadSpec, table: MeasurementTable, costs=None) -> PartitionPlan:
    """Run the placement flow for ``workload`` and return the plan."""
    trace = [f"receive: {len(workload.tasks)} task(s), objective {workload.objective}"]
    profile = profile_workload(workload, table, costs)
    for tp in profile:
        trace.append(
            f"profile: {tp.task.designation} x{tp.repeat}, {tp.paths} paths, "
            f"{tp.flops:.6g} FLOP, {len(tp.options)} measured variant(s)"
        )
    assessment = assess_fpga(profile, workload)
    for tp in profile:
        name = tp.task.designation
        best = assessment.chosen(name)
        verdict = "FPGA selected" if assessment.use_fpga[name] else "FPGA not selected"
        trace.append(f"assess: {name}: {verdict} (best {_fmt_option(best)})")

    if assessment.any_fpga:
        for tp in profile:
            name = tp.task.designation
            if not assessment.use_fpga[name]:
                continue
            fpgas = [o for o in assessment.rankings[name] if o.kind == "fpga"]
            trace.append(
                f"check availability: {name}: " + ", ".join(f"{o.platform} {o.variant}" for o in fpgas)
            )
            for platform, variant in tp.missing:
                if table.kind(platform) == "fpga":
                    trace.append(f"implement: {name}: {platform} {variant} unavailable: excluded")

    decisions = []
    for tp in profile:
        name = tp.task.designation
        uses_fpga = assessment.use_fpga[name]
        ranked = assessment.rankings[name]
        chosen = list(ranked) if workload.split else [ranked[0]]
        chosen = [o for o in chosen if o.latency is not None] or [ranked[0]]
        if len(chosen) > 1:
            rows = [table.get(o.platform, name, o.variant) for o in chosen]
            shares = split_paths(tp.paths, [r.throughput for r in rows])
        else:
            shares = [tp.paths]
        allocs = tuple(Allocation(o.platform, o.variant, n) for o, n in zip(chosen, shares) if n > 0)
        decision = TaskDecision(name, allocs, uses_fpga)
        m, e = _simulate_task(decision, table)
        decisions.append(TaskDecision(name, allocs, uses_fpga, m, e))
        route = "CPU/GPU/FPGA" if uses_fpga else "CPU/GPU"
        trace.append(
            f"execute on {route}: {name}: " + ", ".join(f"{a.platform} {a.variant} {a.paths}" for a in allocs)
        )

    plan = PartitionPlan(tuple(decisions), 0.0, 0.0)
    makespan, energy = simulate_heterogeneous(plan, table)
    trace.append(f"return: makespan {makespan:.6g} s, energy {energy:.6g} J")
    return PartitionPlan(tuple(decisions), makespan, energy, tuple(trace))


# --------------------------------------------------------------------------
# Platform comparison report
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlatformSummary:
    platform: str
    kind: str
    tasks: int
    variants: str
    mean_latency: float
    mean_power: float
    mean_energy: float  # kJ
    mean_efficiency: float  # FLOP/J


@dataclass(frozen=True)
class PlatformReport:
    rows: Tuple[PlatformSummary, ...]
    best_fpga: Optional[str]
    best_gpu: Optional[str]
    efficiency_ratio: Optional[float]

    _FIELDS = (
        "platform",
        "kind",
        "tasks",
        "variants",
        "mean_latency_s",
        "mean_power_w",
        "mean_energy_kj",
        "mean_efficiency_flop_per_j",
    )

    def row(self, platform) -> PlatformSummary:
        for r in self.rows:
            if r.platform == platform:
                return r
        raise KeyError(platform)

    def _records(self):
        for r in self.rows:
            yield {
                "platform": r.platform,
                "kind": r.kind,
                "tasks": r.tasks,
                "variants": r.variants,
                "mean_latency_s": round(r.mean_latency, 6),
                "mean_power_w": round(r.mean_power, 6),
                "mean_energy_kj": round(r.mean_energy, 6),
                "mean_efficiency_flop_per_j": float(f"{r.mean_efficiency:.6e}"),
            }

    def to_json(self) -> str:
        doc = {
            "platforms": list(self._records()),
            "best_fpga": self.best_fpga,
            "best_gpu": self.best_gpu,
            "fpga_gpu_efficiency_ratio": None if self.efficiency_ratio is None else round(self.efficiency_ratio, 6),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self._FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in self._records():
            writer.writerow(rec)
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"{'platform':<10} {'kind':<5} {'variants':<9} {'latency s':>10} {'power W':>9} {'energy kJ':>10} {'FLOP/J':>11}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lines.append(
                f"{r.platform:<10} {r.kind:<5} {r.variants:<9} {r.mean_latency:>10.2f} "
                f"{r.mean_power:>9.1f} {r.mean_energy:>10.2f} {r.mean_efficiency:>11.3e}"
            )
        if self.efficiency_ratio is not None:
            lines.append("")
            lines.append(
                f"FPGA/GPU efficiency ratio: {self.efficiency_ratio:.3f} "
                f"({self.best_fpga} vs {self.best_gpu})"
            )
        return "\n".join(lines) + "\n"


def report(table: MeasurementTable, costs=None, tasks=None) -> PlatformReport:
    """Per-platform means over tasks, best variant per task by efficiency.

    ``tasks`` maps designations to :class:`~mcfpga.payoffs.OptionTask` and
    supplies FLOP counts (the bundled task file when None).  Only platforms
    with a measurement for every task are summarised.
    """
    if len(table) == 0:
        raise ConfigurationError("empty measurement table")
    costs = costs or metrics.OpCostTable()
    if tasks is None:
        from .tasks import load_tasks

        tasks = load_tasks()
    task_names = [t for t in table.tasks if t in tasks]
    if not task_names:
        raise ConfigurationError("no task definitions match the measurement table")
    flops = {t: float(task_flops_per_sim(tasks[t].with_size(steps=MEASURED_STEPS), costs)) * MEASURED_PATHS for t in task_names}

    rows = []
    for platform in table.platforms:
        picked = []
        for t in task_names:
            candidates = [r for r in table.rows_for(platform, t) if r.energy is not None and r.latency is not None]
            if not candidates:
                break
            variant = choose_variant(candidates, "max-efficiency")
            picked.append((t, table.get(platform, t, variant)))
        if len(picked) != len(task_names):
            continue
        n = len(picked)
        rows.append(
            PlatformSummary(
                platform=platform,
                kind=table.kind(platform),
                tasks=n,
                variants="/".join(sorted({r.variant for _, r in picked}, key=VARIANTS.index)),
                mean_latency=math.fsum(r.latency for _, r in picked) / n,
                mean_power=math.fsum(r.mean_watts for _, r in picked) / n,
                mean_energy=math.fsum(r.energy for _, r in picked) / n,
                mean_efficiency=math.fsum(metrics.efficiency(flops[t], r.energy_joules) for t, r in picked) / n,
            )
        )
    if not rows:
        raise ConfigurationError("no platform has measurements for every task")

    def best(kind):
        cands = [r for r in rows if r.kind == kind]
        return max(cands, key=lambda r: r.mean_efficiency) if cands else None

    fpga, gpu = best("fpga"), best("gpu")
    ratio = fpga.mean_efficiency / gpu.mean_efficiency if fpga and gpu else None
    return PlatformReport(
        rows=tuple(rows),
        best_fpga=fpga.platform if fpga else None,
        best_gpu=gpu.platform if gpu else None,
        efficiency_ratio=ratio,
    )


def load_workload(path, tasks) -> WorkloadSpec:
    """Read a workload file.

    INI-style: an optional ``[workload]`` section with ``objective``,
    ``max_seconds``, ``max_joules``, ``devices`` (comma separated, entries
    ``name`` or ``name:variant``) and ``split``; every other section names a
    task from ``tasks`` and may set ``repeat`` and ``paths``.
    """
    import configparser

    from .tasks import ini_error_line

    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        parser.read_string(text, source=str(path))
    except OSError as exc:
        raise DataParseError(str(exc), path) from None
    except configparser.Error as exc:
        raise DataParseError(str(exc).splitlines()[0], path, ini_error_line(exc)) from None
    if not text.strip():
        raise EmptyDataError("empty workload file", path)
    head = parser["workload"] if parser.has_section("workload") else {}
    entries = []
    for name in parser.sections():
        if name == "workload":
            continue
        if name not in tasks:
            raise ConfigurationError(f"unknown task {name!r} in workload {path}")
        sec = parser[name]
        try:
            task = tasks[name]
            if "paths" in sec:
                task = task.with_size(paths=int(sec["paths"]))
            entries.append((task, int(sec.get("repeat", "1"))))
        except ValueError as exc:
            raise DataParseError(f"[{name}]: {exc}", path) from None
    devices = head.get("devices")
    try:
        return WorkloadSpec(
            tasks=tuple(entries),
            objective=head.get("objective", "min-latency").strip(),
            max_seconds=float(head["max_seconds"]) if "max_seconds" in head else None,
            max_joules=float(head["max_joules"]) if "max_joules" in head else None,
            devices=tuple(d.strip() for d in devices.split(",") if d.strip()) if devices else None,
            split=str(head.get("split", "false")).strip().lower() in ("1", "true", "yes", "on"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise DataParseError(f"[workload]: {exc}", path) from None
