"""Checking pipeline: run the categorification criteria over rings (single or
batch), with deterministic seeding and serializable reports.

Reports are reproducible: the same inputs, configuration, and seed produce
byte-identical JSON (wall-clock timings are only included on request).
"""

from __future__ import annotations

import itertools
import time
import zlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .channels import (
    QuantumChannel,
    channel_irreducible,
    channel_pf,
    cp_check,
    fixed_space_basis,
    pf_space_structure_check,
)
from .criteria import (
    default_unitaries,
    localized_criterion,
    primary_criterion,
    reduced_twisted_criterion,
    schur_criterion,
)
from .graphs import BipartiteGraph, LocalFusionData, graph_pf_dims, local_matrix, local_matrix_check
from .linalg import CapacityError, CriterionVerdict, PsdPolicy
from .rings import FusionRing, profile, validate

__all__ = [
    "derive_seed",
    "PipelineConfig",
    "TaskRecord",
    "RingReport",
    "BatchReport",
    "run_ring_checks",
    "run_batch",
    "run_graph_checks",
    "run_channel_checks",
    "report_markdown",
    "batch_markdown",
    "report_csv_rows",
    "GraphReport",
    "ChannelReport",
]

STATUS_SKIPPED = "Skipped"
STATUS_INVALID = "Invalid"

ALL_CRITERIA = ("primary", "localized", "schur", "reduced_twisted")


def derive_seed(global_seed: int, task_id: str) -> int:
    """Stable per-task seed: CRC-32 of the global seed and the task id."""
    return zlib.crc32(f"{global_seed}:{task_id}".encode("utf-8"))


@dataclass(frozen=True)
class PipelineConfig:
    """What to run and how.

    n_max : largest tensor exponent for the primary/localized checks.
    subset_cap : largest localized subset size (all subsets up to this size).
    twist_samples : number of twist unitaries for the reduced-twisted check.
    seed : master seed; per-task seeds derive from it and the task id.
    criteria : which checks to run (validation and profiling always run).
    """

    n_max: int = 3
    subset_cap: int = 3
    twist_samples: int = 100
    seed: int = 0xF051
    criteria: Tuple[str, ...] = ALL_CRITERIA
    policy: PsdPolicy = field(default_factory=PsdPolicy)
    include_timings: bool = False

    def __post_init__(self) -> None:
        if self.n_max < 1 or self.subset_cap < 1 or self.twist_samples < 1:
            raise ValueError("n_max, subset_cap, and twist_samples must be positive")
        unknown = set(self.criteria) - set(ALL_CRITERIA)
        if unknown:
            raise ValueError(f"unknown criteria: {sorted(unknown)} (choose from {ALL_CRITERIA})")

    def to_dict(self) -> Dict[str, object]:
        return {
            "n_max": self.n_max,
            "subset_cap": self.subset_cap,
            "twist_samples": self.twist_samples,
            "seed": self.seed,
            "criteria": list(self.criteria),
            "policy": {
                "rel_tol": self.policy.rel_tol,
                "inconclusive_band": self.policy.inconclusive_band,
            },
        }


@dataclass
class TaskRecord:
    """One executed (or skipped) check."""

    task: str
    kind: str
    params: Dict[str, object]
    status: str
    lambda_min: Optional[float] = None
    margin: Optional[float] = None
    retried: bool = False
    note: str = ""
    witness: Optional[List[object]] = None
    duration: Optional[float] = None

    @classmethod
    def from_verdict(
        cls,
        task: str,
        kind: str,
        params: Dict[str, object],
        verdict: CriterionVerdict,
        duration: Optional[float] = None,
    ) -> "TaskRecord":
        d = verdict.to_dict()
        witness = d.get("witness_vector") or d.get("witness_triple")
        return cls(
            task=task,
            kind=kind,
            params=params,
            status=verdict.status,
            lambda_min=d["lambda_min"],
            margin=d["margin"],
            retried=verdict.retried,
            note=verdict.note,
            witness=witness,
            duration=duration,
        )

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "task": self.task,
            "kind": self.kind,
            "params": self.params,
            "status": self.status,
            "lambda_min": self.lambda_min,
            "margin": self.margin,
            "retried": self.retried,
            "note": self.note,
            "witness": self.witness,
        }
        if self.duration is not None:
            out["duration_seconds"] = self.duration
        return out


@dataclass
class RingReport:
    name: str
    rank: int
    valid: bool
    violations: List[str]
    warnings: List[str]
    commutative: Optional[bool]
    dims: Optional[List[float]]
    pf_dim: Optional[float]
    overall: str
    tasks: List[TaskRecord]
    config: Dict[str, object]

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "rank": self.rank,
            "valid": self.valid,
            "violations": self.violations,
            "warnings": self.warnings,
            "commutative": self.commutative,
            "dims": self.dims,
            "pf_dim": self.pf_dim,
            "overall": self.overall,
            "tasks": [t.to_dict() for t in self.tasks],
            "config": self.config,
        }


@dataclass
class BatchReport:
    reports: List[RingReport]

    @property
    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for r in self.reports:
            out[r.overall] = out.get(r.overall, 0) + 1
        return dict(sorted(out.items()))

    def to_dict(self) -> Dict[str, object]:
        return {
            "counts": self.counts,
            "reports": [r.to_dict() for r in self.reports],
        }


def _overall(valid: bool, tasks: Sequence[TaskRecord]) -> str:
    if not valid:
        return STATUS_INVALID
    statuses = [t.status for t in tasks]
    if "Fails" in statuses:
        return "Fails"
    if "Inconclusive" in statuses:
        return "Inconclusive"
    return "Passes"


def _subsets_to_check(
    rank: int, cap: int, preferred: Sequence[Sequence[int]]
) -> List[Tuple[int, ...]]:
    """Preferred subsets first, then every subset of size 1..cap except the
    full basis (the primary check already covers it)."""
    seen: Dict[Tuple[int, ...], None] = {}
    for sub in preferred:
        seen.setdefault(tuple(sorted(int(i) for i in sub)), None)
    for size in range(1, min(cap, rank) + 1):
        if size == rank:
            continue
        for combo in itertools.combinations(range(rank), size):
            seen.setdefault(combo, None)
    return [s for s in seen if len(s) <= rank]


def run_ring_checks(
    source: Union[FusionRing, "RingFile"],
    config: Optional[PipelineConfig] = None,
    name: Optional[str] = None,
) -> RingReport:
    """Validate a ring and run the configured categorification checks."""
    cfg = config or PipelineConfig()
    preferred_subsets: Tuple[Tuple[int, ...], ...] = ()
    if isinstance(source, FusionRing):
        ring = source
        ring_name = name or source.name or "unnamed"
    else:
        ring = source.ring
        ring_name = name or source.name
        preferred_subsets = source.local_subsets

    violations = validate(ring)
    errors = [v.message for v in violations if not v.warning]
    warns = [v.message for v in violations if v.warning]
    valid = not errors
    tasks: List[TaskRecord] = []
    commutative: Optional[bool] = None
    dims_list: Optional[List[float]] = None
    pf_dim: Optional[float] = None

    if valid:
        prof = profile(ring)
        dims_list = [float(d) for d in prof.dims]
        pf_dim = float(prof.pf_dim)
        commutative = ring.is_commutative()

        def clock() -> float:
            return time.perf_counter() if cfg.include_timings else 0.0

        def elapsed(t0: float) -> Optional[float]:
            return (time.perf_counter() - t0) if cfg.include_timings else None

        if "primary" in cfg.criteria:
            for n in range(1, cfg.n_max + 1):
                t0 = clock()
                params = {"n": n}
                try:
                    verdict = primary_criterion(ring, n, cfg.policy)
                except CapacityError as exc:
                    tasks.append(
                        TaskRecord(
                            task=f"primary n={n}",
                            kind="primary",
                            params=params,
                            status=STATUS_SKIPPED,
                            note=str(exc),
                            duration=elapsed(t0),
                        )
                    )
                    continue
                tasks.append(
                    TaskRecord.from_verdict(
                        f"primary n={n}", "primary", params, verdict, elapsed(t0)
                    )
                )
        if "localized" in cfg.criteria:
            for S in _subsets_to_check(ring.rank, cfg.subset_cap, preferred_subsets):
                t0 = clock()
                params = {"subset": list(S), "n": cfg.n_max}
                verdict = localized_criterion(ring, S, cfg.n_max, cfg.policy)
                tasks.append(
                    TaskRecord.from_verdict(
                        f"localized S={list(S)} n={cfg.n_max}",
                        "localized",
                        params,
                        verdict,
                        elapsed(t0),
                    )
                )
        if "schur" in cfg.criteria:
            t0 = clock()
            if commutative:
                verdict = schur_criterion(ring, cfg.policy)
                tasks.append(
                    TaskRecord.from_verdict("schur", "schur", {}, verdict, elapsed(t0))
                )
            else:
                tasks.append(
                    TaskRecord(
                        task="schur",
                        kind="schur",
                        params={},
                        status=STATUS_SKIPPED,
                        note="ring is noncommutative; character-sum test not applicable",
                        duration=elapsed(t0),
                    )
                )
        if "reduced_twisted" in cfg.criteria:
            t0 = clock()
            twist_seed = derive_seed(cfg.seed, f"{ring_name}/reduced_twisted")
            unitaries = default_unitaries(ring.rank, cfg.twist_samples, twist_seed)
            params = {
                "n": cfg.n_max,
                "twists": cfg.twist_samples,
                "seed": twist_seed,
            }
            verdict = reduced_twisted_criterion(
                ring,
                None,
                cfg.n_max,
                unitaries,
                mode="reduced_twisted",
                policy=cfg.policy,
            )
            tasks.append(
                TaskRecord.from_verdict(
                    f"reduced-twisted n={cfg.n_max} ({cfg.twist_samples} twists)",
                    "reduced_twisted",
                    params,
                    verdict,
                    elapsed(t0),
                )
            )

    return RingReport(
        name=ring_name,
        rank=ring.rank,
        valid=valid,
        violations=errors,
        warnings=warns,
        commutative=commutative,
        dims=dims_list,
        pf_dim=pf_dim,
        overall=_overall(valid, tasks),
        tasks=tasks,
        config=cfg.to_dict(),
    )


def run_batch(
    sources: Iterable[Tuple[str, Union[FusionRing, "RingFile"]]],
    config: Optional[PipelineConfig] = None,
) -> BatchReport:
    """Run the pipeline over (name, ring) pairs."""
    cfg = config or PipelineConfig()
    return BatchReport(reports=[run_ring_checks(src, cfg, name=nm) for nm, src in sources])


# ---------------------------------------------------------------------------
# graphs and channels
# ---------------------------------------------------------------------------


@dataclass
class GraphReport:
    name: str
    delta: float
    delta_sq: float
    weights: Dict[str, float]
    local_task: Optional[TaskRecord]
    local_determinant: Optional[float]
    overall: str

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "delta": self.delta,
            "delta_sq": self.delta_sq,
            "weights": self.weights,
            "local_task": self.local_task.to_dict() if self.local_task else None,
            "local_determinant": self.local_determinant,
            "overall": self.overall,
        }


def run_graph_checks(
    graph: BipartiteGraph,
    local: Optional[LocalFusionData] = None,
    name: str = "graph",
    policy: Optional[PsdPolicy] = None,
    n: int = 1,
) -> GraphReport:
    """Perron data of the graph, plus the local positivity check when local
    fusion data is available."""
    pf = graph_pf_dims(graph)
    local_task: Optional[TaskRecord] = None
    determinant: Optional[float] = None
    if local is not None:
        verdict = local_matrix_check(local, n, policy)
        T = local_matrix(local, n)
        determinant = float(np.linalg.det(T))
        local_task = TaskRecord.from_verdict(
            f"local positivity n={n}",
            "local",
            {"n": n, "labels": list(local.labels)},
            verdict,
        )
    overall = local_task.status if local_task else "Passes"
    return GraphReport(
        name=name,
        delta=pf.delta,
        delta_sq=pf.delta_sq,
        weights=pf.weights,
        local_task=local_task,
        local_determinant=determinant,
        overall=overall,
    )


@dataclass
class ChannelReport:
    dim: int
    kraus_count: int
    trace_preserving: bool
    unital: bool
    cp_status: str
    radius: float
    fixed_space_dim: int
    irreducible: bool
    irreducibility_note: str
    structure: Optional[Dict[str, object]]

    def to_dict(self) -> Dict[str, object]:
        return {
            "dim": self.dim,
            "kraus_count": self.kraus_count,
            "trace_preserving": self.trace_preserving,
            "unital": self.unital,
            "cp_status": self.cp_status,
            "radius": self.radius,
            "fixed_space_dim": self.fixed_space_dim,
            "irreducible": self.irreducible,
            "irreducibility_note": self.irreducibility_note,
            "structure": self.structure,
        }


def run_channel_checks(
    channel: QuantumChannel, structure: bool = False, samples: int = 3
) -> ChannelReport:
    """Perron and positivity data for a Kraus channel; optionally verify the
    fixed-space structure (trace-preserving channels only).  ``samples``
    controls how many random positive elements the structure check probes."""
    pf = channel_pf(channel)
    irr = channel_irreducible(channel)
    struct: Optional[Dict[str, object]] = None
    if structure:
        rep = pf_space_structure_check(channel, samples=samples)
        struct = {
            "passed": rep.passed,
            "support_dim": rep.support_dim,
            "fixed_space_dim": rep.fixed_space_dim,
            "commutant_dim": rep.commutant_dim,
            "unital_defect": rep.unital_defect,
            "zeta_residual": rep.zeta_residual,
            "fixed_residual": rep.fixed_residual,
            "membership_residual": rep.membership_residual,
            "note": rep.note,
        }
    return ChannelReport(
        dim=channel.dim,
        kraus_count=len(channel.kraus),
        trace_preserving=channel.is_trace_preserving(),
        unital=channel.is_unital(),
        cp_status=cp_check(channel).status,
        radius=pf.radius,
        fixed_space_dim=len(fixed_space_basis(channel)),
        irreducible=irr.irreducible,
        irreducibility_note=irr.note,
        structure=struct,
    )


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------


def _fmt(x: Optional[float]) -> str:
    return "-" if x is None else f"{x:+.6e}"


def report_markdown(report: RingReport) -> str:
    lines = [f"# Ring report: {report.name}", ""]
    lines.append(f"- rank: {report.rank}")
    lines.append(f"- valid: {report.valid}")
    if report.dims is not None:
        lines.append(f"- dimensions: {', '.join(f'{d:.6f}' for d in report.dims)}")
        lines.append(f"- global dimension (sum of squares): {report.pf_dim:.6f}")
        lines.append(f"- commutative: {report.commutative}")
    lines.append(f"- overall: **{report.overall}**")
    if report.violations:
        lines.append("")
        lines.append("## Violations")
        lines += [f"- {v}" for v in report.violations]
    if report.warnings:
        lines.append("")
        lines.append("## Warnings")
        lines += [f"- {w}" for w in report.warnings]
    if report.tasks:
        lines.append("")
        lines.append("## Checks")
        lines.append("")
        lines.append("| task | status | lambda_min | margin | note |")
        lines.append("|---|---|---|---|---|")
        for t in report.tasks:
            lines.append(
                f"| {t.task} | {t.status} | {_fmt(t.lambda_min)} | {_fmt(t.margin)} "
                f"| {t.note or ''} |"
            )
    return "\n".join(lines) + "\n"


def batch_markdown(batch: BatchReport) -> str:
    lines = ["# Batch report", ""]
    lines.append("| ring | rank | overall | failing tasks |")
    lines.append("|---|---|---|---|")
    for r in batch.reports:
        failing = "; ".join(t.task for t in r.tasks if t.status == "Fails") or "-"
        lines.append(f"| {r.name} | {r.rank} | {r.overall} | {failing} |")
    lines.append("")
    lines.append(f"Totals: {batch.counts}")
    return "\n".join(lines) + "\n"


def report_csv_rows(report: RingReport) -> List[Dict[str, object]]:
    """Flat rows for delimited output (one per task)."""
    rows = []
    for t in report.tasks:
        rows.append(
            {
                "ring": report.name,
                "task": t.task,
                "kind": t.kind,
                "status": t.status,
                "lambda_min": "" if t.lambda_min is None else repr(t.lambda_min),
                "margin": "" if t.margin is None else repr(t.margin),
                "retried": int(t.retried),
                "note": t.note,
            }
        )
    if not report.tasks:
        rows.append(
            {
                "ring": report.name,
                "task": "validate",
                "kind": "validate",
                "status": report.overall,
                "lambda_min": "",
                "margin": "",
                "retried": 0,
                "note": "; ".join(report.violations),
            }
        )
    return rows
