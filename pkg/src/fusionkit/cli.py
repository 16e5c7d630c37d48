"""Command-line interface.

Commands::

    fusionkit ring validate FILE
    fusionkit ring check FILE [--n N] [--subsets K] [--twists T]
                              [--seed S] [--criteria a,b,...] [--tol X]
                              [--format json|md] [--out DIR] [--timings]
    fusionkit ring batch PATH [PATH ...]   (same options; directories expand
                                            to the .ring files they contain)
    fusionkit graph check FILE [--out DIR]
    fusionkit channel pf --kraus FILE
    fusionkit channel structure --kraus FILE [--samples S]
    fusionkit group suite --order N [--trials T] [--smooth-trials T]
                          [--seed S] [--format json|md] [--out DIR]
    fusionkit list
    fusionkit version

``FILE`` is a filesystem path, or ``bundled:NAME`` for a corpus entry
(``fusionkit list`` shows them).  ``graph check`` automatically picks up a
sibling ``<stem>.local.json`` with local fusion data when one exists.

Exit codes: 0 on success (including *Fails* verdicts, which are results, not
errors), 1 on unreadable or malformed input, 2 on bad command lines.

With ``--out DIR`` the check/batch/suite commands write ``report.json``,
``report.md``, ``report.csv`` (where applicable), and PNG figures into DIR.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import data as bundled_data
from .groupmodel import SuiteConfig, inequality_suite
from .io import (
    FormatError,
    RingFile,
    canonical_json,
    load_channel,
    load_graph,
    load_local,
    load_ring,
    parse_channel_json,
    parse_graph_text,
    parse_local_json,
    parse_ring_json,
)
from .linalg import PsdPolicy
from .pipeline import (
    ALL_CRITERIA,
    PipelineConfig,
    batch_markdown,
    report_csv_rows,
    report_markdown,
    run_batch,
    run_channel_checks,
    run_graph_checks,
    run_ring_checks,
)
from .rings import validate

BUNDLED_PREFIX = "bundled:"


def _bundled_name(source: str) -> Optional[str]:
    if source.startswith(BUNDLED_PREFIX):
        return source[len(BUNDLED_PREFIX):]
    return None


def _read_ring(source: str) -> RingFile:
    name = _bundled_name(source)
    if name is not None:
        if not name.endswith(".ring"):
            name += ".ring"
        return parse_ring_json(bundled_data.read_text(name))
    return load_ring(source)


def _read_graph(source: str):
    name = _bundled_name(source)
    if name is not None:
        if not name.endswith(".graph"):
            name += ".graph"
        return parse_graph_text(bundled_data.read_text(name)), name
    return load_graph(source), source


def _read_local_for_graph(source: str):
    """Local fusion data from the sibling ``<stem>.local.json``, if any."""
    name = _bundled_name(source)
    if name is not None:
        stem = name[:-len(".graph")] if name.endswith(".graph") else name
        try:
            return parse_local_json(bundled_data.read_text(stem + ".local.json"))
        except FileNotFoundError:
            return None
    path = Path(source)
    sibling = path.with_name(path.stem + ".local.json")
    if sibling.exists():
        return load_local(sibling)
    return None


def _read_channel(source: str):
    name = _bundled_name(source)
    if name is not None:
        if not name.endswith(".kraus.json"):
            name += ".kraus.json"
        return parse_channel_json(bundled_data.read_text(name))
    return load_channel(source)


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    criteria: Tuple[str, ...] = ALL_CRITERIA
    if args.criteria:
        criteria = tuple(c.strip() for c in args.criteria.split(",") if c.strip())
    if args.tol is not None:
        default = PsdPolicy()
        policy = PsdPolicy(
            rel_tol=args.tol,
            inconclusive_band=max(default.inconclusive_band, 10.0 * args.tol),
        )
    else:
        policy = PsdPolicy()
    return PipelineConfig(
        n_max=args.n,
        subset_cap=args.subset_cap,
        twist_samples=args.twists,
        seed=args.seed,
        criteria=criteria,
        policy=policy,
        include_timings=args.timings,
    )


def _write_csv(path: Path, rows: List[dict]) -> None:
    fields = ["ring", "task", "kind", "status", "lambda_min", "margin", "retried", "note"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_ring_validate(args: argparse.Namespace) -> int:
    rf = _read_ring(args.file)
    violations = validate(rf.ring)
    doc = {
        "name": rf.name,
        "rank": rf.ring.rank,
        "valid": not any(not v.warning for v in violations),
        "violations": [v.message for v in violations if not v.warning],
        "warnings": [v.message for v in violations if v.warning],
    }
    _emit(canonical_json(doc))
    return 0


def _cmd_ring_check(args: argparse.Namespace) -> int:
    rf = _read_ring(args.file)
    cfg = _config_from_args(args)
    report = run_ring_checks(rf, cfg)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(canonical_json(report.to_dict()), encoding="utf-8")
        (out / "report.md").write_text(report_markdown(report), encoding="utf-8")
        _write_csv(out / "report.csv", report_csv_rows(report))
        from . import plots

        plots.margins_figure(report, str(out / f"{report.name}_margins.png"))
        try:
            plots.spectrum_figure(
                rf.ring, cfg.n_max, str(out / f"{report.name}_spectrum.png"), name=report.name
            )
        except Exception:
            pass  # spectrum figure is best-effort (capacity limits)
    if args.format == "md":
        _emit(report_markdown(report))
    else:
        _emit(canonical_json(report.to_dict()))
    return 0


def _expand_batch_paths(items: List[str]) -> List[str]:
    """Expand directory arguments to the sorted ``*.ring`` files they contain."""
    expanded: List[str] = []
    for item in items:
        if _bundled_name(item) is None and Path(item).is_dir():
            matches = sorted(str(p) for p in Path(item).glob("*.ring"))
            if not matches:
                raise FileNotFoundError(f"no .ring files in directory: {item}")
            expanded.extend(matches)
        else:
            expanded.append(item)
    return expanded


def _cmd_ring_batch(args: argparse.Namespace) -> int:
    sources = []
    for source in _expand_batch_paths(args.files):
        rf = _read_ring(source)
        sources.append((rf.name, rf))
    cfg = _config_from_args(args)
    batch = run_batch(sources, cfg)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(canonical_json(batch.to_dict()), encoding="utf-8")
        (out / "report.md").write_text(batch_markdown(batch), encoding="utf-8")
        rows: List[dict] = []
        for rep in batch.reports:
            rows.extend(report_csv_rows(rep))
        _write_csv(out / "report.csv", rows)
        from . import plots

        plots.batch_overview_figure(batch, str(out / "batch_margins.png"))
        for rep in batch.reports:
            plots.margins_figure(rep, str(out / f"{rep.name}_margins.png"))
    if args.format == "md":
        _emit(batch_markdown(batch))
    else:
        _emit(canonical_json(batch.to_dict()))
    return 0


def _cmd_graph_check(args: argparse.Namespace) -> int:
    graph, shown = _read_graph(args.file)
    local = _read_local_for_graph(args.file)
    name = Path(shown).stem
    report = run_graph_checks(graph, local, name=name)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(canonical_json(report.to_dict()), encoding="utf-8")
    _emit(canonical_json(report.to_dict()))
    return 0


def _cmd_channel(args: argparse.Namespace) -> int:
    channel = _read_channel(args.kraus)
    structure = args.channel_cmd == "structure"
    samples = getattr(args, "samples", 3)
    report = run_channel_checks(channel, structure=structure, samples=samples)
    _emit(canonical_json(report.to_dict()))
    return 0


def _cmd_group_suite(args: argparse.Namespace) -> int:
    cfg = SuiteConfig(
        trials=args.trials,
        smooth_trials=args.smooth_trials,
        seed=args.seed,
    )
    suite = inequality_suite(args.size, cfg)
    doc = suite.to_dict()
    md_lines = [
        f"# Transform-inequality suite on Z_{suite.n}",
        "",
        f"- normalization constant delta = sqrt(n) = {suite.delta:.6f}",
        f"- all asserted inequalities passed: {suite.passed}",
        "",
        "| inequality | trials | min slack | equality hit | asserted | passed |",
        "|---|---|---|---|---|---|",
    ]
    for r in suite.records:
        md_lines.append(
            f"| {r.name} | {r.trials} | {r.min_slack:+.3e} | {r.equality_hit} "
            f"| {r.asserted} | {r.passed} |"
        )
    md = "\n".join(md_lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(canonical_json(doc), encoding="utf-8")
        (out / "report.md").write_text(md, encoding="utf-8")
        from . import plots

        plots.suite_slack_figure(suite, str(out / f"z{suite.n}_slacks.png"))
    _emit(md if args.format == "md" else canonical_json(doc))
    return 0


def _cmd_list(args: argparse.Namespace) -> int:
    for name in bundled_data.list_bundled():
        _emit(f"bundled:{name}")
    return 0


def _cmd_version(args: argparse.Namespace) -> int:
    try:
        from importlib.metadata import version

        _emit(version("fusionkit"))
    except Exception:
        _emit("0.1.0")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_check_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=3, help="largest tensor exponent (default 3)")
    p.add_argument(
        "--subsets",
        dest="subset_cap",
        metavar="K",
        type=int,
        default=3,
        help="largest localized subset size (default 3)",
    )
    p.add_argument(
        "--twists", type=int, default=100, help="twist samples for the reduced-twisted check"
    )
    p.add_argument("--seed", type=int, default=0xF051, help="master seed")
    p.add_argument(
        "--criteria",
        default="",
        help=f"comma-separated subset of {','.join(ALL_CRITERIA)} (default: all)",
    )
    p.add_argument("--tol", type=float, default=None, help="relative margin tolerance")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--out", default=None, help="directory for report files and figures")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusionkit",
        description="Positivity obstructions for fusion rings, Perron-Frobenius "
        "analysis of quantum channels, and Fourier inequalities on cyclic groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring", help="fusion-ring commands")
    ring_sub = ring.add_subparsers(dest="ring_cmd", required=True)
    rv = ring_sub.add_parser("validate", help="check the ring axioms only")
    rv.add_argument("file")
    rv.set_defaults(func=_cmd_ring_validate)
    rc = ring_sub.add_parser("check", help="run the categorification checks")
    rc.add_argument("file")
    _add_check_options(rc)
    rc.set_defaults(func=_cmd_ring_check)
    rb = ring_sub.add_parser("batch", help="run the checks over several rings")
    rb.add_argument("files", nargs="+")
    _add_check_options(rb)
    rb.set_defaults(func=_cmd_ring_batch)

    graph = sub.add_parser("graph", help="bipartite-graph commands")
    graph_sub = graph.add_subparsers(dest="graph_cmd", required=True)
    gc = graph_sub.add_parser("check", help="Perron data plus local positivity")
    gc.add_argument("file")
    gc.add_argument("--out", default=None, help="directory for the report file")
    gc.set_defaults(func=_cmd_graph_check)

    channel = sub.add_parser("channel", help="Kraus-channel commands")
    channel_sub = channel.add_subparsers(dest="channel_cmd", required=True)
    cp = channel_sub.add_parser("pf", help="spectral radius, fixed space, irreducibility")
    cp.add_argument("--kraus", required=True, help="channel file (or bundled:NAME)")
    cp.set_defaults(func=_cmd_channel)
    cs = channel_sub.add_parser("structure", help="also verify the fixed-space structure")
    cs.add_argument("--kraus", required=True, help="channel file (or bundled:NAME)")
    cs.add_argument(
        "--samples", type=int, default=3, help="random positive elements to probe (default 3)"
    )
    cs.set_defaults(func=_cmd_channel)

    group = sub.add_parser("group", help="cyclic-group transform commands")
    group_sub = group.add_subparsers(dest="group_cmd", required=True)
    gs = group_sub.add_parser("suite", help="run the inequality suite on Z_n")
    gs.add_argument(
        "--order", dest="size", metavar="N", type=int, required=True, help="group order n"
    )
    gs.add_argument("--trials", type=int, default=200)
    gs.add_argument("--smooth-trials", type=int, default=40)
    gs.add_argument("--seed", type=int, default=0xFA57)
    gs.add_argument("--format", choices=("json", "md"), default="json")
    gs.add_argument("--out", default=None, help="directory for report files and figures")
    gs.set_defaults(func=_cmd_group_suite)

    ls = sub.add_parser("list", help="list bundled corpus entries")
    ls.set_defaults(func=_cmd_list)

    ver = sub.add_parser("version", help="print the package version")
    ver.set_defaults(func=_cmd_version)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
