"""Command-line surface.

Machine-readable JSON goes to stdout, human-readable summaries to
stderr.  Exit codes: 0 success / verdict true, 1 verdict false (not a
solution, crossover present, unrealizable, ...), 2 usage or parse error,
3 internal defect (oracle disagreement).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from . import fileio, progress, sensors, validate
from .clip import clip as run_clip
from .exceptions import (
    ActionSensorsError,
    CrossoverError,
    InvariantViolation,
    NotASolution,
    ParseError,
    ScopeViolation,
    VersionMismatch,
)
from .model import Plan, World
from .progress import CrossoverConflict, OperativeActionSet, ProgressMeasure
from .sensors import ConeRelation, IndistinguishabilityConstraint, SensorPartition
from .validate import SolutionReport


def _emit(payload: dict, summary: str) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    sys.stderr.write(summary + "\n")


def _load(path: str, kind: str) -> Any:
    document = fileio.load(path)
    if document.kind != kind:
        raise ParseError(f"{path}: expected a {kind} document, found {document.kind!r}")
    return document.body


def _report_obj(report: SolutionReport) -> dict:
    return {
        "safe": report.safe,
        "receptive": report.receptive,
        "finite": report.finite,
        "reaches_goal": report.reaches_goal,
        "covers_initial": report.covers_initial,
        "verdict": report.verdict,
        "counterexample": (
            str(report.counterexample) if report.counterexample is not None else None
        ),
    }


def _conflict_obj(conflict: CrossoverConflict) -> dict:
    return {
        "states": sorted({conflict.state_a, conflict.state_b}),
        "witness_1": [str(e) for e in conflict.witness_1],
        "witness_2": [str(e) for e in conflict.witness_2],
    }


def _operative_obj(operative: OperativeActionSet) -> dict:
    return {state: sorted(actions) for state, actions in operative.entries}


def _measure_obj(measure: ProgressMeasure) -> dict:
    return dict(sorted(measure.values.items()))


def _relation_obj(relation: ConeRelation) -> dict:
    return {
        "observations": sorted(relation.domain),
        "pairs": [list(p) for p in sorted(relation.pairs)],
        "operative_pairs": [list(p) for p in sorted(relation.operative_pairs)],
        "slices": {y: sorted(relation.actions_for(y)) for y in sorted(relation.domain)},
    }


def _partition_obj(partition: SensorPartition) -> list[dict]:
    cells = []
    for prescription, states in sorted(
        partition.cells().items(), key=lambda kv: tuple(sorted(kv[1]))
    ):
        cells.append(
            {
                "states": sorted(states),
                "prescribes": sorted(prescription),
                "terminal": not prescription,
            }
        )
    return cells


def _cmd_validate(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    report = validate.solves(plan, world)
    _emit(
        {"kind": "solution_report", **_report_obj(report)},
        f"solution: {report.verdict} ({report.summary()})",
    )
    return 0 if report.verdict else 1


def _cmd_crossovers(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    conflicts = progress.find_crossovers(plan, world)
    _emit(
        {
            "kind": "crossovers",
            "count": len(conflicts),
            "conflicts": [_conflict_obj(c) for c in conflicts],
        },
        f"{len(conflicts)} crossover conflict(s)",
    )
    return 0 if not conflicts else 1


def _cmd_measure(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    try:
        measure = progress.compute_progress_measure(plan, world)
    except CrossoverError as exc:
        _emit(
            {
                "kind": "crossover_error",
                "conflicts": [_conflict_obj(c) for c in exc.conflicts],
            },
            f"no progress measure: {len(exc.conflicts)} crossover conflict(s)",
        )
        return 1
    _emit(
        {"kind": "progress_measure", "values": _measure_obj(measure)},
        "progress measure with max value "
        f"{max(measure.values.values()) if measure.values else 0}",
    )
    return 0


def _cmd_clip(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    representatives = run_clip(plan, world)
    shown = representatives
    if args.max_representatives is not None:
        shown = representatives[: args.max_representatives]
    _emit(
        {
            "kind": "representatives",
            "count": len(representatives),
            "representatives": [
                {
                    "operative": _operative_obj(rep.operative),
                    "plan": fileio.body_object(rep.plan),
                }
                for rep in shown
            ],
        },
        f"{len(representatives)} representative(s)",
    )
    return 0 if representatives else 1


def _cmd_cones(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    measure = progress.compute_progress_measure(plan, world)
    relation = sensors.cone_relation(measure, plan, world)
    _emit(
        {
            "kind": "cone_relation",
            "measure": _measure_obj(measure),
            **_relation_obj(relation),
        },
        f"{len(relation.pairs)} cone pair(s) over {len(relation.domain)} observation(s)",
    )
    return 0


def _cmd_sensors(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    measure = progress.compute_progress_measure(plan, world)
    relation = sensors.cone_relation(measure, plan, world)
    if args.mode == "singleton":
        count = sensors.count_singleton_sensors(relation)
        payload: dict = {"kind": "sensors", "mode": "singleton", "count": count}
        if not args.count_only:
            stream = sensors.enumerate_singleton_sensors(relation)
            listed = []
            for i, sensor in enumerate(stream):
                if i >= args.limit:
                    break
                listed.append(sensor.as_dict())
            payload["sensors"] = listed
        _emit(payload, f"{count} singleton sensor(s)")
        return 0
    count = 1
    for y in sorted(relation.domain):
        count *= 2 ** len(relation.actions_for(y)) - 1
    payload = {"kind": "sensors", "mode": "permissive", "count": count}
    if not args.count_only:
        maximal = sensors.permissive_sensor(relation)
        payload["maximal"] = {y: sorted(us) for y, us in maximal.entries}
    _emit(payload, f"{count} permissive sensor(s)")
    return 0


def _cmd_realizable(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    constraint: IndistinguishabilityConstraint = _load(args.constraint, "constraint")
    sensor = sensors.operative_sensor(plan, world)
    partition = sensors.to_partition(sensor, world)
    ok, violation = sensors.is_realizable(partition, constraint)
    _emit(
        {
            "kind": "realizability",
            "realizable": ok,
            "violation": list(violation) if violation else None,
            "cells": _partition_obj(partition),
        },
        "realizable" if ok else f"not realizable: states {violation} are confounded",
    )
    return 0 if ok else 1


def _cmd_export_dot(args: argparse.Namespace) -> int:
    document = fileio.load(args.file)
    text = fileio.export_dot(document.body)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
        sys.stderr.write(f"wrote {args.out}\n")
    else:
        sys.stdout.write(text)
        sys.stderr.write(f"exported {document.kind} as DOT\n")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    world: World = _load(args.world, "world")
    plan: Plan = _load(args.plan, "plan")
    report = validate.oracle_check(plan, world, cap=args.cap)
    payload = {
        "kind": "oracle_report",
        "agree": report.agree,
        "bound": report.bound,
        "library": _report_obj(report.library),
        "oracle": {
            "safe": report.safe,
            "receptive": report.receptive,
            "finite": report.finite,
            "reaches_goal": report.reaches_goal,
            "covers_initial": report.covers_initial,
            "verdict": report.verdict,
        },
    }
    if not report.agree:
        _emit(payload, "DEFECT: oracle disagrees with the library verdict")
        return 3
    _emit(payload, f"oracle agrees; verdict: {report.verdict}")
    return 0 if report.verdict else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actionsensors",
        description="Validate plans, clip crossovers, and derive action-based sensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(handler=handler)
        return p

    p = add("validate", _cmd_validate, "check whether a plan solves a world")
    p.add_argument("world")
    p.add_argument("plan")

    p = add("crossovers", _cmd_crossovers, "list crossover conflicts")
    p.add_argument("world")
    p.add_argument("plan")

    p = add("measure", _cmd_measure, "compute the canonical progress measure")
    p.add_argument("world")
    p.add_argument("plan")

    p = add("clip", _cmd_clip, "enumerate crossover-free representatives")
    p.add_argument("world")
    p.add_argument("plan")
    p.add_argument("--max-representatives", type=int, default=None)

    p = add("cones", _cmd_cones, "compute the cone relation")
    p.add_argument("world")
    p.add_argument("plan")

    p = add("sensors", _cmd_sensors, "enumerate action-based sensors")
    p.add_argument("world")
    p.add_argument("plan")
    p.add_argument("--mode", choices=("singleton", "permissive"), required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--limit", type=int, default=100)

    p = add("realizable", _cmd_realizable, "check a sensor partition against a constraint")
    p.add_argument("world")
    p.add_argument("plan")
    p.add_argument("--constraint", required=True)

    p = add("export-dot", _cmd_export_dot, "render a world or plan as DOT")
    p.add_argument("file")
    p.add_argument("--out", default=None)

    p = add("oracle", _cmd_oracle, "cross-check solves() against the execution oracle")
    p.add_argument("world")
    p.add_argument("plan")
    p.add_argument("--cap", type=int, default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.handler(args)
    except (ParseError, VersionMismatch, InvariantViolation) as exc:
        _emit(
            {"kind": "error", "error": type(exc).__name__, "message": str(exc)},
            f"error: {exc}",
        )
        return 2
    except NotASolution as exc:
        _emit(
            {
                "kind": "error",
                "error": "NotASolution",
                "message": str(exc),
                "report": _report_obj(exc.report),
            },
            f"error: {exc}",
        )
        return 1
    except ScopeViolation as exc:
        _emit(
            {"kind": "error", "error": "ScopeViolation", "message": str(exc)},
            f"error: {exc}",
        )
        return 1
    except ActionSensorsError as exc:
        _emit(
            {"kind": "error", "error": type(exc).__name__, "message": str(exc)},
            f"error: {exc}",
        )
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
