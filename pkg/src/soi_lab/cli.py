"""Command-line interface: one subcommand per analysis artifact.

Exit codes: 0 success, 1 domain error (single JSON line on stderr with a
machine-readable error code), 2 usage error. Informational output goes to
stdout. Relative output paths are resolved under $SOI_OUT_DIR when that
variable is set; input paths are always taken as given.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .cartography import RegionThresholds, build_map, render_map, write_map_csv
from .dynamics import LOG_FORMAT_VERSION, TrainingDynamics, load_runs
from .errors import SoiLabError
from .selection import Strategy, export_subset, select
from .soi import classify_run, default_cutoff, read_assignment_csv, write_assignment_csv
from .toy.data import generate_dataset
from .toy.model import init_model
from .toy.pipeline import load_config, run_pipeline
from .toy.rng import derive_seed
from .toy.train import train


class AmbiguousRun(SoiLabError):
    """A multi-run log needs --run to say which run is meant."""

    code = "cli.AmbiguousRun"


def _out_path(raw: str) -> Path:
    path = Path(raw)
    root = os.environ.get("SOI_OUT_DIR")
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def _pick_run(runs: dict[str, TrainingDynamics], wanted: str | None) -> TrainingDynamics:
    if wanted is not None:
        if wanted not in runs:
            raise AmbiguousRun(
                f"log has no run {wanted!r}; available: {sorted(runs)}"
            )
        return runs[wanted]
    if len(runs) != 1:
        raise AmbiguousRun(
            f"log contains {len(runs)} runs {sorted(runs)}; pass --run to pick one"
        )
    return next(iter(runs.values()))


def _cmd_ingest(args: argparse.Namespace) -> int:
    runs = load_runs(args.log)
    if args.run is not None:
        runs = {args.run: _pick_run(runs, args.run)}
    summary = {
        "log": str(args.log),
        "log_format_version": LOG_FORMAT_VERSION,
        "runs": {
            run_id: {"examples": len(d), "epochs": d.num_epochs}
            for run_id, d in sorted(runs.items())
        },
    }
    print(json.dumps(summary, sort_keys=True))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    dynamics = _pick_run(load_runs(args.log), args.run)
    cutoff = args.cutoff if args.cutoff is not None else default_cutoff(dynamics.num_epochs)
    assignment = classify_run(dynamics, late_cutoff=cutoff)
    out = _out_path(args.out)
    write_assignment_csv(assignment, out)
    print(f"# run={dynamics.run_id} epochs={dynamics.num_epochs} cutoff={cutoff}")
    census = {category.value: count for category, count in assignment.census().items()}
    print(json.dumps({"out": str(out), "census": census}, sort_keys=True))
    return 0


def _cmd_carto(args: argparse.Namespace) -> int:
    dynamics = _pick_run(load_runs(args.log), args.run)
    cutoff = args.cutoff if args.cutoff is not None else default_cutoff(dynamics.num_epochs)
    assignment = classify_run(dynamics, late_cutoff=cutoff)
    thresholds = RegionThresholds(var_cutoff=args.var_cutoff, conf_cutoff=args.conf_cutoff)
    points = build_map(dynamics, assignment, thresholds, metric=args.metric)
    out_csv = _out_path(args.out_csv)
    write_map_csv(points, out_csv)
    outputs = {"out_csv": str(out_csv)}
    if args.out_svg is not None:
        out_svg = _out_path(args.out_svg)
        render_map(points, out_svg, thresholds, title=dynamics.run_id)
        outputs["out_svg"] = str(out_svg)
    print(f"# run={dynamics.run_id} epochs={dynamics.num_epochs} cutoff={cutoff} metric={args.metric}")
    regions = {}
    for p in points:
        regions[p.region.value] = regions.get(p.region.value, 0) + 1
    print(json.dumps({**outputs, "regions": regions}, sort_keys=True))
    return 0


def _load_assignment(path: str):
    return read_assignment_csv(path, run_id=Path(path).stem)


def _cmd_heatmap(args: argparse.Namespace) -> int:
    from .transitions import build_heatmap, render_heatmap, write_matrix_csv

    matrix = build_heatmap(_load_assignment(args.a), _load_assignment(args.b),
                           intersect=args.intersect)
    out_csv = _out_path(args.out_csv)
    write_matrix_csv(matrix, out_csv)
    outputs = {"out_csv": str(out_csv)}
    if args.out_svg is not None:
        out_svg = _out_path(args.out_svg)
        render_heatmap(matrix, out_svg)
        outputs["out_svg"] = str(out_svg)
    print(json.dumps({**outputs, "total": matrix.total}, sort_keys=True))
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    result = select(
        Strategy(args.strategy),
        _load_assignment(args.a),
        _load_assignment(args.b),
        include_une=args.include_une,
        intersect=args.intersect,
    )
    out = _out_path(args.out)
    export_subset(result, out)
    print(json.dumps(
        {"out": str(out), "strategy": result.strategy.value, "count": len(result)},
        sort_keys=True,
    ))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out_dir = _out_path(args.out_dir)
    summary_runs = {}
    for spec in config.tasks:
        dataset = generate_dataset(spec)
        model = init_model(
            spec.input_dim,
            config.hidden_dim,
            {spec.task_id: spec.num_classes},
            seed=derive_seed(config.seed, "model", "single", spec.task_id),
        )
        run_id = f"single_{spec.task_id}"
        result = train(
            model,
            [dataset],
            epochs=config.stage1_epochs,
            lr=config.lr,
            batch_size=config.batch_size,
            seed=derive_seed(config.seed, "train", "single", spec.task_id),
            run_ids={spec.task_id: run_id},
        )
        log_path = out_dir / "runs" / run_id / "dynamics.jsonl"
        log_path.parent.mkdir(parents=True, exist_ok=True)
        with log_path.open("w", encoding="utf-8") as handle:
            for rec in result.records[spec.task_id]:
                handle.write(rec.to_json() + "\n")
        dynamics = result.dynamics[spec.task_id]
        summary_runs[run_id] = {
            "log": str(log_path),
            "examples": len(dynamics),
            "epochs": dynamics.num_epochs,
        }
    print(json.dumps({"out_dir": str(out_dir), "runs": summary_runs}, sort_keys=True))
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out_dir = _out_path(args.out_dir)
    report = run_pipeline(config, out_dir)
    censuses = {run_id: info["census"] for run_id, info in report.data["runs"].items()}
    print(json.dumps(
        {"report": str(report.report_path), "censuses": censuses, "accuracy": report.data["accuracy"]},
        sort_keys=True,
    ))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soi",
        description="Training-dynamics analysis: categorize, map, compare, select, simulate.",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"soi-lab {__version__} (log-format {LOG_FORMAT_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a dynamics log and summarize its runs")
    p.add_argument("--log", required=True)
    p.add_argument("--run", default=None)
    p.set_defaults(handler=_cmd_ingest)

    p = sub.add_parser("classify", help="assign every example of a run to a category")
    p.add_argument("--log", required=True)
    p.add_argument("--run", default=None)
    p.add_argument("--cutoff", type=int, default=None,
                   help="last epoch still counted early (default: half the run)")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("carto", help="confidence/variability map for a run")
    p.add_argument("--log", required=True)
    p.add_argument("--run", default=None)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--metric", choices=("p_pred", "p_true"), default="p_pred")
    p.add_argument("--var-cutoff", type=float, default=0.2)
    p.add_argument("--conf-cutoff", type=float, default=0.5)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(handler=_cmd_carto)

    p = sub.add_parser("heatmap", help="category-transition matrix between two runs")
    p.add_argument("--a", required=True, help="source run's category CSV")
    p.add_argument("--b", required=True, help="target run's category CSV")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.add_argument("--intersect", action="store_true",
                   help="tolerate differing example sets by using the overlap")
    p.set_defaults(handler=_cmd_heatmap)

    p = sub.add_parser("select", help="pick a second-stage subset from two category CSVs")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="III")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--include-une", action="store_true",
                   help="count never-learned examples as forgettable (strategies IV/V)")
    p.add_argument("--intersect", action="store_true")
    p.set_defaults(handler=_cmd_select)

    p = sub.add_parser("simulate", help="train single-task toy runs and write their logs")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("pipeline", help="run the full two-stage experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=_cmd_pipeline)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help/--version
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.handler(args)
    except SoiLabError as exc:
        message = " ".join(str(exc).split())
        print(json.dumps({"error": exc.code, "message": message}), file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(run_cli(sys.argv[1:]))
