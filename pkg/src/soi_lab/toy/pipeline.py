"""The full two-stage experiment: train, categorize, compare, select, tune.

For each task the pipeline trains a single-task model, then trains one
shared-encoder model on the task pair, categorizes every training example
in every run, builds single-vs-pair transition matrices, renders cartography
maps, selects a second-stage subset per task, fine-tunes the pair model on
the union of subsets, and evaluates ID/OOD accuracy after each stage. Every
artifact lands under one output directory at a fixed relative path, and the
whole tree is a pure function of (config, seed).

With a single task the "pair" run degenerates to a second, independently
seeded run of the same task, so every downstream artifact keeps its shape.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .. import __version__ as _pkg_version
from ..cartography import RegionThresholds, build_map, render_map, write_map_csv
from ..dynamics import LOG_FORMAT_VERSION, TrainingDynamics
from ..errors import InvalidConfig, IoFailure, SoiLabError
from ..selection import SelectionResult, Strategy, select, export_subset
from ..soi import CATEGORY_ORDER, SOIAssignment, classify_run, default_cutoff, write_assignment_csv
from ..transitions import TransitionMatrix, build_heatmap, render_heatmap, write_matrix_csv
from .data import SyntheticTaskSpec, TaskDataset, default_cluster_means, generate_dataset
from .model import init_model
from .rng import derive_seed
from .train import TrainResult, evaluate, second_stage, train

_METRICS = ("p_pred", "p_true")


@dataclass(frozen=True)
class ExperimentConfig:
    tasks: tuple[SyntheticTaskSpec, ...]
    seed: int = 0
    hidden_dim: int = 16
    lr: float = 0.1
    batch_size: int = 32
    stage1_epochs: int = 10
    stage2_epochs: int = 4
    # second-stage step size; None reuses lr. Small subsets of mostly
    # corrupted examples can wreck a head at the full first-stage rate.
    stage2_lr: float | None = None
    strategy: Strategy = Strategy.III
    include_une: bool = False
    late_cutoff: int | None = None
    metric: str = "p_pred"
    var_cutoff: float = 0.2
    conf_cutoff: float = 0.5

    def __post_init__(self) -> None:
        if not 1 <= len(self.tasks) <= 2:
            raise InvalidConfig(f"config needs 1 or 2 tasks, got {len(self.tasks)}")
        if len({t.task_id for t in self.tasks}) != len(self.tasks):
            raise InvalidConfig("task ids must be distinct")
        dims = {t.input_dim for t in self.tasks}
        if len(dims) != 1:
            raise InvalidConfig(
                f"tasks must share input_dim (one encoder), got {sorted(dims)}"
            )
        if self.hidden_dim < 1:
            raise InvalidConfig(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if self.lr <= 0:
            raise InvalidConfig(f"lr must be > 0, got {self.lr}")
        if self.batch_size < 1:
            raise InvalidConfig(f"batch_size must be >= 1, got {self.batch_size}")
        if self.stage1_epochs < 1:
            raise InvalidConfig(f"stage1_epochs must be >= 1, got {self.stage1_epochs}")
        if self.stage2_epochs < 0:
            raise InvalidConfig(f"stage2_epochs must be >= 0, got {self.stage2_epochs}")
        if self.stage2_lr is not None and self.stage2_lr <= 0:
            raise InvalidConfig(f"stage2_lr must be > 0, got {self.stage2_lr}")
        if self.metric not in _METRICS:
            raise InvalidConfig(f"metric must be one of {_METRICS}, got {self.metric!r}")
        if self.late_cutoff is not None and not 1 <= self.late_cutoff <= self.stage1_epochs:
            raise InvalidConfig(
                f"late_cutoff must lie in 1..{self.stage1_epochs}, got {self.late_cutoff}"
            )

    @property
    def thresholds(self) -> RegionThresholds:
        return RegionThresholds(var_cutoff=self.var_cutoff, conf_cutoff=self.conf_cutoff)

    def cutoff(self) -> int:
        return self.late_cutoff if self.late_cutoff is not None else default_cutoff(self.stage1_epochs)


_TASK_KEYS = {
    "task_id", "num_classes", "input_dim", "cluster_means", "noise_std",
    "label_noise_rate", "n_train", "n_eval", "n_test", "ood_mean_shift",
    "ood_noise_std", "seed",
}
_CONFIG_KEYS = {
    "tasks", "seed", "hidden_dim", "lr", "batch_size", "stage1_epochs",
    "stage2_epochs", "stage2_lr", "strategy", "include_une", "late_cutoff", "metric",
    "var_cutoff", "conf_cutoff",
}


def _task_from_dict(raw: Mapping[str, Any], root_seed: int) -> SyntheticTaskSpec:
    unknown = set(raw) - _TASK_KEYS
    if unknown:
        raise InvalidConfig(f"unknown task key(s): {sorted(unknown)}")
    for key in ("task_id", "num_classes", "input_dim", "noise_std", "n_train", "n_eval", "n_test"):
        if key not in raw:
            raise InvalidConfig(f"task is missing required key {key!r}")
    task_id = raw["task_id"]
    num_classes = raw["num_classes"]
    input_dim = raw["input_dim"]
    means = raw.get("cluster_means")
    if means is None:
        means = default_cluster_means(num_classes, input_dim)
    else:
        means = tuple(tuple(float(v) for v in row) for row in means)
    shift = raw.get("ood_mean_shift", 0.0)
    if isinstance(shift, (int, float)):
        shift = (float(shift),) * input_dim
    else:
        shift = tuple(float(v) for v in shift)
    return SyntheticTaskSpec(
        task_id=task_id,
        num_classes=num_classes,
        input_dim=input_dim,
        cluster_means=means,
        noise_std=float(raw["noise_std"]),
        label_noise_rate=float(raw.get("label_noise_rate", 0.0)),
        n_train=raw["n_train"],
        n_eval=raw["n_eval"],
        n_test=raw["n_test"],
        ood_mean_shift=shift,
        ood_noise_std=float(raw.get("ood_noise_std", raw["noise_std"])),
        seed=raw.get("seed", derive_seed(root_seed, "data", task_id)),
    )


def config_from_dict(raw: Mapping[str, Any]) -> ExperimentConfig:
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise InvalidConfig(f"unknown config key(s): {sorted(unknown)}")
    if "tasks" not in raw or not isinstance(raw["tasks"], (list, tuple)):
        raise InvalidConfig("config needs a 'tasks' list")
    seed = raw.get("seed", 0)
    try:
        strategy = Strategy(raw.get("strategy", "III"))
    except ValueError:
        raise InvalidConfig(f"unknown strategy {raw.get('strategy')!r}") from None
    tasks = tuple(_task_from_dict(t, seed) for t in raw["tasks"])
    return ExperimentConfig(
        tasks=tasks,
        seed=seed,
        hidden_dim=raw.get("hidden_dim", 16),
        lr=raw.get("lr", 0.1),
        batch_size=raw.get("batch_size", 32),
        stage1_epochs=raw.get("stage1_epochs", 10),
        stage2_epochs=raw.get("stage2_epochs", 4),
        stage2_lr=raw.get("stage2_lr"),
        strategy=strategy,
        include_une=raw.get("include_une", False),
        late_cutoff=raw.get("late_cutoff"),
        metric=raw.get("metric", "p_pred"),
        var_cutoff=raw.get("var_cutoff", 0.2),
        conf_cutoff=raw.get("conf_cutoff", 0.5),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{path}: config must be a JSON object")
    return config_from_dict(raw)


def _config_echo(config: ExperimentConfig) -> dict[str, Any]:
    return {
        "seed": config.seed,
        "hidden_dim": config.hidden_dim,
        "lr": config.lr,
        "batch_size": config.batch_size,
        "stage1_epochs": config.stage1_epochs,
        "stage2_epochs": config.stage2_epochs,
        "stage2_lr": config.lr if config.stage2_lr is None else config.stage2_lr,
        "strategy": config.strategy.value,
        "include_une": config.include_une,
        "late_cutoff": config.cutoff(),
        "metric": config.metric,
        "var_cutoff": config.var_cutoff,
        "conf_cutoff": config.conf_cutoff,
        "tasks": [
            {
                "task_id": t.task_id,
                "num_classes": t.num_classes,
                "input_dim": t.input_dim,
                "cluster_means": [list(row) for row in t.cluster_means],
                "noise_std": t.noise_std,
                "label_noise_rate": t.label_noise_rate,
                "n_train": t.n_train,
                "n_eval": t.n_eval,
                "n_test": t.n_test,
                "ood_mean_shift": list(t.ood_mean_shift),
                "ood_noise_std": t.ood_noise_std,
                "seed": t.seed,
            }
            for t in config.tasks
        ],
    }


@dataclass(frozen=True)
class PipelineReport:
    """The report.json contents plus where everything was written."""

    data: dict[str, Any]
    out_dir: Path
    report_path: Path
    assignments: dict[str, SOIAssignment] = field(repr=False, default_factory=dict)
    matrices: dict[str, TransitionMatrix] = field(repr=False, default_factory=dict)
    selections: dict[str, SelectionResult] = field(repr=False, default_factory=dict)

    def census(self, run_id: str) -> dict[str, int]:
        return dict(self.data["runs"][run_id]["census"])


def _census_json(assignment: SOIAssignment) -> dict[str, int]:
    return {category.value: count for category, count in assignment.census().items()}


def _write_dynamics_jsonl(result: TrainResult, task_id: str, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for rec in result.records[task_id]:
            handle.write(rec.to_json() + "\n")


def run_pipeline(config: ExperimentConfig, out_dir: str | Path) -> PipelineReport:
    """Execute the whole experiment under ``out_dir``; see module docstring.

    On any failure every artifact written so far is removed, so a directory
    either holds a complete experiment or none at all.
    """
    out = Path(out_dir)
    written: list[Path] = []

    def target(relative: str) -> Path:
        path = out / relative
        written.append(path)
        return path

    try:
        return _run_pipeline_inner(config, out, target)
    except SoiLabError:
        for path in written:
            path.unlink(missing_ok=True)
        ancestors = set()
        for path in written:
            parent = path.parent
            while parent != out and out in parent.parents:
                ancestors.add(parent)
                parent = parent.parent
        for sub in sorted(ancestors, reverse=True):
            if sub.is_dir() and not any(sub.iterdir()):
                sub.rmdir()
        raise


def _run_pipeline_inner(config: ExperimentConfig, out: Path, target) -> PipelineReport:
    datasets = [generate_dataset(spec) for spec in config.tasks]
    task_ids = [d.task_id for d in datasets]
    cutoff = config.cutoff()
    thresholds = config.thresholds

    # stage 1a: one single-task model per task
    single_results: dict[str, TrainResult] = {}
    single_models = {}
    for dataset in datasets:
        task_id = dataset.task_id
        model = init_model(
            dataset.spec.input_dim,
            config.hidden_dim,
            {task_id: dataset.num_classes},
            seed=derive_seed(config.seed, "model", "single", task_id),
        )
        single_results[task_id] = train(
            model,
            [dataset],
            epochs=config.stage1_epochs,
            lr=config.lr,
            batch_size=config.batch_size,
            seed=derive_seed(config.seed, "train", "single", task_id),
            run_ids={task_id: f"single_{task_id}"},
        )
        single_models[task_id] = model

    # stage 1b: the pair run (or an independent re-run for one task)
    multi_model = init_model(
        datasets[0].spec.input_dim,
        config.hidden_dim,
        {d.task_id: d.num_classes for d in datasets},
        seed=derive_seed(config.seed, "model", "multi"),
    )
    multi_result = train(
        multi_model,
        datasets,
        epochs=config.stage1_epochs,
        lr=config.lr,
        batch_size=config.batch_size,
        seed=derive_seed(config.seed, "train", "multi"),
        run_ids={t: f"multi_{t}" for t in task_ids},
    )

    runs: dict[str, tuple[TrainingDynamics, TrainResult, str]] = {}
    for task_id in task_ids:
        runs[f"single_{task_id}"] = (
            single_results[task_id].dynamics[task_id], single_results[task_id], task_id,
        )
        runs[f"multi_{task_id}"] = (multi_result.dynamics[task_id], multi_result, task_id)

    # per-run artifacts: dynamics log, SOI table, cartography map
    assignments: dict[str, SOIAssignment] = {}
    for run_id in sorted(runs):
        dynamics, result, task_id = runs[run_id]
        _write_dynamics_jsonl(result, task_id, target(f"runs/{run_id}/dynamics.jsonl"))
        assignment = classify_run(dynamics, late_cutoff=cutoff)
        assignments[run_id] = assignment
        write_assignment_csv(assignment, target(f"soi/{run_id}.csv"))
        points = build_map(dynamics, assignment, thresholds, metric=config.metric)
        write_map_csv(points, target(f"carto/{run_id}.csv"))
        render_map(points, target(f"carto/{run_id}.svg"), thresholds, title=run_id)

    # single -> multi transition matrix per task
    matrices: dict[str, TransitionMatrix] = {}
    for task_id in task_ids:
        key = f"single_{task_id}__multi_{task_id}"
        matrix = build_heatmap(assignments[f"single_{task_id}"], assignments[f"multi_{task_id}"])
        matrices[key] = matrix
        write_matrix_csv(matrix, target(f"heatmaps/{key}.csv"))
        render_heatmap(matrix, target(f"heatmaps/{key}.svg"))

    # subset selection per task
    selections: dict[str, SelectionResult] = {}
    subset_paths: dict[str, str] = {}
    for task_id in task_ids:
        selection = select(
            config.strategy,
            assignments[f"single_{task_id}"],
            assignments[f"multi_{task_id}"],
            include_une=config.include_une,
        )
        selections[task_id] = selection
        relative = f"subsets/{config.strategy.value}_{task_id}.txt"
        subset_paths[task_id] = relative
        subset_file = target(relative)
        target(f"subsets/{config.strategy.value}_{task_id}.manifest.json")
        export_subset(selection, subset_file)

    # accuracies after stage 1
    accuracy: dict[str, dict[str, dict[str, float]]] = {
        "single": {}, "multi_stage1": {}, "multi_stage2": {},
    }
    for dataset in datasets:
        task_id = dataset.task_id
        accuracy["single"][task_id] = {
            "test": evaluate(single_models[task_id], dataset, "test"),
            "ood": evaluate(single_models[task_id], dataset, "ood"),
        }
        accuracy["multi_stage1"][task_id] = {
            "test": evaluate(multi_model, dataset, "test"),
            "ood": evaluate(multi_model, dataset, "ood"),
        }

    # stage 2: fine-tune the pair model on the selected subsets
    if config.stage2_epochs > 0:
        second_stage(
            multi_model,
            datasets,
            {t: selections[t] for t in task_ids},
            epochs=config.stage2_epochs,
            lr=config.lr if config.stage2_lr is None else config.stage2_lr,
            batch_size=config.batch_size,
            seed=derive_seed(config.seed, "train", "stage2"),
        )
    for dataset in datasets:
        accuracy["multi_stage2"][dataset.task_id] = {
            "test": evaluate(multi_model, dataset, "test"),
            "ood": evaluate(multi_model, dataset, "ood"),
        }

    report_data: dict[str, Any] = {
        "format": {"log_format_version": LOG_FORMAT_VERSION, "tool_version": _pkg_version},
        "config": _config_echo(config),
        "runs": {
            run_id: {
                "task": runs[run_id][2],
                "setting": "single" if run_id.startswith("single_") else "multi",
                "epochs": runs[run_id][0].num_epochs,
                "num_examples": len(runs[run_id][0]),
                "late_cutoff": cutoff,
                "census": _census_json(assignments[run_id]),
                "epoch_mean_loss": list(runs[run_id][1].epoch_losses[runs[run_id][2]]),
            }
            for run_id in sorted(runs)
        },
        "heatmaps": {
            key: {
                "source_run": m.source_run,
                "target_run": m.target_run,
                "category_order": [c.value for c in CATEGORY_ORDER],
                "counts": [list(row) for row in m.counts],
                "row_sums": list(m.row_sums),
                "col_sums": list(m.col_sums),
                "total": m.total,
            }
            for key, m in sorted(matrices.items())
        },
        "selection": {
            task_id: {
                "strategy": config.strategy.value,
                "include_une": config.include_une,
                "count": len(selections[task_id]),
                "path": subset_paths[task_id],
            }
            for task_id in task_ids
        },
        "accuracy": accuracy,
        "notes": {
            "dynamics_split": "train",
            "ood_construction": "covariate shift (mean shift + noise inflation)",
            "pair_schedule": "round-robin batches",
        },
    }
    report_path = target("report.json")
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(
        json.dumps(report_data, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return PipelineReport(
        data=report_data,
        out_dir=out,
        report_path=report_path,
        assignments=assignments,
        matrices=matrices,
        selections=selections,
    )
