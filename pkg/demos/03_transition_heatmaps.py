"""Compare how the same examples are categorized under two training setups.

A single-task model and a two-task shared-encoder model see the same task-A
training set, but interference from task B shuffles examples between
categories. The transition matrix counts every source -> target move; its
margins reproduce the two per-run censuses.
"""
from pathlib import Path

from soi_lab import CATEGORY_ORDER, build_heatmap, classify_run, render_heatmap, write_matrix_csv
from soi_lab.toy import SyntheticTaskSpec, default_cluster_means, generate_dataset, init_model, train

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)


def make_spec(task_id, num_classes, seed):
    return SyntheticTaskSpec(
        task_id=task_id,
        num_classes=num_classes,
        input_dim=2,
        cluster_means=default_cluster_means(num_classes, 2),
        noise_std=1.6,
        label_noise_rate=0.10,
        n_train=500,
        n_eval=100,
        n_test=100,
        ood_mean_shift=(1.0, 0.0),
        ood_noise_std=1.3,
        seed=seed,
    )


task_a = generate_dataset(make_spec("a", 3, seed=101))
task_b = generate_dataset(make_spec("b", 4, seed=102))

solo = init_model(2, 16, {"a": 3}, seed=1)
solo_run = train(solo, [task_a], epochs=10, lr=0.1, seed=1, run_ids={"a": "solo_a"})

pair = init_model(2, 16, {"a": 3, "b": 4}, seed=2)
pair_run = train(pair, [task_a, task_b], epochs=10, lr=0.1, seed=2, run_ids={"a": "pair_a", "b": "pair_b"})

source = classify_run(solo_run.dynamics["a"])
target = classify_run(pair_run.dynamics["a"])

matrix = build_heatmap(source, target)
write_matrix_csv(matrix, out_dir / "heatmap_a.csv")
render_heatmap(matrix, out_dir / "heatmap_a.svg")
print("wrote", out_dir / "heatmap_a.csv")
print("wrote", out_dir / "heatmap_a.svg")
print()

# text rendering of the same matrix, margins included
labels = [c.display_label for c in CATEGORY_ORDER]
width = max(len(lab) for lab in labels) + 2
print(" " * width + "".join(f"{lab:>10}" for lab in labels) + f"{'SUM':>10}")
for i, row_label in enumerate(labels):
    cells = "".join(f"{matrix.counts[i][j]:>10}" for j in range(6))
    print(f"{row_label:<{width}}" + cells + f"{matrix.row_sums[i]:>10}")
print(f"{'SUM':<{width}}" + "".join(f"{s:>10}" for s in matrix.col_sums) + f"{matrix.total:>10}")

moved = matrix.total - sum(matrix.cell(c, c) for c in CATEGORY_ORDER)
print(f"\n{moved} of {matrix.total} examples changed category under the shared encoder")
