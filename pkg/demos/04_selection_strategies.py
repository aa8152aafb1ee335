"""Size up the six subset-selection strategies on one pair of runs.

Strategies I-III read individual cells of the transition matrix (degraded
cells, stable-but-not-mastered diagonals). IV and V take the forgettable
categories of one run or the other. VI is the whole shared set, which makes
second-stage tuning identical to plain continued training.
"""
from pathlib import Path

from soi_lab import Strategy, build_heatmap, classify_run, export_subset, select
from soi_lab.toy import SyntheticTaskSpec, default_cluster_means, generate_dataset, init_model, train

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

spec = SyntheticTaskSpec(
    task_id="t",
    num_classes=3,
    input_dim=2,
    cluster_means=default_cluster_means(3, 2),
    noise_std=1.6,
    label_noise_rate=0.10,
    n_train=800,
    n_eval=200,
    n_test=200,
    ood_mean_shift=(1.0, 1.0),
    ood_noise_std=1.8,
    seed=5,
)
dataset = generate_dataset(spec)

# two runs of the same task from different initializations and batch orders
runs = []
for seed in (11, 12):
    model = init_model(2, 16, {"t": 3}, seed=seed)
    result = train(model, [dataset], epochs=10, lr=0.1, seed=seed, run_ids={"t": f"run{seed}"})
    runs.append(classify_run(result.dynamics["t"]))
first, second = runs

matrix = build_heatmap(first, second)
print(f"{matrix.total} shared examples, diagonal mass "
      f"{sum(matrix.cell(c, c) for c in first.census())}")
print()

descriptions = {
    Strategy.I: "degraded between runs",
    Strategy.II: "same category, never mastered",
    Strategy.III: "same category, not always-correct",
    Strategy.IV: "forgettable in the first run",
    Strategy.V: "forgettable in the second run",
    Strategy.VI: "everything",
}
for strategy in Strategy:
    chosen = select(strategy, first, second)
    print(f"  {strategy.value:>4}  {len(chosen):>5} examples  ({descriptions[strategy]})")

# IV/V can optionally fold in never-learned examples as well
wide = select(Strategy.IV, first, second, include_une=True)
narrow = select(Strategy.IV, first, second)
print(f"\nstrategy IV grows from {len(narrow)} to {len(wide)} with --include-une")

chosen = select(Strategy.III, first, second)
export_subset(chosen, out_dir / "subset_III.txt")
print("wrote", out_dir / "subset_III.txt", "and its .manifest.json")
