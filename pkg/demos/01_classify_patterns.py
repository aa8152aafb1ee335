"""Walk through the six example categories on hand-made correctness patterns.

Each pattern below is the per-epoch correctness of one training example
(1 = the model predicted its label that epoch). Forgetting is a 1 -> 0 step
between adjacent epochs; recollecting is a 0 -> 1 step after the first
forgetting. The category falls out of those two counts plus when (if ever)
the example first became correct.
"""
from soi_lab import classify, count_events, default_cutoff

patterns = {
    "solid from the start": [1, 1, 1, 1, 1, 1, 1, 1],
    "one wobble": [1, 1, 0, 1, 1, 1, 1, 1],
    "chronic flip-flop": [0, 1, 0, 0, 0, 1, 0, 1],
    "picked up early": [0, 1, 1, 1, 1, 1, 1, 1],
    "picked up late": [0, 0, 0, 0, 0, 0, 1, 1],
    "forgotten for good": [1, 1, 1, 0, 0, 0, 0, 0],
    "never learned": [0, 0, 0, 0, 0, 0, 0, 0],
}

epochs = 8
cutoff = default_cutoff(epochs)
print(f"{epochs} epochs, early/late boundary at epoch {cutoff}\n")

for name, bits in patterns.items():
    events = count_events(bits)
    category = classify(bits, late_cutoff=cutoff)
    shown = "".join(str(b) for b in bits)
    print(f"{shown}  {name}")
    print(f"          forgetting={events.forgetting} recollecting={events.recollecting}"
          f" first_correct={events.first_correct_epoch}  ->  {category.display_label}")
    print()

# the boundary is inclusive: first correct exactly at the cutoff is still early
boundary = [0, 0, 0, 1, 1, 1, 1, 1]
print("boundary case", "".join(str(b) for b in boundary))
print("  cutoff 4:", classify(boundary, late_cutoff=4).display_label)
print("  cutoff 3:", classify(boundary, late_cutoff=3).display_label)
