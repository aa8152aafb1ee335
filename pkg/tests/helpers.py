"""Independent reference implementations the tests check production code against.

Everything here is deliberately written differently from the package code:
string scanning instead of a decision tree, Fraction arithmetic instead of
floats, dict-accumulation recounts instead of Counter pipelines. Slow and
obvious beats fast and clever in an oracle.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from soi_lab import AssignmentEntry, SOIAssignment, SOICategory

CATS = list(SOICategory)


def naive_events(seq: Sequence[int]) -> tuple[int, int]:
    """(forgetting, recollecting) by literal substring scanning."""
    bits = "".join(str(int(b)) for b in seq)
    forget_positions = [i for i in range(len(bits) - 1) if bits[i : i + 2] == "10"]
    relearn_positions = [i for i in range(len(bits) - 1) if bits[i : i + 2] == "01"]
    forgetting = len(forget_positions)
    if not forget_positions:
        return forgetting, 0
    first_forget = forget_positions[0]
    recollecting = sum(1 for i in relearn_positions if i > first_forget)
    return forgetting, recollecting


def naive_classify(seq: Sequence[int], cutoff: int) -> SOICategory:
    """Six independent predicates; asserts exactly one of them holds."""
    bits = [int(b) for b in seq]
    forgetting, recollecting = naive_events(bits)
    ever_correct = 1 in bits
    first_correct = bits.index(1) + 1 if ever_correct else None

    is_ace = all(b == 1 for b in bits)
    is_une = (not ever_correct) or (forgetting >= 1 and recollecting == 0)
    is_1t = forgetting == 1 and recollecting >= 1
    is_2t = forgetting >= 2 and recollecting >= 1
    is_ele = (
        ever_correct and forgetting == 0 and not is_ace
        and first_correct is not None and first_correct <= cutoff
    )
    is_lle = (
        ever_correct and forgetting == 0 and not is_ace
        and first_correct is not None and first_correct > cutoff
    )

    flags = {
        SOICategory.UNE: is_une,
        SOICategory.ACE: is_ace,
        SOICategory.FRGE_1T: is_1t,
        SOICategory.FRGE_GE2T: is_2t,
        SOICategory.ELE: is_ele,
        SOICategory.LLE: is_lle,
    }
    hits = [cat for cat, flag in flags.items() if flag]
    assert len(hits) == 1, f"sequence {bits} matched {hits}"
    return hits[0]


def all_binary_sequences(max_len: int):
    for length in range(1, max_len + 1):
        for value in range(2 ** length):
            yield [(value >> i) & 1 for i in range(length)]


def exact_mean(values: Sequence[float]) -> Fraction:
    total = Fraction(0)
    for v in values:
        total += Fraction(v)
    return total / len(values)


def exact_population_std(values: Sequence[float]) -> Fraction | float:
    """Exact variance via Fraction; the final sqrt is done in float."""
    mean = exact_mean(values)
    var = Fraction(0)
    for v in values:
        var += (Fraction(v) - mean) ** 2
    var /= len(values)
    import math

    return math.sqrt(float(var))


def make_assignment(run_id: str, categories: Sequence[SOICategory],
                    ids: Sequence[str] | None = None) -> SOIAssignment:
    """Assignment with given per-example categories (landmarks filled neutrally)."""
    if ids is None:
        ids = [f"ex{i:06d}" for i in range(len(categories))]
    entries = tuple(
        AssignmentEntry(
            example_id=example_id,
            category=category,
            forgetting=0,
            recollecting=0,
            first_correct_epoch=1,
            last_correct=True,
        )
        for example_id, category in sorted(zip(ids, categories))
    )
    return SOIAssignment(run_id=run_id, num_epochs=10, late_cutoff=5, entries=entries)


def random_assignment_pair(rng: np.random.Generator, n: int,
                           run_a: str = "a", run_b: str = "b") -> tuple[SOIAssignment, SOIAssignment]:
    ids = [f"ex{i:06d}" for i in range(n)]
    cats_a = [CATS[k] for k in rng.integers(0, 6, size=n)]
    cats_b = [CATS[k] for k in rng.integers(0, 6, size=n)]
    return make_assignment(run_a, cats_a, ids), make_assignment(run_b, cats_b, ids)


def recount_matrix(a: SOIAssignment, b: SOIAssignment) -> dict:
    """Brute-force transition recount: plain dict accumulation per example."""
    cat_a = {e.example_id: e.category for e in a.entries}
    cat_b = {e.example_id: e.category for e in b.entries}
    cells: dict[tuple[SOICategory, SOICategory], int] = {}
    row: dict[SOICategory, int] = {}
    col: dict[SOICategory, int] = {}
    total = 0
    for example_id in cat_a:
        src, tgt = cat_a[example_id], cat_b[example_id]
        cells[(src, tgt)] = cells.get((src, tgt), 0) + 1
        row[src] = row.get(src, 0) + 1
        col[tgt] = col.get(tgt, 0) + 1
        total += 1
    return {"cells": cells, "row": row, "col": col, "total": total}
