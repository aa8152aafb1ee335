"""Second-stage subset selection over a (source run, target run) pair.

Six strategies pick which training examples feed the short second training
stage. I picks nine specific off-diagonal transition cells (examples that
became forgettable or late-learned under the pair setting). II and III keep
stable-category examples, dropping the always-correct diagonal cell (III)
and additionally the early-learned one (II). IV and V take the forgettable
examples of one run. VI is the whole shared set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import IoFailure, MalformedAssignment
from .soi import FORGETTABLE, SOIAssignment, SOICategory
from .transitions import shared_example_ids


class Strategy(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"

    def __str__(self) -> str:
        return self.value


DEFAULT_STRATEGY = Strategy.III

# the nine off-diagonal (source, target) cells strategy I collects:
# everything that became forgettable, plus stable-early examples that
# became late learners
STRATEGY_I_CELLS: tuple[tuple[SOICategory, SOICategory], ...] = (
    (SOICategory.ACE, SOICategory.FRGE_1T),
    (SOICategory.ELE, SOICategory.FRGE_1T),
    (SOICategory.LLE, SOICategory.FRGE_1T),
    (SOICategory.LLE, SOICategory.FRGE_GE2T),
    (SOICategory.ELE, SOICategory.FRGE_GE2T),
    (SOICategory.ACE, SOICategory.FRGE_GE2T),
    (SOICategory.FRGE_1T, SOICategory.FRGE_GE2T),
    (SOICategory.ACE, SOICategory.LLE),
    (SOICategory.ELE, SOICategory.LLE),
)

_CELL_STRATEGIES = {
    Strategy.I: frozenset(STRATEGY_I_CELLS),
    Strategy.II: frozenset(
        (category, category)
        for category in SOICategory
        if category not in (SOICategory.ACE, SOICategory.ELE)
    ),
    Strategy.III: frozenset(
        (category, category) for category in SOICategory if category is not SOICategory.ACE
    ),
}


@dataclass(frozen=True)
class SelectionResult:
    """The chosen example ids (sorted, unique) and how they were chosen.

    ``source_cells`` lists the (source, target) transition cells that
    contributed; it is empty for the non-cell strategies IV, V, and VI.
    """

    strategy: Strategy
    source_run: str
    target_run: str
    example_ids: tuple[str, ...]
    source_cells: tuple[tuple[SOICategory, SOICategory], ...]
    include_une: bool = False

    def __len__(self) -> int:
        return len(self.example_ids)


def select(
    strategy: Strategy,
    a: SOIAssignment,
    b: SOIAssignment,
    include_une: bool = False,
    intersect: bool = False,
) -> SelectionResult:
    """Pick the second-stage training subset for one (source, target) pair.

    ``include_une`` widens the forgettable set of IV/V to also cover
    never-learned examples; it does not affect the other strategies.
    """
    shared = shared_example_ids(a, b, intersect=intersect)
    cells: tuple[tuple[SOICategory, SOICategory], ...] = ()
    if strategy in _CELL_STRATEGIES:
        wanted = _CELL_STRATEGIES[strategy]
        chosen = [
            example_id
            for example_id in shared
            if (a.category_of(example_id), b.category_of(example_id)) in wanted
        ]
        if strategy is Strategy.I:
            cells = STRATEGY_I_CELLS
        else:
            cells = tuple(sorted(wanted, key=lambda pair: pair[0].value))
    elif strategy in (Strategy.IV, Strategy.V):
        forgettable = FORGETTABLE | {SOICategory.UNE} if include_une else FORGETTABLE
        side = a if strategy is Strategy.IV else b
        chosen = [
            example_id for example_id in shared if side.category_of(example_id) in forgettable
        ]
    else:
        chosen = list(shared)
    return SelectionResult(
        strategy=strategy,
        source_run=a.run_id,
        target_run=b.run_id,
        example_ids=tuple(sorted(chosen)),
        source_cells=cells,
        include_une=include_une,
    )


def manifest_path(subset_path: str | Path) -> Path:
    return Path(subset_path).with_suffix(".manifest.json")


def export_subset(result: SelectionResult, path: str | Path) -> None:
    """Write one id per line (sorted, trailing newline) plus a JSON sidecar."""
    path = Path(path)
    body = "".join(example_id + "\n" for example_id in result.example_ids)
    manifest = {
        "strategy": result.strategy.value,
        "source_run": result.source_run,
        "target_run": result.target_run,
        "count": len(result.example_ids),
        "include_une": result.include_une,
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body, encoding="utf-8")
        manifest_path(path).write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_subset(path: str | Path) -> tuple[str, ...]:
    """Load a subset file written by export_subset; order is preserved."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    ids = [line for line in text.splitlines() if line.strip()]
    if len(set(ids)) != len(ids):
        raise MalformedAssignment(f"{path}: subset contains duplicate ids")
    return tuple(ids)
