"""Transition-matrix construction, marginals, CSV table, and the grid figure."""
from __future__ import annotations

import numpy as np
import pytest

import helpers
from soi_lab import SOICategory, build_heatmap, render_heatmap, write_matrix_csv
from soi_lab.errors import EmptyIntersection, ExampleSetMismatch


def test_identity_transition_is_diagonal():
    rng = np.random.default_rng(1)
    a, _ = helpers.random_assignment_pair(rng, 300)
    m = build_heatmap(a, a)
    census = a.census()
    for i, category in enumerate(helpers.CATS):
        assert m.counts[i][i] == census[category]
    assert sum(sum(row) for row in m.counts) == sum(m.counts[i][i] for i in range(6))


def test_marginals_match_censuses_randomized():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a, b = helpers.random_assignment_pair(rng, 400)
        m = build_heatmap(a, b)
        oracle = helpers.recount_matrix(a, b)
        assert m.total == 400
        for i, src in enumerate(helpers.CATS):
            assert m.row_sums[i] == oracle["row"].get(src, 0)
        for j, tgt in enumerate(helpers.CATS):
            assert m.col_sums[j] == oracle["col"].get(tgt, 0)


def test_transpose_property():
    rng = np.random.default_rng(3)
    a, b = helpers.random_assignment_pair(rng, 250)
    forward = build_heatmap(a, b)
    backward = build_heatmap(b, a)
    assert forward.transposed() == backward


def test_known_cell_count():
    # 24 examples late-learned in the source run, early-learned in the target
    cats_a = [SOICategory.LLE] * 24 + [SOICategory.ACE] * 76
    cats_b = [SOICategory.ELE] * 24 + [SOICategory.ACE] * 76
    a = helpers.make_assignment("single", cats_a)
    b = helpers.make_assignment("multi", cats_b)
    m = build_heatmap(a, b)
    assert m.cell(SOICategory.LLE, SOICategory.ELE) == 24
    assert m.cell(SOICategory.ACE, SOICategory.ACE) == 76
    assert m.total == 100


def test_mismatched_sets_raise_with_difference():
    a = helpers.make_assignment("a", [SOICategory.ACE] * 3, ids=["x1", "x2", "x3"])
    b = helpers.make_assignment("b", [SOICategory.ACE] * 3, ids=["x1", "x2", "x9"])
    with pytest.raises(ExampleSetMismatch, match="x3"):
        build_heatmap(a, b)


def test_intersect_opt_in():
    a = helpers.make_assignment("a", [SOICategory.ACE, SOICategory.UNE], ids=["x1", "x2"])
    b = helpers.make_assignment("b", [SOICategory.ACE, SOICategory.ELE], ids=["x1", "x3"])
    m = build_heatmap(a, b, intersect=True)
    assert m.total == 1
    assert m.cell(SOICategory.ACE, SOICategory.ACE) == 1


def test_empty_intersection():
    a = helpers.make_assignment("a", [SOICategory.ACE], ids=["x1"])
    b = helpers.make_assignment("b", [SOICategory.ACE], ids=["y1"])
    with pytest.raises(EmptyIntersection):
        build_heatmap(a, b, intersect=True)


def test_csv_is_8x8_with_sums(tmp_path):
    rng = np.random.default_rng(4)
    a, b = helpers.random_assignment_pair(rng, 120)
    m = build_heatmap(a, b)
    path = tmp_path / "hm.csv"
    write_matrix_csv(m, path)
    rows = [line.split(",") for line in path.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 8
    assert all(len(row) == 8 for row in rows)
    assert rows[0][7] == "SUM"
    assert rows[7][0] == "SUM"
    assert rows[0][1] == "UNE"
    assert rows[0][4] == "≥2t-FRGE"
    assert int(rows[7][7]) == 120
    # data cells reproduce the matrix
    for i in range(6):
        assert [int(v) for v in rows[i + 1][1:7]] == list(m.counts[i])
        assert int(rows[i + 1][7]) == m.row_sums[i]
    assert [int(v) for v in rows[7][1:7]] == list(m.col_sums)


def test_svg_deterministic_and_annotated(tmp_path):
    cats_a = [SOICategory.UNE] * 5 + [SOICategory.ACE] * 5
    cats_b = [SOICategory.ACE] * 10
    m = build_heatmap(
        helpers.make_assignment("src", cats_a), helpers.make_assignment("tgt", cats_b)
    )
    render_heatmap(m, tmp_path / "h1.svg")
    render_heatmap(m, tmp_path / "h2.svg")
    text = (tmp_path / "h1.svg").read_text(encoding="utf-8")
    assert (tmp_path / "h1.svg").read_bytes() == (tmp_path / "h2.svg").read_bytes()
    # 36 count cells + 12 margins + 1 grand total
    assert text.count('class="hm-cell"') == 36
    assert text.count('class="hm-margin"') == 12
    assert text.count('class="hm-total"') == 1
    assert "src → tgt" in text
    assert "Σ" in text


def test_single_hot_cell_shading(tmp_path):
    cats_a = [SOICategory.ELE] * 7
    cats_b = [SOICategory.LLE] * 7
    m = build_heatmap(helpers.make_assignment("a", cats_a), helpers.make_assignment("b", cats_b))
    path = tmp_path / "hot.svg"
    render_heatmap(m, path)
    text = path.read_text(encoding="utf-8")
    # exactly one saturated cell (the max), everything else at the zero color
    assert text.count('fill="#2166ac"') == 1
    assert text.count('fill="#fcfcfd"') == 35
