"""Event counting, the six-way decision tree, and assignment CSV round trips."""
from __future__ import annotations

import numpy as np
import pytest

import helpers
from soi_lab import (
    CATEGORY_ORDER,
    PredictionRecord,
    SOICategory,
    classify,
    classify_run,
    count_events,
    default_cutoff,
    ingest_run,
    read_assignment_csv,
    write_assignment_csv,
)
from soi_lab.errors import CutoffOutOfRange, EmptySequence, MalformedAssignment


class TestEventCounting:
    def test_1_to_0_steps_are_forgetting(self):
        assert count_events([1, 0, 1, 0]).forgetting == 2

    def test_relearning_before_first_forgetting_is_not_recollection(self):
        # the leading 0->1 at epochs 1->2 is initial learning
        events = count_events([0, 1, 0, 1])
        assert (events.forgetting, events.recollecting) == (1, 1)

    def test_landmarks(self):
        events = count_events([0, 0, 1, 1, 0])
        assert events.first_correct_epoch == 3
        assert events.last_correct is False
        assert count_events([0, 0]).first_correct_epoch is None

    def test_single_epoch(self):
        assert count_events([1]) == count_events((1,))
        assert count_events([0]).forgetting == 0

    def test_alternating_sequence(self):
        events = count_events([1, 0, 1, 0, 1, 0, 1, 0, 1, 0])
        assert (events.forgetting, events.recollecting) == (5, 4)

    def test_all_ones(self):
        events = count_events([1] * 10)
        assert (events.forgetting, events.recollecting) == (0, 0)
        assert events.first_correct_epoch == 1
        assert events.last_correct is True

    def test_matches_naive_scan_on_random_sequences(self):
        rng = np.random.default_rng(7)
        for _ in range(3_000):
            seq = list(rng.integers(0, 2, size=int(rng.integers(1, 25))))
            events = count_events(seq)
            assert (events.forgetting, events.recollecting) == helpers.naive_events(seq)

    def test_empty_sequence(self):
        with pytest.raises(EmptySequence):
            count_events([])

    def test_non_binary_rejected(self):
        with pytest.raises(MalformedAssignment):
            count_events([0, 2])


class TestClassify:
    def test_exhaustive_against_oracle_with_all_cutoffs(self):
        # denser than the acceptance sweep: every cutoff, lengths 1..9
        for seq in helpers.all_binary_sequences(9):
            for cutoff in range(1, len(seq) + 1):
                got = classify(seq, late_cutoff=cutoff)
                assert got is helpers.naive_classify(seq, cutoff), (seq, cutoff)

    def test_cutoff_boundary_is_inclusive(self):
        # first correct exactly at the cutoff is still early
        assert classify([0, 0, 1, 1, 1, 1], late_cutoff=3) is SOICategory.ELE
        assert classify([0, 0, 0, 1, 1, 1], late_cutoff=3) is SOICategory.LLE

    def test_forgotten_for_good_is_unlearned(self):
        assert classify([1, 1, 0, 0]) is SOICategory.UNE

    def test_never_correct_is_unlearned(self):
        assert classify([0, 0, 0, 0]) is SOICategory.UNE

    def test_all_ones_beats_early_learner(self):
        assert classify([1, 1, 1, 1]) is SOICategory.ACE

    def test_default_cutoff_half_run(self):
        assert default_cutoff(10) == 5
        assert default_cutoff(9) == 4
        assert default_cutoff(1) == 1  # floor would give 0, clamp keeps it valid
        with pytest.raises(CutoffOutOfRange):
            default_cutoff(0)

    def test_cutoff_out_of_range(self):
        with pytest.raises(CutoffOutOfRange):
            classify([1, 0], late_cutoff=3)
        with pytest.raises(CutoffOutOfRange):
            classify([1, 0], late_cutoff=0)

    def test_display_labels(self):
        assert SOICategory.FRGE_GE2T.display_label == "≥2t-FRGE"
        assert SOICategory.FRGE_1T.display_label == "1t-FRGE"
        assert str(SOICategory.UNE) == "UNE"


def run_from(sequences: dict[str, list[int]]):
    records = []
    for example_id, bits in sequences.items():
        for epoch, bit in enumerate(bits, start=1):
            records.append(PredictionRecord(
                run_id="r", example_id=example_id, epoch=epoch, split="train",
                true_label=1, pred_label=bit, p_pred=0.9,
            ))
    return ingest_run(records, "r")


class TestClassifyRun:
    def test_entries_follow_id_order_and_census_sums(self):
        dynamics = run_from({
            "c": [1, 1, 1, 1], "a": [0, 0, 0, 0], "b": [1, 0, 1, 1], "d": [0, 0, 0, 1],
        })
        assignment = classify_run(dynamics)
        assert assignment.example_ids == ("a", "b", "c", "d")
        assert assignment.late_cutoff == 2
        census = assignment.census()
        assert sum(census.values()) == 4
        assert list(census) == list(CATEGORY_ORDER)
        assert assignment.category_of("b") is SOICategory.FRGE_1T
        assert assignment.category_of("d") is SOICategory.LLE
        assert assignment.members(SOICategory.ACE) == ("c",)

    def test_entry_evidence_matches_events(self):
        assignment = classify_run(run_from({"a": [1, 0, 1, 0]}))
        entry = assignment.entries[0]
        assert (entry.forgetting, entry.recollecting) == (2, 1)
        assert entry.first_correct_epoch == 1
        assert entry.last_correct is False

    def test_unknown_example_lookup(self):
        assignment = classify_run(run_from({"a": [1, 1]}))
        with pytest.raises(MalformedAssignment):
            assignment.category_of("missing")


class TestAssignmentCsv:
    def test_round_trip_preserves_entries(self, tmp_path):
        assignment = classify_run(run_from({
            "a": [1, 1, 1, 1], "b": [0, 0, 0, 0], "c": [1, 0, 1, 1], "d": [0, 1, 1, 1],
        }))
        path = tmp_path / "soi.csv"
        write_assignment_csv(assignment, path)
        loaded = read_assignment_csv(path, run_id="r")
        assert loaded.entries == assignment.entries
        assert loaded.run_id == "r"

    def test_never_correct_round_trips_empty_field(self, tmp_path):
        assignment = classify_run(run_from({"a": [0, 0]}))
        path = tmp_path / "soi.csv"
        write_assignment_csv(assignment, path)
        text = path.read_text()
        assert "a,UNE,0,0,,false" in text
        assert read_assignment_csv(path).entries[0].first_correct_epoch is None

    def test_header_is_stable(self, tmp_path):
        path = tmp_path / "soi.csv"
        write_assignment_csv(classify_run(run_from({"a": [1]})), path)
        header = path.read_text().splitlines()[0]
        assert header == "example_id,category,forgetting,recollecting,first_correct_epoch,last_correct"

    @pytest.mark.parametrize("row", [
        "x,NOT_A_CATEGORY,0,0,1,true",
        "x,ACE,zero,0,1,true",
        "x,ACE,0,0,1,yes",
        "x,ACE,0,0,0,true",
        ",ACE,0,0,1,true",
        "x,ACE,0,0,1",
    ])
    def test_malformed_rows(self, tmp_path, row):
        path = tmp_path / "bad.csv"
        path.write_text(
            "example_id,category,forgetting,recollecting,first_correct_epoch,last_correct\n"
            + row + "\n"
        )
        with pytest.raises(MalformedAssignment):
            read_assignment_csv(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text(
            "example_id,category,forgetting,recollecting,first_correct_epoch,last_correct\n"
            "x,ACE,0,0,1,true\nx,UNE,0,0,,false\n"
        )
        with pytest.raises(MalformedAssignment):
            read_assignment_csv(path)

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "hdr.csv"
        path.write_text("id,cat\nx,ACE\n")
        with pytest.raises(MalformedAssignment):
            read_assignment_csv(path)

    def test_empty_table_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(
            "example_id,category,forgetting,recollecting,first_correct_epoch,last_correct\n"
        )
        with pytest.raises(MalformedAssignment):
            read_assignment_csv(path)
