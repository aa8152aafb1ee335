"""Record validation, JSONL parsing, and run assembly."""
from __future__ import annotations

import json

import pytest

from soi_lab import (
    PredictionRecord,
    correctness_sequence,
    ingest_run,
    load_runs,
    parse_record,
    read_records,
    serialize_run,
    write_run,
)
from soi_lab.errors import (
    DuplicateCell,
    EmptyRun,
    FieldOutOfRange,
    InconsistentTrueLabel,
    IoFailure,
    MalformedLine,
    MissingCell,
    MissingField,
    UnknownExample,
)


def rec(**overrides) -> PredictionRecord:
    base = dict(run_id="r", example_id="e1", epoch=1, split="train",
                true_label=0, pred_label=0, p_pred=0.9)
    base.update(overrides)
    return PredictionRecord(**base)


class TestRecordValidation:
    def test_correct_flag_tracks_labels(self):
        assert rec(pred_label=0).correct
        assert not rec(pred_label=2).correct

    def test_epoch_must_be_positive(self):
        with pytest.raises(FieldOutOfRange):
            rec(epoch=0)

    def test_bool_epoch_rejected(self):
        # bool passes isinstance(int) checks unless explicitly excluded
        with pytest.raises(MalformedLine):
            rec(epoch=True)

    def test_labels_must_be_non_negative_ints(self):
        with pytest.raises(FieldOutOfRange):
            rec(true_label=-1)
        with pytest.raises(MalformedLine):
            rec(pred_label="2")

    def test_probability_range(self):
        with pytest.raises(FieldOutOfRange):
            rec(p_pred=1.5)
        with pytest.raises(FieldOutOfRange):
            rec(p_pred=-0.1)

    def test_p_true_cannot_exceed_p_pred(self):
        rec(p_pred=0.6, p_true=0.6)
        with pytest.raises(FieldOutOfRange):
            rec(p_pred=0.6, p_true=0.61)

    def test_split_whitelist(self):
        for split in ("train", "eval", "test"):
            rec(split=split)
        with pytest.raises(FieldOutOfRange):
            rec(split="validation")

    def test_empty_ids_rejected(self):
        with pytest.raises(MalformedLine):
            rec(run_id="")
        with pytest.raises(MalformedLine):
            rec(example_id="")


class TestParsing:
    def test_round_trip(self):
        original = rec(p_true=0.4, p_pred=0.9)
        assert parse_record(original.to_json()) == original

    def test_json_key_order_is_canonical(self):
        keys = list(json.loads(rec(p_true=0.2).to_json()))
        assert keys == ["run_id", "example_id", "epoch", "split",
                        "true_label", "pred_label", "p_pred", "p_true"]

    def test_run_alias_accepted(self):
        line = json.dumps(dict(run="r2", example_id="e", epoch=3, split="eval",
                               true_label=1, pred_label=1, p_pred=0.5))
        assert parse_record(line).run_id == "r2"

    def test_unknown_keys_ignored(self):
        line = json.dumps(dict(run_id="r", example_id="e", epoch=1, split="test",
                               true_label=0, pred_label=1, p_pred=0.5, extra="x"))
        assert parse_record(line).pred_label == 1

    def test_missing_fields_are_listed(self):
        with pytest.raises(MissingField, match="epoch"):
            parse_record(json.dumps(dict(run_id="r", example_id="e", split="train",
                                         true_label=0, pred_label=0, p_pred=0.5)))

    def test_invalid_json(self):
        with pytest.raises(MalformedLine):
            parse_record("{not json")

    def test_non_object_json(self):
        with pytest.raises(MalformedLine):
            parse_record("[1, 2]")

    def test_null_p_true_treated_as_absent(self):
        line = json.dumps(dict(run_id="r", example_id="e", epoch=1, split="train",
                               true_label=0, pred_label=0, p_pred=0.5, p_true=None))
        assert parse_record(line).p_true is None


class TestFileReading:
    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text(rec().to_json() + "\n\n  \n" + rec(epoch=2).to_json() + "\n")
        assert len(list(read_records(path))) == 2

    def test_errors_carry_path_and_line_number(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text(rec().to_json() + "\n{broken\n")
        with pytest.raises(MalformedLine, match=r"log\.jsonl:2:"):
            list(read_records(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailure):
            list(read_records(tmp_path / "absent.jsonl"))


def records_for(run_id: str, sequences: dict[str, list[int]]):
    out = []
    for example_id, bits in sequences.items():
        for epoch, bit in enumerate(bits, start=1):
            out.append(PredictionRecord(
                run_id=run_id, example_id=example_id, epoch=epoch, split="train",
                true_label=1, pred_label=1 if bit else 0, p_pred=0.8, p_true=0.6,
            ))
    return out


class TestIngest:
    def test_assembles_sorted_dense_matrix(self):
        recs = records_for("r", {"b": [1, 0, 1], "a": [0, 0, 1]})
        dynamics = ingest_run(recs, "r")
        assert dynamics.example_ids == ("a", "b")
        assert dynamics.num_epochs == 3
        assert dynamics.examples["b"].correctness == (1, 0, 1)
        assert dynamics.examples["a"].p_true_series == (0.6, 0.6, 0.6)

    def test_other_runs_filtered_out(self):
        recs = records_for("keep", {"a": [1]}) + records_for("drop", {"a": [0, 1]})
        dynamics = ingest_run(recs, "keep")
        assert dynamics.num_epochs == 1
        assert len(dynamics) == 1

    def test_order_independent(self):
        recs = records_for("r", {"a": [0, 1, 1], "b": [1, 1, 0]})
        shuffled = list(reversed(recs))
        assert ingest_run(shuffled, "r") == ingest_run(recs, "r")

    def test_duplicate_cell(self):
        recs = records_for("r", {"a": [1]}) * 2
        with pytest.raises(DuplicateCell):
            ingest_run(recs, "r")

    def test_missing_epoch(self):
        recs = records_for("r", {"a": [1, 1], "b": [1]})
        with pytest.raises(MissingCell, match="'b'"):
            ingest_run(recs, "r")

    def test_inconsistent_true_label(self):
        good = records_for("r", {"a": [1, 1]})
        clash = good[1]
        recs = [good[0], PredictionRecord(
            run_id="r", example_id="a", epoch=clash.epoch, split="train",
            true_label=2, pred_label=2, p_pred=0.8,
        )]
        with pytest.raises(InconsistentTrueLabel):
            ingest_run(recs, "r")

    def test_empty_run(self):
        with pytest.raises(EmptyRun):
            ingest_run(records_for("other", {"a": [1]}), "r")

    def test_partial_p_true_drops_series(self):
        full = records_for("r", {"a": [1, 1]})
        mixed = [full[0], PredictionRecord(
            run_id="r", example_id="a", epoch=2, split="train",
            true_label=1, pred_label=1, p_pred=0.8,
        )]
        assert ingest_run(mixed, "r").examples["a"].p_true_series is None

    def test_correctness_sequence_lookup(self):
        dynamics = ingest_run(records_for("r", {"a": [1, 0]}), "r")
        assert correctness_sequence(dynamics, "a") == (1, 0)
        with pytest.raises(UnknownExample):
            correctness_sequence(dynamics, "zz")


class TestSerialization:
    def test_serialize_ingest_round_trip(self):
        dynamics = ingest_run(records_for("r", {"a": [1, 0, 1], "b": [0, 0, 1]}), "r")
        again = ingest_run(
            [parse_record(line) for line in serialize_run(dynamics).splitlines()], "r"
        )
        assert again == dynamics

    def test_write_and_load_runs(self, tmp_path):
        dynamics = ingest_run(records_for("r", {"a": [1, 1]}), "r")
        path = tmp_path / "out" / "dynamics.jsonl"
        write_run(dynamics, path)
        loaded = load_runs(path)
        assert list(loaded) == ["r"]
        assert loaded["r"] == dynamics

    def test_load_runs_groups_by_run(self, tmp_path):
        lines = [r.to_json() for r in
                 records_for("r1", {"a": [1]}) + records_for("r2", {"a": [0, 1]})]
        path = tmp_path / "two.jsonl"
        path.write_text("\n".join(lines) + "\n")
        loaded = load_runs(path)
        assert sorted(loaded) == ["r1", "r2"]
        assert loaded["r2"].num_epochs == 2

    def test_load_runs_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("\n")
        with pytest.raises(EmptyRun):
            load_runs(path)
