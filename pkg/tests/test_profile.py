import csv
import io
import json

import pytest

from conftest import make_record, make_table
from greencoll.adapters import InterfaceKind
from greencoll.errors import EmptyRow, MalformedDocument, SchemaVersionMismatch
from greencoll.meter import MeterConfig, MockMeter
from greencoll.profile import (
    ProfileTable,
    color_for_scalar,
    emit_report,
    from_document,
    load,
    rank_row,
    save,
    to_document,
)
from greencoll.runner import RunConfig, run_suite


@pytest.fixture(scope="module")
def bench_table():
    config = RunConfig(popsizes=(100,), repetitions=4, cell_timeout_seconds=60, seed=11)
    meter = MockMeter(MeterConfig(backend="mock", mock_power_watts=10.0))
    return run_suite(meter, config, interfaces=[InterfaceKind.SET],
                     impl_ids=["hash-set", "ordered-set", "sorted-array-set"])


class TestTableInvariants:
    def test_duplicate_cell_rejected(self):
        table = make_table([("set", 100, "add", "hash-set", 1.0)])
        with pytest.raises(ValueError):
            table.add(make_record("set", 100, "add", "hash-set", 2.0))

    def test_ok_cell_rejects_negative_energy(self):
        table = ProfileTable()
        with pytest.raises(ValueError):
            table.add(make_record("set", 100, "add", "hash-set", -1.0))

    def test_ok_cell_rejects_missing_energy(self):
        table = ProfileTable()
        bad = make_record("set", 100, "add", "hash-set", 1.0)
        bad = type(bad)(**{**bad.__dict__, "energy_joules": None})
        with pytest.raises(ValueError):
            table.add(bad)

    def test_ok_cell_tolerates_sub_resolution_zero(self):
        table = ProfileTable()
        table.add(make_record("set", 100, "add", "hash-set", 0.0))
        assert table.get(InterfaceKind.SET, 100, "add", "hash-set").energy_joules == 0.0


class TestRoundTrip:
    def test_save_load_identity(self, bench_table, tmp_path):
        path = tmp_path / "t.profile"
        save(bench_table, path)
        loaded = load(path)
        assert loaded == bench_table

    def test_document_round_trip_through_json(self, bench_table):
        document = json.loads(json.dumps(to_document(bench_table)))
        assert from_document(document) == bench_table

    def test_skipped_cells_round_trip(self, tmp_path):
        table = make_table([
            ("set", 100, "add", "hash-set", 1.0),
            ("set", 100, "add", "array-set", None, None, "skipped_timeout"),
        ])
        path = tmp_path / "t.profile"
        save(table, path)
        assert load(path) == table

    def test_unknown_schema_version(self, tmp_path):
        path = tmp_path / "t.profile"
        path.write_text(json.dumps({"schema_version": 99, "metadata": {}, "cells": []}))
        with pytest.raises(SchemaVersionMismatch):
            load(path)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "t.profile"
        path.write_text('{"schema_version": 1, "metadata": {},')
        with pytest.raises(MalformedDocument):
            load(path)

    def test_malformed_cell(self):
        document = {"schema_version": 1, "metadata": {},
                    "cells": [{"interface": "set", "popsize": 10}]}
        with pytest.raises(MalformedDocument):
            from_document(document)

    def test_unknown_method_in_cell(self):
        document = {"schema_version": 1, "metadata": {}, "cells": [{
            "interface": "set", "popsize": 10, "method": "frobnicate", "impl": "x",
            "status": "ok", "energy_j": 1.0, "time_ms": 1.0, "trials": [],
        }]}
        with pytest.raises(MalformedDocument):
            from_document(document)


class TestRankRow:
    def test_worked_example(self):
        table = make_table([
            ("set", 100, "add", "a", 2.0),
            ("set", 100, "add", "b", 4.0),
            ("set", 100, "add", "c", 6.0),
        ])
        row = rank_row(table, InterfaceKind.SET, 100, "add")
        assert [e.impl_id for e in row.entries] == ["a", "b", "c"]
        assert [e.color_scalar for e in row.entries] == pytest.approx([0.0, 0.5, 1.0])
        assert [e.rank for e in row.entries] == [1, 2, 3]

    def test_single_cell(self):
        table = make_table([("set", 100, "add", "a", 3.0)])
        row = rank_row(table, InterfaceKind.SET, 100, "add")
        assert row.entries[0].color_scalar == 0.0
        assert row.entries[0].rank == 1

    def test_all_equal_energies(self):
        table = make_table([
            ("set", 100, "add", "a", 3.0, 1.0),
            ("set", 100, "add", "b", 3.0, 2.0),
        ])
        row = rank_row(table, InterfaceKind.SET, 100, "add")
        assert all(e.color_scalar == 0.0 for e in row.entries)
        assert [e.impl_id for e in row.entries] == ["a", "b"]  # time tie-break

    def test_skipped_cells_listed_separately(self):
        table = make_table([
            ("set", 100, "add", "a", 3.0),
            ("set", 100, "add", "b", None, None, "skipped_timeout"),
        ])
        row = rank_row(table, InterfaceKind.SET, 100, "add")
        assert [e.impl_id for e in row.entries] == ["a"]
        assert row.skipped == (("b", "skipped_timeout"),)

    def test_empty_row(self):
        table = make_table([("set", 100, "add", "a", None, None, "skipped_timeout")])
        with pytest.raises(EmptyRow):
            rank_row(table, InterfaceKind.SET, 100, "add")

    @pytest.mark.parametrize("factor", [0.001, 0.5, 3.0, 1e6])
    def test_scaling_preserves_ranks_and_scalars(self, factor):
        base = [("set", 100, "add", impl, e) for impl, e in
                [("a", 1.5), ("b", 7.25), ("c", 3.125), ("d", 9.0)]]
        scaled = [(i, p, m, impl, e * factor) for i, p, m, impl, e in base]
        row = rank_row(make_table(base), InterfaceKind.SET, 100, "add")
        row_scaled = rank_row(make_table(scaled), InterfaceKind.SET, 100, "add")
        assert [e.impl_id for e in row.entries] == [e.impl_id for e in row_scaled.entries]
        assert [e.rank for e in row.entries] == [e.rank for e in row_scaled.entries]
        for original, after in zip(row.entries, row_scaled.entries):
            assert after.color_scalar == pytest.approx(original.color_scalar, abs=1e-12)


class TestColorRamp:
    def test_endpoints_and_midpoint(self):
        assert color_for_scalar(0.0) == "#00c000"
        assert color_for_scalar(0.5) == "#c0c000"
        assert color_for_scalar(1.0) == "#c00000"

    def test_clamped(self):
        assert color_for_scalar(-3.0) == "#00c000"
        assert color_for_scalar(42.0) == "#c00000"


class TestReports:
    def test_csv_shape(self, bench_table):
        rendered = emit_report(bench_table, format="csv")
        rows = list(csv.reader(io.StringIO(rendered)))
        assert rows[0] == ["interface", "popsize", "method", "impl", "status",
                           "energy_j", "time_ms", "color_scalar", "rank"]
        assert len(rows) == len(bench_table.cells) + 1

    def test_csv_energy_survives_round_trip(self, bench_table):
        rendered = emit_report(bench_table, format="csv")
        rows = list(csv.DictReader(io.StringIO(rendered)))
        key = ("set", 100, "add", "hash-set")
        row = next(r for r in rows if (r["interface"], int(r["popsize"]), r["method"], r["impl"]) == key)
        assert float(row["energy_j"]) == bench_table.cells[key].energy_joules

    def test_exclude_method(self, bench_table):
        rendered = emit_report(bench_table, format="csv", exclude_methods=("removeAll",))
        assert "removeAll" not in rendered
        rows = list(csv.reader(io.StringIO(rendered)))
        assert len(rows) == len(bench_table.cells) - 3 + 1

    def test_html_marks_min_green_and_skips(self):
        table = make_table([
            ("set", 100, "add", "a", 2.0),
            ("set", 100, "add", "b", 4.0),
            ("set", 100, "add", "c", None, None, "skipped_timeout"),
        ])
        html = emit_report(table, format="html")
        assert "#00c000" in html
        assert "—(timeout)" in html
        assert "src=" not in html and "href=" not in html

    def test_html_deterministic_and_timestamp_flag(self, bench_table):
        first = emit_report(bench_table, format="html", include_timestamp=False)
        second = emit_report(bench_table, format="html", include_timestamp=False)
        assert first == second
        stamped = emit_report(bench_table, format="html", include_timestamp=True)
        assert bench_table.metadata["timestamp"] in stamped
        assert bench_table.metadata["timestamp"] not in first

    def test_tty_contains_grid(self, bench_table):
        rendered = emit_report(bench_table, format="tty")
        assert "set @ popsize 100" in rendered
        assert "iterateAll" in rendered
        assert "hash-set" in rendered

    def test_unknown_format(self, bench_table):
        with pytest.raises(ValueError):
            emit_report(bench_table, format="pdf")

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            emit_report(ProfileTable(), format="csv")
