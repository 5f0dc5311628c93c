import json
import sys

import pytest

from greencoll import cli, profile
from greencoll.adapters import ImplDescriptor, InterfaceKind, register, unregister
from greencoll.runner import STATUS_OK
from test_runner import SlowSetAdapter

BENCH_ARGS = ["bench", "--meter", "mock", "--popsize", "120", "--reps", "3",
              "--interfaces", "set", "--impls", "hash-set,ordered-set"]


@pytest.fixture
def table_path(tmp_path, fixture_table):
    path = tmp_path / "fixture.profile"
    profile.save(fixture_table, path)
    return path


@pytest.fixture
def usage_path(tmp_path):
    document = {
        "schema_version": 1,
        "sites": [{
            "site_id": "registry-map",
            "interface": "map",
            "current_impl": "tree-map",
            "methods": ["containsKey", "get", "put", "values"],
            "workload_size": 8000,
        }],
    }
    path = tmp_path / "usage.json"
    path.write_text(json.dumps(document))
    return path


class TestBench:
    def test_writes_valid_table_and_log(self, tmp_path, capsys):
        out = tmp_path / "t.profile"
        code = cli.main(BENCH_ARGS + ["--out", str(out)])
        assert code == 0
        table = profile.load(out)
        assert len(table.cells) == 2 * 11
        assert all(r.status == STATUS_OK for r in table.cells.values())
        log_lines = (tmp_path / "t.profile.log.jsonl").read_text().splitlines()
        assert len(log_lines) == 22
        assert json.loads(log_lines[0])["interface"] == "set"

    def test_unknown_impl_makes_no_files(self, tmp_path, capsys):
        out = tmp_path / "t.profile"
        code = cli.main(["bench", "--meter", "mock", "--popsize", "50",
                         "--impls", "no-such-impl", "--out", str(out)])
        assert code == 1
        assert not out.exists()
        assert not (tmp_path / "t.profile.log.jsonl").exists()
        assert "no-such-impl" in capsys.readouterr().err

    def test_rapl_unavailable_is_fatal(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setattr("greencoll.meter.DEFAULT_POWERCAP_ROOT", str(tmp_path / "powercap"))
        monkeypatch.delenv("GREENCOLL_METER", raising=False)
        out = tmp_path / "t.profile"
        code = cli.main(["bench", "--meter", "rapl", "--popsize", "50", "--out", str(out)])
        assert code == 1
        assert not out.exists()
        assert "powercap" in capsys.readouterr().err

    def test_timeout_gives_partial_exit(self, tmp_path):
        descriptor = ImplDescriptor("cli-slow-set", InterfaceKind.SET, "slow", notes="test-only")
        register(descriptor, SlowSetAdapter)
        try:
            out = tmp_path / "t.profile"
            code = cli.main(["bench", "--meter", "mock", "--popsize", "50", "--reps", "2",
                             "--interfaces", "set", "--timeout", "0.3", "--out", str(out)])
        finally:
            unregister("cli-slow-set")
        assert code == 3
        table = profile.load(out)
        statuses = {r.impl_id: r.status for r in table.cells.values()}
        assert statuses["cli-slow-set"] == "skipped_timeout"
        assert statuses["hash-set"] == STATUS_OK


class TestReport:
    def test_tty_to_stdout(self, table_path, capsys):
        assert cli.main(["report", str(table_path)]) == 0
        assert "map @ popsize 25000" in capsys.readouterr().out

    def test_csv_to_file_with_exclusion(self, table_path, tmp_path):
        out = tmp_path / "report.csv"
        code = cli.main(["report", str(table_path), "--format", "csv",
                         "--exclude-method", "values", "--out", str(out)])
        assert code == 0
        content = out.read_text()
        assert "values" not in content
        assert content.startswith("interface,popsize,method,impl,status")

    def test_html(self, table_path, tmp_path):
        out = tmp_path / "report.html"
        assert cli.main(["report", str(table_path), "--format", "html",
                         "--no-timestamp", "--out", str(out)]) == 0
        assert "<!DOCTYPE html>" in out.read_text()

    def test_malformed_table_fatal(self, tmp_path, capsys):
        bad = tmp_path / "bad.profile"
        bad.write_text("{broken")
        assert cli.main(["report", str(bad)]) == 1


class TestAdvise:
    def test_recommends_and_writes_document(self, table_path, usage_path, tmp_path, capsys):
        out = tmp_path / "recs.json"
        code = cli.main(["advise", str(table_path), str(usage_path), "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "recommended: hash-map" in printed
        document = json.loads(out.read_text())
        assert document["recommendations"][0]["chosen_impl"] == "hash-map"
        assert document["failures"] == []

    def test_absent_interface_partial_exit(self, table_path, tmp_path, capsys):
        usage = {
            "schema_version": 1,
            "sites": [{"site_id": "s1", "interface": "set", "current_impl": "hash-set",
                       "methods": ["add"], "workload_size": 100}],
        }
        usage_file = tmp_path / "usage.json"
        usage_file.write_text(json.dumps(usage))
        code = cli.main(["advise", str(table_path), str(usage_file)])
        assert code == 3
        assert "no recommendation" in capsys.readouterr().out

    def test_weighted_without_counts_warns(self, table_path, usage_path, capsys):
        code = cli.main(["advise", str(table_path), str(usage_path), "--weighted"])
        assert code == 0
        assert "uniform" in capsys.readouterr().err


class TestMeasure:
    def test_measures_child(self, capsys):
        code = cli.main(["measure", "--meter", "mock", "--reps", "3", "--",
                         sys.executable, "-c", "pass"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("energy:")
        assert "time:" in out

    def test_sleeping_child_at_ten_watts(self, capsys):
        code = cli.main(["measure", "--meter", "mock", "--reps", "3", "--",
                         "sleep", "0.1"])
        assert code == 0
        out = capsys.readouterr().out
        joules = float(out.splitlines()[0].split()[1])
        assert 0.99 <= joules <= 3.0  # 10 W for >= 100 ms plus process startup

    def test_baseline_prints_improvement(self, capsys):
        code = cli.main(["measure", "--meter", "mock", "--reps", "3",
                         "--baseline", "1000000.0", "--",
                         sys.executable, "-c", "pass"])
        assert code == 0
        out = capsys.readouterr().out
        assert "improvement:" in out
        percent = float(out.split("improvement:")[1].strip().rstrip("%"))
        assert 99.9 <= percent <= 100.0

    def test_failing_child_retried_then_fatal(self, capsys):
        code = cli.main(["measure", "--meter", "mock", "--reps", "2", "--",
                         sys.executable, "-c", "import sys; sys.exit(1)"])
        assert code == 1
        err = capsys.readouterr().err
        assert "rerunning" in err
        assert "failed twice" in err

    def test_missing_command(self, capsys):
        assert cli.main(["measure", "--meter", "mock"]) == 1

    def test_unrunnable_command(self, capsys):
        assert cli.main(["measure", "--meter", "mock", "--", "/no/such/bin-xyz"]) == 1


class TestRegistryAndWorkloads:
    def test_registry_json(self, capsys):
        assert cli.main(["registry", "--json"]) == 0
        document = json.loads(capsys.readouterr().out)
        per_interface = {}
        for impl in document["implementations"]:
            per_interface.setdefault(impl["interface"], []).append(impl["id"])
        assert all(len(ids) >= 3 for ids in per_interface.values())

    def test_registry_human(self, capsys):
        assert cli.main(["registry"]) == 0
        assert "hash-set" in capsys.readouterr().out

    def test_workloads_describe(self, capsys):
        assert cli.main(["workloads", "--describe"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert len(document["workloads"]) == 42

    def test_workloads_human(self, capsys):
        assert cli.main(["workloads"]) == 0
        out = capsys.readouterr().out
        assert "iterateAll" in out
        assert "(reconstructed)" in out


class TestHelp:
    @pytest.mark.parametrize("subcommand,flags", [
        ("bench", ["--popsize", "--reps", "--trim", "--timeout", "--seed",
                   "--interfaces", "--impls", "--out", "--meter"]),
        ("report", ["--format", "--exclude-method", "--out"]),
        ("advise", ["--weighted", "--out"]),
        ("measure", ["--reps", "--trim", "--baseline", "--meter"]),
        ("registry", ["--json"]),
        ("workloads", ["--describe"]),
    ])
    def test_flags_documented(self, subcommand, flags, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main([subcommand, "--help"])
        assert excinfo.value.code == 0
        text = capsys.readouterr().out
        for flag in flags:
            assert flag in text
