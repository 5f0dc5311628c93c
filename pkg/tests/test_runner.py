import statistics
import time

import pytest
from hypothesis import given, strategies as st

from greencoll.adapters import (
    HashSetAdapter,
    ImplDescriptor,
    InterfaceKind,
    register,
    registry,
    unregister,
)
from greencoll.errors import EmptyAfterTrim
from greencoll.meter import MeterConfig, MockMeter
from greencoll.runner import (
    STATUS_OK,
    STATUS_TIMEOUT,
    STATUS_UNSUPPORTED,
    RunConfig,
    run_cell,
    run_suite,
    trimmed_mean,
    warmup,
)

SMALL = RunConfig(popsizes=(100,), repetitions=10, trim_fraction=0.2,
                  cell_timeout_seconds=60.0, seed=7)


def fresh_mock():
    return MockMeter(MeterConfig(backend="mock", mock_power_watts=10.0))


class TestTrimmedMean:
    def test_worked_example(self):
        values = [1, 2, 3, 4, 5, 6, 7, 8, 9, 100]
        assert trimmed_mean(values, 0.2) == pytest.approx(5.5)

    def test_constant_list(self):
        assert trimmed_mean([4.2] * 7, 0.3) == pytest.approx(4.2)

    def test_trim_zero_is_plain_mean(self):
        values = [3.0, 1.5, 9.25, 0.5]
        assert trimmed_mean(values, 0.0) == pytest.approx(statistics.mean(values))

    def test_ten_values_drop_two_per_tail(self):
        values = [-1e9, -1e9, 3, 4, 5, 6, 7, 8, 1e9, 1e9]
        assert trimmed_mean(values, 0.2) == pytest.approx(5.5)

    def test_empty_input(self):
        with pytest.raises(EmptyAfterTrim):
            trimmed_mean([], 0.2)

    def test_invalid_fraction(self):
        with pytest.raises(ValueError):
            trimmed_mean([1.0], 0.5)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=40),
           st.floats(min_value=0, max_value=0.49))
    def test_bounded_and_permutation_invariant(self, values, fraction):
        result = trimmed_mean(values, fraction)
        assert min(values) - 1e-9 <= result <= max(values) + 1e-9
        assert trimmed_mean(list(reversed(values)), fraction) == pytest.approx(result)


class TestRunConfig:
    def test_defaults_follow_protocol(self):
        config = RunConfig()
        assert config.popsizes == (25000, 250000, 1000000)
        assert config.repetitions == 10
        assert config.trim_fraction == 0.2

    @pytest.mark.parametrize("kwargs", [
        {"repetitions": 0},
        {"trim_fraction": 0.5},
        {"trim_fraction": -0.1},
        {"popsizes": ()},
        {"popsizes": (0,)},
        {"cell_timeout_seconds": 0},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            RunConfig(**kwargs)


class TestRunCell:
    def test_ok_cell_shape(self):
        record = run_cell(fresh_mock(), registry(InterfaceKind.SET)[0], "add", 100, SMALL)
        assert record.status == STATUS_OK
        assert len(record.trials) == 10
        joules = [j for j, _ in record.trials]
        millis = [ms for _, ms in record.trials]
        assert min(joules) <= record.energy_joules <= max(joules)
        assert min(millis) <= record.time_millis <= max(millis)
        assert record.energy_joules > 0

    def test_mock_links_energy_to_time(self):
        record = run_cell(fresh_mock(), registry(InterfaceKind.SET)[0], "contains", 100, SMALL)
        assert record.energy_joules == pytest.approx(10.0 * record.time_millis / 1000.0, rel=1e-6)

    def test_deterministic_across_runs(self):
        descriptor = registry(InterfaceKind.MAP)[0]
        first = run_cell(fresh_mock(), descriptor, "put", 100, SMALL)
        second = run_cell(fresh_mock(), descriptor, "put", 100, SMALL)
        assert first == second

    def test_unsupported_method_skipped(self):
        descriptor = ImplDescriptor("unsup-set", InterfaceKind.SET, "partial",
                                    unsupported=frozenset({"clear"}))
        register(descriptor, HashSetAdapter)
        try:
            record = run_cell(fresh_mock(), descriptor, "clear", 100, SMALL)
        finally:
            unregister("unsup-set")
        assert record.status == STATUS_UNSUPPORTED
        assert record.trials == ()
        assert record.energy_joules is None


class SlowSetAdapter(HashSetAdapter):
    """Every dispatch stalls; populate stays fast so only cells time out."""

    delay = 0.2

    def dispatch(self, method, args=()):
        time.sleep(self.delay)
        return super().dispatch(method, args)


SLOW_DESCRIPTOR = ImplDescriptor("slow-set", InterfaceKind.SET, "deliberately slow set",
                                 notes="test-only")


@pytest.fixture
def slow_impl():
    register(SLOW_DESCRIPTOR, SlowSetAdapter)
    yield SLOW_DESCRIPTOR
    unregister(SLOW_DESCRIPTOR.id)


class TestTimeout:
    def test_slow_cell_times_out(self, slow_impl):
        config = RunConfig(popsizes=(100,), repetitions=10, cell_timeout_seconds=0.3, seed=7)
        record = run_cell(fresh_mock(), slow_impl, "contains", 100, config)
        assert record.status == STATUS_TIMEOUT
        assert record.trials == ()


class TestWarmup:
    @pytest.mark.parametrize("descriptor", registry(), ids=lambda d: d.id)
    def test_warmup_runs_clean(self, descriptor):
        warmup(descriptor, 50, seed=7)


class TestRunSuite:
    def test_matrix_shape(self):
        config = RunConfig(popsizes=(100,), repetitions=3, cell_timeout_seconds=60, seed=7)
        impls = [d.id for d in registry(InterfaceKind.SET)[:3]]
        table = run_suite(fresh_mock(), config, interfaces=[InterfaceKind.SET], impl_ids=impls)
        assert len(table.cells) == 3 * 11
        keys = set(table.cells)
        for impl in impls:
            for method in ("add", "toArray", "iterateAll"):
                assert ("set", 100, method, impl) in keys

    def test_every_cell_has_some_status(self):
        config = RunConfig(popsizes=(50,), repetitions=2, cell_timeout_seconds=60, seed=7)
        table = run_suite(fresh_mock(), config)
        expected = sum(
            {"set": 11, "list": 20, "map": 11}[d.interface.value] for d in registry()
        )
        assert len(table.cells) == expected
        assert all(r.status in (STATUS_OK, STATUS_UNSUPPORTED, STATUS_TIMEOUT)
                   for r in table.cells.values())

    def test_deterministic_rerun(self):
        config = RunConfig(popsizes=(100,), repetitions=3, cell_timeout_seconds=60, seed=7)
        kwargs = dict(interfaces=[InterfaceKind.MAP], impl_ids=["hash-map", "ordered-map"])
        first = run_suite(fresh_mock(), config, **kwargs)
        second = run_suite(fresh_mock(), config, **kwargs)
        assert first.cells == second.cells

    def test_timeout_isolated_to_offender(self, slow_impl):
        config = RunConfig(popsizes=(50,), repetitions=2, cell_timeout_seconds=0.3, seed=7)
        table = run_suite(fresh_mock(), config, interfaces=[InterfaceKind.SET])
        slow_cells = [r for r in table.cells.values() if r.impl_id == slow_impl.id]
        other_cells = [r for r in table.cells.values() if r.impl_id != slow_impl.id]
        assert slow_cells and all(r.status == STATUS_TIMEOUT for r in slow_cells)
        assert other_cells and all(r.status == STATUS_OK for r in other_cells)

    def test_on_record_fires_per_cell(self):
        config = RunConfig(popsizes=(50,), repetitions=2, cell_timeout_seconds=60, seed=7)
        seen = []
        table = run_suite(fresh_mock(), config, interfaces=[InterfaceKind.LIST],
                          impl_ids=["array-list"], on_record=seen.append)
        assert len(seen) == len(table.cells) == 20

    def test_unknown_impl_rejected(self):
        config = RunConfig(popsizes=(50,), repetitions=2, seed=7)
        with pytest.raises(ValueError):
            run_suite(fresh_mock(), config, impl_ids=["no-such-impl"])


class TestCpuPinning:
    def test_rapl_suite_pins_and_restores(self, tmp_path, monkeypatch):
        import os

        from test_meter import write_zone
        from greencoll.meter import MeterConfig, open_meter

        if not hasattr(os, "sched_getaffinity"):
            pytest.skip("platform has no CPU affinity control")
        write_zone(tmp_path, "intel-rapl:0", "package-0", 12345)
        meter = open_meter(MeterConfig(backend="rapl"), powercap_root=tmp_path)
        original = os.sched_getaffinity(0)
        seen = set()

        config = RunConfig(popsizes=(50,), repetitions=2, cell_timeout_seconds=60,
                           seed=7, inter_trial_sleep_seconds=0.0)
        run_suite(meter, config, interfaces=[InterfaceKind.SET], impl_ids=["hash-set"],
                  on_record=lambda r: seen.update(os.sched_getaffinity(0)))
        assert len(seen) == 1  # suite ran pinned to a single CPU
        assert os.sched_getaffinity(0) == original
