"""Benchmark protocol: warm-up, repeated trials, trimming, timeout discard.

Measurement is strictly single-threaded: one cell at a time against one
meter handle. Running cells in parallel would corrupt the shared hardware
counters, so no parallel mode exists. Timeouts are cooperative: the wall
clock is checked between trials and before every dispatched operation, so
one cell that misbehaves is discarded without taking the suite down.

Mock meters are switched to a deterministic virtual clock driven by a fixed
per-operation cost model, which makes a whole suite run reproduce
bit-for-bit for a given seed. Hardware meters measure real time and get a
short quiescence sleep between trials.
"""

from __future__ import annotations

import os
import platform
import sys
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Iterable

from .adapters import (
    ImplDescriptor,
    InterfaceKind,
    MethodId,
    ROSTERS,
    construct,
    registry,
)
from .errors import CellTimeout, EmptyAfterTrim, Unsupported
from .meter import Meter, MockMeter, RAPL_BACKEND
from .workloads import Corpus, build_corpus, execute_workload, populate_adapter, workload_for

DEFAULT_SEED = 0xC0FFEE
DEFAULT_POPSIZES = (25000, 250000, 1000000)

STATUS_OK = "ok"
STATUS_UNSUPPORTED = "skipped_unsupported"
STATUS_TIMEOUT = "skipped_timeout"
STATUSES = (STATUS_OK, STATUS_UNSUPPORTED, STATUS_TIMEOUT)


@dataclass(frozen=True)
class RunConfig:
    popsizes: tuple[int, ...] = DEFAULT_POPSIZES
    repetitions: int = 10
    trim_fraction: float = 0.2
    warmup: bool = True
    cell_timeout_seconds: float = 300.0
    seed: int = DEFAULT_SEED
    inter_trial_sleep_seconds: float = 0.1

    def __post_init__(self):
        if not self.popsizes or any(p <= 0 for p in self.popsizes):
            raise ValueError("popsizes must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not 0 <= self.trim_fraction < 0.5:
            raise ValueError("trim_fraction must be in [0, 0.5)")
        if self.cell_timeout_seconds <= 0:
            raise ValueError("cell_timeout_seconds must be positive")
        survivors = self.repetitions - 2 * int(self.repetitions * self.trim_fraction)
        if survivors < 1:
            raise ValueError("no trial would survive trimming")


@dataclass(frozen=True)
class MeasurementRecord:
    """One profile-table cell: all trials plus the trimmed means."""

    impl_id: str
    method: MethodId
    popsize: int
    trials: tuple[tuple[float, float], ...]
    energy_joules: float | None
    time_millis: float | None
    status: str


def trimmed_mean(values: Iterable[float], trim_fraction: float) -> float:
    """Mean after dropping floor(n*f) smallest and largest observations."""
    if not 0 <= trim_fraction < 0.5:
        raise ValueError("trim_fraction must be in [0, 0.5)")
    ordered = sorted(values)
    if not ordered:
        raise EmptyAfterTrim("no values to trim")
    drop = int(len(ordered) * trim_fraction)
    kept = ordered[drop:len(ordered) - drop] if drop else ordered
    if not kept:
        raise EmptyAfterTrim(f"trimming {drop} per tail leaves nothing of {len(ordered)}")
    return sum(kept) / len(kept)


class _Deadline:
    """Cooperative wall-clock budget for one cell (warm-up included)."""

    __slots__ = ("expires_at",)

    def __init__(self, seconds: float):
        self.expires_at = time.monotonic() + seconds

    def check(self) -> None:
        if time.monotonic() > self.expires_at:
            raise CellTimeout("cell exceeded its time budget")


def _virtual_cost_hook(meter: Meter) -> Callable[[int], None] | None:
    """Deterministic virtual time for mock meters, real time otherwise."""
    if isinstance(meter, MockMeter):
        clock = meter.virtual_clock
        if clock is None:
            clock = meter.attach_virtual_clock()
        return clock.advance
    return None


@contextmanager
def _pinned_cpu(enabled: bool):
    """Pin the measuring thread to one CPU where the platform allows it."""
    if not enabled or not hasattr(os, "sched_setaffinity"):
        yield
        return
    original = os.sched_getaffinity(0)
    os.sched_setaffinity(0, {min(original)})
    try:
        yield
    finally:
        os.sched_setaffinity(0, original)


_WARMUP_ACTIONS = {
    InterfaceKind.SET: (("contains", True), ("add", True), ("remove", True), ("iterator", False)),
    InterfaceKind.LIST: (("contains", True), ("get", None), ("iterator", False)),
    InterfaceKind.MAP: (("containsKey", True), ("get", True), ("keySet", False)),
}


def warmup(descriptor: ImplDescriptor, popsize: int, corpus: Corpus | None = None,
           seed: int = DEFAULT_SEED, deadline: _Deadline | None = None) -> None:
    """Unmeasured stabilisation pass: construct, populate, poke a little."""
    if corpus is None:
        corpus = build_corpus(popsize, seed)
    adapter = construct(descriptor)
    populate_adapter(adapter, corpus)
    if deadline is not None:
        deadline.check()
    probe = corpus.population[0]
    for method, wants_probe in _WARMUP_ACTIONS[descriptor.interface]:
        if method in descriptor.unsupported:
            continue
        if wants_probe is None:
            args = (0,)
        elif wants_probe:
            args = (probe,)
        else:
            args = ()
        adapter.dispatch(method, args)
        if deadline is not None:
            deadline.check()


def _skip_record(descriptor: ImplDescriptor, method: MethodId, popsize: int, status: str) -> MeasurementRecord:
    return MeasurementRecord(
        impl_id=descriptor.id,
        method=method,
        popsize=popsize,
        trials=(),
        energy_joules=None,
        time_millis=None,
        status=status,
    )


def run_cell(meter: Meter, descriptor: ImplDescriptor, method: MethodId | str,
             popsize: int, config: RunConfig, corpus: Corpus | None = None) -> MeasurementRecord:
    """Measure one (implementation, method, popsize) cell.

    Every trial populates a fresh adapter (outside the measured region) and
    measures the workload execution; the energy and time series are trimmed
    independently. Timeouts and unsupported methods become skip statuses.
    """
    method_id = method if isinstance(method, MethodId) else MethodId(descriptor.interface, method)
    if method_id.name in descriptor.unsupported:
        return _skip_record(descriptor, method_id, popsize, STATUS_UNSUPPORTED)
    spec = workload_for(descriptor.interface, method_id.name)
    if corpus is None:
        corpus = build_corpus(popsize, config.seed)
    deadline = _Deadline(config.cell_timeout_seconds)
    cost_hook = _virtual_cost_hook(meter)

    trials: list[tuple[float, float]] = []
    try:
        for _ in range(config.repetitions):
            deadline.check()
            adapter = construct(descriptor)
            populate_adapter(adapter, corpus)
            deadline.check()

            joules = 0.0
            millis = 0.0

            def measured(segment):
                nonlocal joules, millis
                delta = meter.measure(segment)
                joules += delta.joules
                millis += delta.elapsed_millis

            execute_workload(adapter, spec, corpus, measured=measured,
                             cost_hook=cost_hook, checkpoint=deadline.check)
            trials.append((joules, millis))
            if meter.backend == RAPL_BACKEND and config.inter_trial_sleep_seconds > 0:
                time.sleep(config.inter_trial_sleep_seconds)
        deadline.check()  # a cell that used up its budget is not trusted
    except Unsupported:
        return _skip_record(descriptor, method_id, popsize, STATUS_UNSUPPORTED)
    except CellTimeout:
        return _skip_record(descriptor, method_id, popsize, STATUS_TIMEOUT)

    return MeasurementRecord(
        impl_id=descriptor.id,
        method=method_id,
        popsize=popsize,
        trials=tuple(trials),
        energy_joules=trimmed_mean([j for j, _ in trials], config.trim_fraction),
        time_millis=trimmed_mean([ms for _, ms in trials], config.trim_fraction),
        status=STATUS_OK,
    )


# Energy counters are machine-wide; two suites in one process would measure
# each other. The second caller fails fast instead.
_suite_guard = threading.Lock()


def run_suite(meter: Meter, config: RunConfig,
              interfaces: Iterable[InterfaceKind] | None = None,
              impl_ids: Iterable[str] | None = None,
              on_record: Callable[[MeasurementRecord], None] | None = None):
    """Run the full benchmark matrix and collect a profile table.

    ``on_record`` fires after every finished cell so callers can flush
    incrementally; a crash then loses at most the cell in flight.
    """
    from .profile import ProfileTable  # profile depends on this module's record type

    if not _suite_guard.acquire(blocking=False):
        raise RuntimeError("another benchmark suite is already running in this process")
    try:
        return _run_suite_locked(meter, config, interfaces, impl_ids, on_record, ProfileTable)
    finally:
        _suite_guard.release()


def _run_suite_locked(meter, config, interfaces, impl_ids, on_record, ProfileTable):
    kinds = list(interfaces) if interfaces is not None else list(InterfaceKind)
    wanted = set(impl_ids) if impl_ids is not None else None
    selected = [
        d for d in registry()
        if d.interface in kinds and (wanted is None or d.id in wanted)
    ]
    if not selected:
        raise ValueError("no implementations selected")
    if wanted is not None:
        missing = wanted - {d.id for d in selected}
        if missing:
            raise ValueError(f"unknown implementation ids: {', '.join(sorted(missing))}")

    _virtual_cost_hook(meter)  # mock meters go deterministic before any read
    corpora = {p: build_corpus(p, config.seed) for p in config.popsizes}

    table = ProfileTable(
        schema_version=1,
        metadata={
            "host": f"{platform.platform()} / Python {sys.version.split()[0]}",
            "meter_backend": meter.backend,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "seed": config.seed,
            "config": {
                "popsizes": list(config.popsizes),
                "repetitions": config.repetitions,
                "trim_fraction": config.trim_fraction,
                "warmup": config.warmup,
                "cell_timeout_seconds": config.cell_timeout_seconds,
            },
        },
    )

    with _pinned_cpu(meter.backend == RAPL_BACKEND):
        for kind in kinds:
            impls = [d for d in selected if d.interface == kind]
            for popsize in config.popsizes:
                corpus = corpora[popsize]
                for descriptor in impls:
                    warm_failure = None
                    if config.warmup:
                        try:
                            warmup(descriptor, popsize, corpus=corpus,
                                   deadline=_Deadline(config.cell_timeout_seconds))
                        except Unsupported:
                            warm_failure = STATUS_UNSUPPORTED
                        except CellTimeout:
                            warm_failure = STATUS_TIMEOUT
                    for name in ROSTERS[kind]:
                        if warm_failure is not None:
                            record = _skip_record(descriptor, MethodId(kind, name), popsize, warm_failure)
                        else:
                            record = run_cell(meter, descriptor, name, popsize, config, corpus=corpus)
                        table.add(record)
                        if on_record is not None:
                            on_record(record)
    return table
