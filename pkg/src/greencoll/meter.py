"""Energy and elapsed-time measurement around arbitrary actions.

Two backends share one interface: ``rapl`` reads the Linux powercap
cumulative energy counters, ``mock`` simulates a constant-power machine so
the whole pipeline can run deterministically without hardware.

A meter handle is single-owner: reads and the measured action must happen
on the owning thread. Do not open more than one hardware meter per process;
the physical counters are shared machine-wide.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .errors import BackendUnavailable, DomainMismatch, ReadFailed

MOCK_BACKEND = "mock"
RAPL_BACKEND = "rapl"
METER_ENV_VAR = "GREENCOLL_METER"

DEFAULT_POWERCAP_ROOT = "/sys/class/powercap"

# Mock counters use a range far beyond any realistic session so single-wrap
# correction is exercised only by synthetic samples.
MOCK_RANGE_MICROJOULES = 2**62


@dataclass(frozen=True)
class MeterConfig:
    """Backend selection plus the energy domains summed into one figure."""

    backend: str = MOCK_BACKEND
    domains: tuple[str, ...] = ("package",)
    mock_power_watts: float = 10.0

    def __post_init__(self):
        if self.backend not in (MOCK_BACKEND, RAPL_BACKEND):
            raise ValueError(f"unknown meter backend {self.backend!r}")
        if not self.domains:
            raise ValueError("at least one energy domain must be selected")
        if self.backend == MOCK_BACKEND:
            if not math.isfinite(self.mock_power_watts) or self.mock_power_watts <= 0:
                raise ValueError("mock_power_watts must be finite and positive")


@dataclass(frozen=True)
class EnergySample:
    """One raw cumulative counter reading for a single domain."""

    domain_id: str
    cumulative_microjoules: int
    max_range_microjoules: int
    timestamp_nanos: int

    def __post_init__(self):
        if self.max_range_microjoules <= 0:
            raise ValueError("max_range_microjoules must be positive")
        if not 0 <= self.cumulative_microjoules < self.max_range_microjoules:
            raise ValueError("cumulative counter outside [0, max_range)")


@dataclass(frozen=True)
class EnergyDelta:
    """Wraparound-corrected energy and elapsed time for one measured action."""

    joules: float
    elapsed_millis: float

    def __post_init__(self):
        for name, value in (("joules", self.joules), ("elapsed_millis", self.elapsed_millis)):
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be non-negative and finite")


def delta(before: EnergySample, after: EnergySample) -> int:
    """Microjoules elapsed between two samples of one domain.

    Corrects a single counter wraparound; more than one wrap within a
    measurement is undetectable and accepted (counter ranges allow minutes,
    measured cells are seconds-scale).
    """
    if before.domain_id != after.domain_id:
        raise DomainMismatch(f"{before.domain_id!r} vs {after.domain_id!r}")
    if before.max_range_microjoules != after.max_range_microjoules:
        raise DomainMismatch(f"counter range changed for {before.domain_id!r}")
    return (after.cumulative_microjoules - before.cumulative_microjoules) % before.max_range_microjoules


class Meter:
    """Common behaviour for energy meter backends."""

    backend: str

    def __init__(self, config: MeterConfig):
        self.config = config

    def read_counters(self) -> list[EnergySample]:
        raise NotImplementedError

    def measure(self, action: Callable[[], object]) -> EnergyDelta:
        """Run ``action`` once and report energy/time spent around it.

        Action failures propagate and the measurement is discarded.
        """
        before = self.read_counters()
        action()
        after = self.read_counters()
        microjoules = sum(delta(b, a) for b, a in zip(before, after))
        elapsed_ns = after[0].timestamp_nanos - before[0].timestamp_nanos
        return EnergyDelta(joules=microjoules / 1e6, elapsed_millis=elapsed_ns / 1e6)


class VirtualClock:
    """Deterministic monotonic clock advanced explicitly by its driver.

    Attached to a mock meter it makes measured values a pure function of the
    accounted work, which is what lets benchmark runs reproduce bit-for-bit.
    """

    def __init__(self, start_nanos: int = 0):
        self.nanos = start_nanos

    def advance(self, nanos: int) -> None:
        if nanos < 0:
            raise ValueError("virtual clock cannot move backwards")
        self.nanos += nanos

    def __call__(self) -> int:
        return self.nanos


class MockMeter(Meter):
    """Constant-power simulated meter: energy = configured watts x elapsed.

    The clock defaults to the real monotonic clock; ``attach_virtual_clock``
    swaps in a :class:`VirtualClock` for deterministic runs. The configured
    power is split evenly across the configured domains so the summed figure
    always equals watts x seconds.
    """

    backend = MOCK_BACKEND

    def __init__(self, config: MeterConfig, clock: Callable[[], int] | None = None):
        super().__init__(config)
        self._clock = clock if clock is not None else time.monotonic_ns
        self._origin = self._clock()

    def attach_virtual_clock(self) -> VirtualClock:
        clock = VirtualClock(start_nanos=self._clock())
        self._clock = clock
        return clock

    @property
    def virtual_clock(self) -> VirtualClock | None:
        return self._clock if isinstance(self._clock, VirtualClock) else None

    def _domain_microjoules(self, now_nanos: int) -> int:
        watts = self.config.mock_power_watts / len(self.config.domains)
        return int(watts * (now_nanos - self._origin) / 1e3) % MOCK_RANGE_MICROJOULES

    def read_counters(self) -> list[EnergySample]:
        now = self._clock()
        value = self._domain_microjoules(now)
        return [
            EnergySample(
                domain_id=domain,
                cumulative_microjoules=value,
                max_range_microjoules=MOCK_RANGE_MICROJOULES,
                timestamp_nanos=now,
            )
            for domain in self.config.domains
        ]

    def measure(self, action: Callable[[], object]) -> EnergyDelta:
        # Joules derive from the same two clock readings as the elapsed time,
        # so the watts = joules/seconds identity holds to float precision
        # instead of being degraded by integer-microjoule sample quantisation.
        t0 = self._clock()
        action()
        t1 = self._clock()
        elapsed_ns = t1 - t0
        return EnergyDelta(
            joules=self.config.mock_power_watts * elapsed_ns / 1e9,
            elapsed_millis=elapsed_ns / 1e6,
        )


class RaplMeter(Meter):
    """Reads Linux powercap cumulative counters (``intel-rapl`` zones)."""

    backend = RAPL_BACKEND

    def __init__(self, config: MeterConfig, powercap_root: str | os.PathLike | None = None):
        super().__init__(config)
        root = Path(powercap_root) if powercap_root is not None else Path(DEFAULT_POWERCAP_ROOT)
        self._zones = _resolve_zones(root, config.domains)

    def read_counters(self) -> list[EnergySample]:
        now = time.monotonic_ns()
        samples = []
        for zone in self._zones:
            try:
                value = int((zone.path / "energy_uj").read_text().strip())
            except (OSError, ValueError) as exc:
                raise ReadFailed(f"cannot read {zone.path}/energy_uj: {exc}") from exc
            samples.append(
                EnergySample(
                    domain_id=zone.name,
                    cumulative_microjoules=value,
                    max_range_microjoules=zone.max_range,
                    timestamp_nanos=now,
                )
            )
        return samples


@dataclass(frozen=True)
class _Zone:
    path: Path
    name: str
    max_range: int


def _iter_zone_dirs(root: Path) -> Iterable[Path]:
    for top in sorted(root.glob("intel-rapl:*")):
        if top.is_dir():
            yield top
            yield from sorted(p for p in top.glob("intel-rapl:*") if p.is_dir())


def _resolve_zones(root: Path, domains: tuple[str, ...]) -> list[_Zone]:
    """Map each configured domain to the powercap zones whose name matches it.

    A domain identifier matches a zone whose ``name`` equals it or starts
    with it followed by a dash (``package`` matches ``package-0``). Every
    configured domain must resolve to at least one readable zone.
    """
    available: list[tuple[str, Path]] = []
    for zone_dir in _iter_zone_dirs(root):
        name_file = zone_dir / "name"
        try:
            zone_name = name_file.read_text().strip()
        except OSError:
            continue
        available.append((zone_name, zone_dir))

    if not available:
        raise BackendUnavailable(f"no readable powercap zones under {root}")

    zones: list[_Zone] = []
    for domain in domains:
        matched = [
            (zone_name, zone_dir)
            for zone_name, zone_dir in available
            if zone_name == domain or zone_name.startswith(domain + "-")
        ]
        if not matched:
            names = ", ".join(sorted({name for name, _ in available}))
            raise BackendUnavailable(f"no powercap zone matches domain {domain!r} (found: {names})")
        for zone_name, zone_dir in matched:
            try:
                max_range = int((zone_dir / "max_energy_range_uj").read_text().strip())
                int((zone_dir / "energy_uj").read_text().strip())
            except (OSError, ValueError) as exc:
                raise BackendUnavailable(f"zone {zone_dir} is not readable: {exc}") from exc
            zones.append(_Zone(path=zone_dir, name=zone_name, max_range=max_range))
    return zones


def rapl_available(powercap_root: str | os.PathLike | None = None,
                   domains: tuple[str, ...] = ("package",)) -> bool:
    """True when a RAPL meter for ``domains`` could be opened right now."""
    root = Path(powercap_root) if powercap_root is not None else Path(DEFAULT_POWERCAP_ROOT)
    try:
        _resolve_zones(root, domains)
        return True
    except BackendUnavailable:
        return False


def open_meter(config: MeterConfig, powercap_root: str | os.PathLike | None = None) -> Meter:
    """Open the configured backend, honouring the ``GREENCOLL_METER`` override.

    Never falls back silently: an unavailable rapl backend raises
    :class:`BackendUnavailable` so the caller can switch to mock explicitly.
    """
    backend = config.backend
    override = os.environ.get(METER_ENV_VAR)
    if override:
        if override not in (MOCK_BACKEND, RAPL_BACKEND):
            raise ValueError(f"{METER_ENV_VAR} must be 'mock' or 'rapl', got {override!r}")
        backend = override
        if backend != config.backend:
            config = MeterConfig(
                backend=backend,
                domains=config.domains,
                mock_power_watts=config.mock_power_watts,
            )
    if backend == MOCK_BACKEND:
        return MockMeter(config)
    return RaplMeter(config, powercap_root=powercap_root)
