import pytest

from greencoll.adapters import InterfaceKind, MethodId
from greencoll.meter import MeterConfig, MockMeter
from greencoll.profile import ProfileTable
from greencoll.runner import STATUS_OK, MeasurementRecord


@pytest.fixture
def mock_meter():
    return MockMeter(MeterConfig(backend="mock", mock_power_watts=10.0))


def make_record(interface, popsize, method, impl, energy, time_ms=None, status=STATUS_OK):
    interface = InterfaceKind(interface)
    ok = status == STATUS_OK
    return MeasurementRecord(
        impl_id=impl,
        method=MethodId(interface, method),
        popsize=popsize,
        trials=((energy, time_ms if time_ms is not None else energy * 100),) if ok else (),
        energy_joules=energy if ok else None,
        time_millis=(time_ms if time_ms is not None else energy * 100) if ok else None,
        status=status,
    )


def make_table(cells, metadata=None):
    """cells: iterable of (interface, popsize, method, impl, energy[, time[, status]])."""
    table = ProfileTable(metadata=metadata or {"host": "fixture", "meter_backend": "mock", "seed": 0})
    for cell in cells:
        table.add(make_record(*cell))
    return table


@pytest.fixture
def fixture_table():
    """Small advisor fixture at popsize 25000.

    Hand-summed totals over the map methods {containsKey, get, put, values}:
      hash-map   1.0 + 1.2 + 2.1 + 2.5 = 6.8   (least)
      ordered-map 1.5 + 1.6 + 2.8 + 3.0 = 8.9
      tree-map   2.0 + 2.2 + 3.9 + 4.1 = 12.2
    and over the list methods {add, listIterator}:
      array-list  1.1 + 1.3 = 2.4   (least)
      linked-list 2.0 + 2.6 = 4.6
    """
    cells = []
    map_energy = {
        "hash-map": {"containsKey": 1.0, "get": 1.2, "put": 2.1, "values": 2.5},
        "ordered-map": {"containsKey": 1.5, "get": 1.6, "put": 2.8, "values": 3.0},
        "tree-map": {"containsKey": 2.0, "get": 2.2, "put": 3.9, "values": 4.1},
    }
    for impl, per_method in map_energy.items():
        for method, energy in per_method.items():
            cells.append(("map", 25000, method, impl, energy))
    list_energy = {
        "array-list": {"add": 1.1, "listIterator": 1.3},
        "linked-list": {"add": 2.0, "listIterator": 2.6},
    }
    for impl, per_method in list_energy.items():
        for method, energy in per_method.items():
            cells.append(("list", 25000, method, impl, energy))
    return make_table(cells)
