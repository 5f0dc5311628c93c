"""Energy-profile tables: persistence, per-method ranking, reports.

The canonical on-disk form is a versioned JSON document with one flat
record per cell; energies round-trip exactly because JSON floats are
serialised with full precision. Tables are immutable once built and all
operations here are pure, so concurrent readers are safe.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

from .adapters import InterfaceKind, MethodId, ROSTERS
from .errors import EmptyRow, MalformedDocument, SchemaVersionMismatch, UnknownMethod
from .runner import MeasurementRecord, STATUS_OK, STATUSES

SCHEMA_VERSION = 1

_IFACE_RANK = {kind.value: i for i, kind in enumerate(InterfaceKind)}


def _method_rank(interface: str, method: str) -> int:
    roster = ROSTERS[InterfaceKind(interface)]
    return roster.index(method) if method in roster else len(roster)


@dataclass
class ProfileTable:
    """The (interface, popsize, method, implementation) measurement matrix."""

    schema_version: int = SCHEMA_VERSION
    metadata: dict = field(default_factory=dict)
    cells: dict[tuple[str, int, str, str], MeasurementRecord] = field(default_factory=dict)

    @staticmethod
    def key_of(record: MeasurementRecord) -> tuple[str, int, str, str]:
        return (record.method.interface.value, record.popsize, record.method.name, record.impl_id)

    def add(self, record: MeasurementRecord) -> None:
        key = self.key_of(record)
        if key in self.cells:
            raise ValueError(f"duplicate cell {key}")
        if record.status == STATUS_OK:
            # Zero is tolerated: hardware counters quantise, and a cell far
            # below the meter's resolution legitimately measures 0 J.
            if record.energy_joules is None or not math.isfinite(record.energy_joules) or record.energy_joules < 0:
                raise ValueError(f"ok cell {key} must carry finite non-negative energy")
        self.cells[key] = record

    def get(self, interface: InterfaceKind, popsize: int, method: str, impl_id: str) -> MeasurementRecord | None:
        return self.cells.get((interface.value, popsize, method, impl_id))

    def popsizes(self) -> list[int]:
        return sorted({key[1] for key in self.cells})

    def impl_ids(self, interface: InterfaceKind, popsize: int | None = None) -> list[str]:
        return sorted({
            key[3] for key in self.cells
            if key[0] == interface.value and (popsize is None or key[1] == popsize)
        })

    def sorted_keys(self) -> list[tuple[str, int, str, str]]:
        return sorted(
            self.cells,
            key=lambda k: (_IFACE_RANK[k[0]], k[1], _method_rank(k[0], k[2]), k[3]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProfileTable):
            return NotImplemented
        return (self.schema_version == other.schema_version
                and self.metadata == other.metadata
                and self.cells == other.cells)


# --- canonical document ---------------------------------------------------

def record_to_cell(record: MeasurementRecord) -> dict:
    """One record in the canonical flat cell shape."""
    return {
        "interface": record.method.interface.value,
        "popsize": record.popsize,
        "method": record.method.name,
        "impl": record.impl_id,
        "status": record.status,
        "energy_j": record.energy_joules,
        "time_ms": record.time_millis,
        "trials": [{"j": j, "ms": ms} for j, ms in record.trials],
    }


def to_document(table: ProfileTable) -> dict:
    return {
        "schema_version": table.schema_version,
        "metadata": table.metadata,
        "cells": [record_to_cell(table.cells[key]) for key in table.sorted_keys()],
    }


def from_document(document: dict) -> ProfileTable:
    if not isinstance(document, dict):
        raise MalformedDocument("profile document must be an object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"unsupported profile schema_version {version!r}")
    metadata = document.get("metadata")
    cells = document.get("cells")
    if not isinstance(metadata, dict) or not isinstance(cells, list):
        raise MalformedDocument("profile document needs 'metadata' object and 'cells' array")

    table = ProfileTable(schema_version=version, metadata=metadata)
    for raw in cells:
        if not isinstance(raw, dict):
            raise MalformedDocument("cell records must be objects")
        try:
            interface = InterfaceKind(raw["interface"])
            method = MethodId(interface, raw["method"])
            status = raw["status"]
            if status not in STATUSES:
                raise MalformedDocument(f"unknown cell status {status!r}")
            record = MeasurementRecord(
                impl_id=raw["impl"],
                method=method,
                popsize=int(raw["popsize"]),
                trials=tuple((float(t["j"]), float(t["ms"])) for t in raw.get("trials", [])),
                energy_joules=None if raw.get("energy_j") is None else float(raw["energy_j"]),
                time_millis=None if raw.get("time_ms") is None else float(raw["time_ms"]),
                status=status,
            )
        except (KeyError, TypeError, ValueError, UnknownMethod) as exc:
            raise MalformedDocument(f"bad cell record: {exc}") from exc
        try:
            table.add(record)
        except ValueError as exc:
            raise MalformedDocument(str(exc)) from exc
    return table


def save(table: ProfileTable, path) -> None:
    """Write the canonical document atomically."""
    payload = json.dumps(to_document(table), indent=2)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(payload + "\n")
    os.replace(tmp, path)


def load(path) -> ProfileTable:
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: {exc}") from exc
    return from_document(document)


# --- ranking ----------------------------------------------------------------

@dataclass(frozen=True)
class RankedEntry:
    impl_id: str
    energy_joules: float
    time_millis: float
    color_scalar: float
    rank: int


@dataclass(frozen=True)
class RankedRow:
    interface: InterfaceKind
    popsize: int
    method: str
    entries: tuple[RankedEntry, ...]
    skipped: tuple[tuple[str, str], ...]


def rank_row(table: ProfileTable, interface: InterfaceKind, popsize: int, method: str) -> RankedRow:
    """Order one row's implementations by energy and scale them onto [0, 1]."""
    ok: list[MeasurementRecord] = []
    skipped: list[tuple[str, str]] = []
    for impl_id in table.impl_ids(interface, popsize):
        record = table.get(interface, popsize, method, impl_id)
        if record is None:
            continue
        if record.status == STATUS_OK:
            ok.append(record)
        else:
            skipped.append((impl_id, record.status))
    if not ok:
        raise EmptyRow(f"no usable cell for {interface.value}/{popsize}/{method}")

    ok.sort(key=lambda r: (r.energy_joules, r.time_millis, r.impl_id))
    e_min = ok[0].energy_joules
    e_max = ok[-1].energy_joules
    spread = e_max - e_min
    entries = tuple(
        RankedEntry(
            impl_id=record.impl_id,
            energy_joules=record.energy_joules,
            time_millis=record.time_millis,
            color_scalar=0.0 if spread == 0 else (record.energy_joules - e_min) / spread,
            rank=position,
        )
        for position, record in enumerate(ok, start=1)
    )
    return RankedRow(interface=interface, popsize=popsize, method=method,
                     entries=entries, skipped=tuple(skipped))


# --- reports ----------------------------------------------------------------

_GREEN = (0x00, 0xC0, 0x00)
_YELLOW = (0xC0, 0xC0, 0x00)
_RED = (0xC0, 0x00, 0x00)


def color_for_scalar(scalar: float) -> str:
    """Piecewise-linear green -> yellow -> red ramp with yellow at 0.5."""
    s = min(1.0, max(0.0, scalar))
    if s <= 0.5:
        lo, hi, t = _GREEN, _YELLOW, s / 0.5
    else:
        lo, hi, t = _YELLOW, _RED, (s - 0.5) / 0.5
    channels = (round(l + (h - l) * t) for l, h in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*channels)


def _skip_label(status: str) -> str:
    return "—(" + status.removeprefix("skipped_") + ")"


def _grid_sections(table: ProfileTable, exclude_methods: tuple[str, ...]):
    """Yield (interface, popsize, impl_ids, method rows) for each grid."""
    seen = sorted(
        {(key[0], key[1]) for key in table.cells},
        key=lambda pair: (_IFACE_RANK[pair[0]], pair[1]),
    )
    for interface_value, popsize in seen:
        interface = InterfaceKind(interface_value)
        impl_ids = table.impl_ids(interface, popsize)
        methods = sorted(
            {key[2] for key in table.cells if key[0] == interface_value and key[1] == popsize},
            key=lambda m: _method_rank(interface_value, m),
        )
        methods = [m for m in methods if m not in exclude_methods]
        rows = []
        for method in methods:
            try:
                ranked = rank_row(table, interface, popsize, method)
            except EmptyRow:
                ranked = None
            by_impl = {} if ranked is None else {e.impl_id: e for e in ranked.entries}
            row_cells = []
            for impl_id in impl_ids:
                record = table.get(interface, popsize, method, impl_id)
                if record is None:
                    row_cells.append(None)
                elif record.status != STATUS_OK:
                    row_cells.append(record.status)
                else:
                    row_cells.append(by_impl[impl_id])
            rows.append((method, row_cells))
        yield interface, popsize, impl_ids, rows


def _report_csv(table: ProfileTable, exclude_methods: tuple[str, ...]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["interface", "popsize", "method", "impl", "status",
                     "energy_j", "time_ms", "color_scalar", "rank"])
    ranked_cache: dict[tuple[str, int, str], dict[str, RankedEntry]] = {}
    for key in table.sorted_keys():
        interface_value, popsize, method, impl_id = key
        if method in exclude_methods:
            continue
        record = table.cells[key]
        row_key = (interface_value, popsize, method)
        if row_key not in ranked_cache:
            try:
                ranked = rank_row(table, InterfaceKind(interface_value), popsize, method)
                ranked_cache[row_key] = {e.impl_id: e for e in ranked.entries}
            except EmptyRow:
                ranked_cache[row_key] = {}
        entry = ranked_cache[row_key].get(impl_id)
        writer.writerow([
            interface_value,
            popsize,
            method,
            impl_id,
            record.status,
            "" if record.energy_joules is None else repr(record.energy_joules),
            "" if record.time_millis is None else repr(record.time_millis),
            "" if entry is None else f"{entry.color_scalar:.6f}",
            "" if entry is None else entry.rank,
        ])
    return buffer.getvalue()


def _format_cell_text(cell) -> str:
    if cell is None:
        return "—(absent)"
    if isinstance(cell, str):
        return _skip_label(cell)
    return f"{cell.energy_joules:.4f} J / {cell.time_millis:.2f} ms"


def _report_tty(table: ProfileTable, exclude_methods: tuple[str, ...]) -> str:
    lines = []
    for interface, popsize, impl_ids, rows in _grid_sections(table, exclude_methods):
        lines.append(f"== {interface.value} @ popsize {popsize} ==")
        header = ["method"] + impl_ids
        body = [[method] + [_format_cell_text(cell) for cell in cells] for method, cells in rows]
        widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for row in body:
            lines.append("  ".join(value.ljust(w) for value, w in zip(row, widths)))
        lines.append("")
    return "\n".join(lines)


def _report_html(table: ProfileTable, exclude_methods: tuple[str, ...], include_timestamp: bool) -> str:
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset=\"utf-8\"><title>Collection energy profile</title>",
        "<style>",
        "body { font-family: sans-serif; margin: 2em; }",
        "table { border-collapse: collapse; margin-bottom: 2em; }",
        "th, td { border: 1px solid #999; padding: 4px 8px; text-align: right; }",
        "th { background: #eee; }",
        "td.method { text-align: left; font-weight: bold; }",
        "td.skip { color: #666; text-align: center; }",
        "</style></head><body>",
        "<h1>Collection energy profile</h1>",
    ]
    meta = table.metadata
    meta_bits = [f"host: {meta.get('host', '?')}", f"meter: {meta.get('meter_backend', '?')}",
                 f"seed: {meta.get('seed', '?')}"]
    if include_timestamp and meta.get("timestamp"):
        meta_bits.append(f"measured: {meta['timestamp']}")
    parts.append("<p>" + " | ".join(meta_bits) + "</p>")

    for interface, popsize, impl_ids, rows in _grid_sections(table, exclude_methods):
        parts.append(f"<h2>{interface.value} @ popsize {popsize}</h2>")
        parts.append("<table><tr><th>method</th>")
        for impl_id in impl_ids:
            parts.append(f"<th colspan=\"2\">{impl_id}</th>")
        parts.append("</tr><tr><th></th>")
        parts.append("<th>J</th><th>ms</th>" * len(impl_ids))
        parts.append("</tr>")
        for method, cells in rows:
            parts.append(f"<tr><td class=\"method\">{method}</td>")
            for cell in cells:
                if cell is None or isinstance(cell, str):
                    label = "—(absent)" if cell is None else _skip_label(cell)
                    parts.append(f"<td class=\"skip\" colspan=\"2\">{label}</td>")
                else:
                    color = color_for_scalar(cell.color_scalar)
                    parts.append(
                        f"<td style=\"background:{color}\">{cell.energy_joules:.6f}</td>"
                        f"<td>{cell.time_millis:.3f}</td>"
                    )
            parts.append("</tr>")
        parts.append("</table>")
    parts.append("<p>Cell colour scales from green (least energy in row) to red (most).</p>")
    parts.append("</body></html>")
    return "\n".join(parts)


REPORT_FORMATS = ("html", "csv", "tty")


def emit_report(table: ProfileTable, format: str = "tty",
                exclude_methods: tuple[str, ...] = (),
                include_timestamp: bool = True) -> str:
    """Render the table; deterministic for a given table and flags."""
    if not table.cells:
        raise ValueError("cannot report an empty table")
    if format == "csv":
        return _report_csv(table, tuple(exclude_methods))
    if format == "tty":
        return _report_tty(table, tuple(exclude_methods))
    if format == "html":
        return _report_html(table, tuple(exclude_methods), include_timestamp)
    raise ValueError(f"unknown report format {format!r}")
