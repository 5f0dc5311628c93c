"""Least-energy implementation substitution from a declarative usage profile.

Given per-site collection usage (interface, methods used, workload size)
and a measured profile table, pick the table popsize nearest the site's
workload, total the energy of every same-interface implementation over the
used methods, and recommend the argmin. Candidates missing a usable cell
for any required method are excluded, never imputed. All operations are
pure functions over immutable inputs.

Totals weight every method equally by default; passing occurrence counts
switches a site to a count-weighted total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .adapters import InterfaceKind, ROSTERS
from .errors import (
    EmptyTable,
    IncompleteCandidate,
    MalformedDocument,
    NoCompleteCandidate,
    NonPositiveOriginal,
    SchemaVersionMismatch,
    UnknownInterface,
    UnknownMethod,
)
from .profile import ProfileTable
from .runner import STATUS_OK

USAGE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class UsageSite:
    site_id: str
    interface: InterfaceKind
    current_impl: str
    methods: tuple[str, ...]
    counts: dict[str, int] | None
    workload_size: int


@dataclass(frozen=True)
class UsageProfile:
    sites: tuple[UsageSite, ...]


@dataclass(frozen=True)
class Recommendation:
    site_id: str
    popsize_used: int
    candidate_totals: dict[str, float]
    chosen_impl: str
    current_total: float | None
    estimated_improvement: float | None
    skipped_candidates: tuple[tuple[str, str], ...]


def parse_usage(document: dict) -> UsageProfile:
    """Validate a usage document into a typed profile."""
    if not isinstance(document, dict):
        raise MalformedDocument("usage document must be an object")
    version = document.get("schema_version")
    if version != USAGE_SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"unsupported usage schema_version {version!r}")
    raw_sites = document.get("sites")
    if not isinstance(raw_sites, list):
        raise MalformedDocument("usage document needs a 'sites' array")

    sites = []
    for raw in raw_sites:
        if not isinstance(raw, dict):
            raise MalformedDocument("site entries must be objects")
        try:
            site_id = str(raw["site_id"])
            interface_name = raw["interface"]
            current_impl = str(raw["current_impl"])
            methods = raw["methods"]
            workload_size = raw["workload_size"]
        except KeyError as exc:
            raise MalformedDocument(f"site missing field {exc}") from exc

        try:
            interface = InterfaceKind(interface_name)
        except ValueError:
            raise UnknownInterface(f"unknown interface {interface_name!r}") from None

        if not isinstance(methods, list) or not methods:
            raise MalformedDocument(f"site {site_id!r}: methods must be a non-empty array")
        roster = ROSTERS[interface]
        for method in methods:
            if method not in roster:
                raise UnknownMethod(f"site {site_id!r}: {method!r} is not a {interface.value} method")

        counts = raw.get("counts")
        if counts is not None:
            if not isinstance(counts, dict):
                raise MalformedDocument(f"site {site_id!r}: counts must be an object")
            for method, count in counts.items():
                if method not in roster:
                    raise UnknownMethod(f"site {site_id!r}: count for unknown method {method!r}")
                if not isinstance(count, int) or count <= 0:
                    raise MalformedDocument(f"site {site_id!r}: count for {method!r} must be a positive integer")

        if not isinstance(workload_size, int) or workload_size <= 0:
            raise MalformedDocument(f"site {site_id!r}: workload_size must be a positive integer")

        sites.append(UsageSite(
            site_id=site_id,
            interface=interface,
            current_impl=current_impl,
            methods=tuple(methods),
            counts=dict(counts) if counts else None,
            workload_size=workload_size,
        ))
    return UsageProfile(sites=tuple(sites))


def load_usage(path) -> UsageProfile:
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: {exc}") from exc
    return parse_usage(document)


def nearest_popsize(table: ProfileTable, workload_size: int) -> int:
    """The table popsize closest to the workload size; ties pick the smaller."""
    popsizes = table.popsizes()
    if not popsizes:
        raise EmptyTable("profile table has no popsizes")
    return min(popsizes, key=lambda p: (abs(p - workload_size), p))


def total_energy(table: ProfileTable, popsize: int, interface: InterfaceKind,
                 impl_id: str, methods: tuple[str, ...],
                 counts: dict[str, int] | None = None) -> float:
    """Sum of per-method energy for one candidate, optionally count-weighted.

    Methods absent from ``counts`` default to weight 1. Any required method
    without an ok cell makes the candidate incomplete.
    """
    missing = []
    total = 0.0
    for method in methods:
        record = table.get(interface, popsize, method, impl_id)
        if record is None or record.status != STATUS_OK:
            missing.append(method)
            continue
        weight = counts.get(method, 1) if counts else 1
        total += weight * record.energy_joules
    if missing:
        raise IncompleteCandidate(impl_id, missing)
    return total


def _total_time(table, popsize, interface, impl_id, methods, counts):
    total = 0.0
    for method in methods:
        record = table.get(interface, popsize, method, impl_id)
        weight = counts.get(method, 1) if counts else 1
        total += weight * record.time_millis
    return total


def recommend_site(site: UsageSite, table: ProfileTable, weighted: bool = False) -> Recommendation:
    """Advise one site; raises NoCompleteCandidate when nothing qualifies."""
    popsize = nearest_popsize(table, site.workload_size)
    counts = site.counts if (weighted and site.counts) else None

    candidates = table.impl_ids(site.interface, popsize)
    totals: dict[str, float] = {}
    times: dict[str, float] = {}
    skipped: list[tuple[str, str]] = []
    for impl_id in candidates:
        try:
            totals[impl_id] = total_energy(table, popsize, site.interface,
                                           impl_id, site.methods, counts)
            times[impl_id] = _total_time(table, popsize, site.interface,
                                         impl_id, site.methods, counts)
        except IncompleteCandidate as exc:
            skipped.append((impl_id, f"no usable cell for {', '.join(exc.missing)}"))

    if site.current_impl not in candidates:
        skipped.append((site.current_impl, "not present in table"))

    if not totals:
        reasons = dict(skipped) or {"*": f"no {site.interface.value} implementations at popsize {popsize}"}
        raise NoCompleteCandidate(site.site_id, reasons)

    chosen = min(totals, key=lambda impl: (totals[impl], times[impl], impl))
    current_total = totals.get(site.current_impl)
    improvement_fraction = None
    if current_total is not None and current_total > 0:
        improvement_fraction = (current_total - totals[chosen]) / current_total

    return Recommendation(
        site_id=site.site_id,
        popsize_used=popsize,
        candidate_totals=totals,
        chosen_impl=chosen,
        current_total=current_total,
        estimated_improvement=improvement_fraction,
        skipped_candidates=tuple(skipped),
    )


def recommend(profile: UsageProfile, table: ProfileTable, weighted: bool = False) -> list[Recommendation]:
    """Advise every site in the profile; fails on the first hopeless site."""
    return [recommend_site(site, table, weighted=weighted) for site in profile.sites]


def improvement(original_joules: float, optimized_joules: float) -> float:
    """Fraction of the original energy saved by the optimized version."""
    if original_joules <= 0:
        raise NonPositiveOriginal(f"original energy must be positive, got {original_joules}")
    if optimized_joules < 0:
        raise ValueError("optimized energy cannot be negative")
    return (original_joules - optimized_joules) / original_joules


def recommendations_document(recommendations: list[Recommendation],
                             failures: list[tuple[str, str]] = ()) -> dict:
    """Canonical document form of a batch of recommendations."""
    return {
        "schema_version": 1,
        "recommendations": [
            {
                "site_id": rec.site_id,
                "popsize_used": rec.popsize_used,
                "candidate_totals": {impl: joules for impl, joules in sorted(rec.candidate_totals.items())},
                "chosen_impl": rec.chosen_impl,
                "current_total": rec.current_total,
                "estimated_improvement": rec.estimated_improvement,
                "skipped_candidates": [
                    {"impl": impl, "reason": reason} for impl, reason in rec.skipped_candidates
                ],
            }
            for rec in recommendations
        ],
        "failures": [{"site_id": site_id, "reason": reason} for site_id, reason in failures],
    }
