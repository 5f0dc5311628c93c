"""Command-line surface for the benchmark-and-advise pipeline.

All subcommands run in-process by default; with ``--server URL`` the data
subcommands become thin clients of a remote service (benchmarks then run on
the machine hosting the service, which is where the meter lives anyway).

Exit codes are stable for CI use: 0 success, 1 fatal error, 3 partial
success (skipped cells or unadvisable sites).
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys

from . import advisor, profile
from .adapters import InterfaceKind, registry, registry_document
from .client import ServiceClient
from .errors import GreencollError, MalformedDocument, NoCompleteCandidate
from .meter import MeterConfig, open_meter
from .runner import DEFAULT_POPSIZES, DEFAULT_SEED, RunConfig, run_suite, trimmed_mean
from .workloads import describe_workloads

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 3


def _parse_interfaces(raw: str | None) -> list[InterfaceKind] | None:
    if raw is None:
        return None
    kinds = []
    for name in raw.split(","):
        name = name.strip()
        try:
            kinds.append(InterfaceKind(name))
        except ValueError:
            raise ValueError(f"unknown interface {name!r} (expected set, list, map)") from None
    return kinds


def _parse_ids(raw: str | None) -> list[str] | None:
    if raw is None:
        return None
    return [part.strip() for part in raw.split(",") if part.strip()]


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: {exc}") from exc


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# --- bench ------------------------------------------------------------------

def cmd_bench(args) -> int:
    interfaces = _parse_interfaces(args.interfaces)
    impls = _parse_ids(args.impls)
    popsizes = tuple(args.popsize) if args.popsize else DEFAULT_POPSIZES
    config = RunConfig(
        popsizes=popsizes,
        repetitions=args.reps,
        trim_fraction=args.trim,
        warmup=not args.no_warmup,
        cell_timeout_seconds=args.timeout,
        seed=args.seed,
    )

    if args.server:
        client = ServiceClient(args.server)
        if args.record_log:
            print("note: --record-log is ignored in --server mode", file=sys.stderr)
        document = client.bench({
            "popsizes": list(popsizes),
            "repetitions": args.reps,
            "trim_fraction": args.trim,
            "warmup": not args.no_warmup,
            "cell_timeout_seconds": args.timeout,
            "seed": args.seed,
            "interfaces": [k.value for k in interfaces] if interfaces else None,
            "impls": impls,
            "meter": args.meter,
            "mock_power_watts": args.mock_power,
            "domains": args.domains.split(","),
        })
        table = profile.from_document(document)
    else:
        if impls:
            known = {d.id for d in registry()}
            unknown = set(impls) - known
            if unknown:
                raise ValueError(f"unknown implementation ids: {', '.join(sorted(unknown))}")
        meter = open_meter(MeterConfig(
            backend=args.meter,
            domains=tuple(args.domains.split(",")),
            mock_power_watts=args.mock_power,
        ))
        log_path = args.record_log or f"{args.out}.log.jsonl"
        with open(log_path, "w", encoding="utf-8") as log:
            def on_record(record):
                log.write(json.dumps(profile.record_to_cell(record)) + "\n")
                log.flush()

            table = run_suite(meter, config, interfaces=interfaces,
                              impl_ids=impls, on_record=on_record)

    profile.save(table, args.out)
    total = len(table.cells)
    skipped = sum(1 for r in table.cells.values() if r.status != "ok")
    print(f"wrote {total} cells to {args.out} ({skipped} skipped)")
    return EXIT_PARTIAL if skipped else EXIT_OK


# --- report -------------------------------------------------------------------

def cmd_report(args) -> int:
    exclude = tuple(args.exclude_method or [])
    if args.server:
        client = ServiceClient(args.server)
        rendered = client.report(_read_json(args.table), args.format,
                                 list(exclude), not args.no_timestamp)
    else:
        table = profile.load(args.table)
        rendered = profile.emit_report(table, format=args.format,
                                       exclude_methods=exclude,
                                       include_timestamp=not args.no_timestamp)
    _emit(rendered, args.out)
    return EXIT_OK


# --- advise -------------------------------------------------------------------

def _print_recommendation(rec: dict) -> None:
    print(f"site {rec['site_id']} (table popsize {rec['popsize_used']}):")
    current = rec["current_total"]
    if current is not None:
        print(f"  current total: {current:.6f} J")
    chosen_total = rec["candidate_totals"][rec["chosen_impl"]]
    print(f"  recommended: {rec['chosen_impl']} ({chosen_total:.6f} J)")
    saving = rec["estimated_improvement"]
    if saving is not None:
        print(f"  estimated saving: {saving * 100:.2f}%")
    else:
        print("  estimated saving: unavailable (current implementation not measurable)")
    ranked = sorted(rec["candidate_totals"].items(), key=lambda kv: kv[1])
    print("  totals: " + ", ".join(f"{impl}={joules:.6f}" for impl, joules in ranked))
    for entry in rec["skipped_candidates"]:
        print(f"  skipped {entry['impl']}: {entry['reason']}")


def cmd_advise(args) -> int:
    if args.server:
        client = ServiceClient(args.server)
        usage_doc = _read_json(args.usage)
        if args.weighted:
            for site in usage_doc.get("sites", []):
                if not site.get("counts"):
                    print(f"warning: site {site.get('site_id')!r} has no counts; "
                          "using uniform weights", file=sys.stderr)
        response = client.advise(_read_json(args.table), usage_doc, args.weighted)
        recommendations = response["recommendations"]
        failures = [(f["site_id"], f["reason"]) for f in response["failures"]]
        document = advisor.recommendations_document([], failures)
        document["recommendations"] = recommendations
    else:
        table = profile.load(args.table)
        usage = advisor.load_usage(args.usage)
        if args.weighted:
            for site in usage.sites:
                if not site.counts:
                    print(f"warning: site {site.site_id!r} has no counts; "
                          "using uniform weights", file=sys.stderr)
        recommendations = []
        failures = []
        for site in usage.sites:
            try:
                recommendations.append(advisor.recommend_site(site, table, weighted=args.weighted))
            except NoCompleteCandidate as exc:
                failures.append((site.site_id, str(exc)))
        document = advisor.recommendations_document(recommendations, failures)
        recommendations = document["recommendations"]

    for rec in recommendations:
        _print_recommendation(rec)
    for site_id, reason in failures:
        print(f"site {site_id}: no recommendation ({reason})")
    if args.out:
        _emit(json.dumps(document, indent=2), args.out)
    return EXIT_PARTIAL if failures else EXIT_OK


# --- measure ------------------------------------------------------------------

def _run_child_once(meter, command):
    result = {}

    def action():
        completed = subprocess.run(command, stdout=subprocess.DEVNULL,
                                   stderr=subprocess.DEVNULL)
        result["returncode"] = completed.returncode

    delta = meter.measure(action)
    return result["returncode"], delta


def cmd_measure(args) -> int:
    command = list(args.command)
    if command and command[0] == "--":
        command = command[1:]
    if not command:
        raise ValueError("no command given; usage: measure [flags] -- <command> [args...]")

    meter = open_meter(MeterConfig(
        backend=args.meter,
        domains=tuple(args.domains.split(",")),
        mock_power_watts=args.mock_power,
    ))

    trials = []
    try:
        for rep in range(args.reps):
            returncode, delta = _run_child_once(meter, command)
            if returncode != 0:
                print(f"trial {rep + 1}: child exited {returncode}, rerunning once",
                      file=sys.stderr)
                returncode, delta = _run_child_once(meter, command)
                if returncode != 0:
                    print(f"trial {rep + 1}: child failed twice, aborting", file=sys.stderr)
                    return EXIT_FATAL
            trials.append(delta)
    except OSError as exc:
        raise GreencollError(f"cannot run {command[0]!r}: {exc}") from exc

    energy = trimmed_mean([d.joules for d in trials], args.trim)
    elapsed = trimmed_mean([d.elapsed_millis for d in trials], args.trim)
    print(f"energy: {energy:.6f} J")
    print(f"time: {elapsed:.3f} ms")
    if args.baseline is not None:
        saving = advisor.improvement(args.baseline, energy)
        print(f"improvement: {saving * 100:.2f}%")
    return EXIT_OK


# --- registry / workloads ------------------------------------------------------

def cmd_registry(args) -> int:
    document = (ServiceClient(args.server).registry_document()
                if args.server else registry_document())
    if args.json:
        print(json.dumps(document, indent=2))
    else:
        for impl in document["implementations"]:
            line = f"{impl['id']:<18} {impl['interface']:<5} {impl['display_name']}"
            if impl["notes"]:
                line += f" [{impl['notes']}]"
            print(line)
    return EXIT_OK


def cmd_workloads(args) -> int:
    document = (ServiceClient(args.server).workloads_document()
                if args.server else describe_workloads())
    if args.describe:
        print(json.dumps(document, indent=2))
    else:
        for spec in document["workloads"]:
            marker = " (reconstructed)" if spec["reconstructed"] else ""
            print(f"{spec['interface']:<5} {spec['method']:<20} {spec['plan']:<22} "
                  f"{spec['description']}{marker}")
    return EXIT_OK


# --- serve ----------------------------------------------------------------------

def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greencoll",
        description="Benchmark the energy of collection implementations and "
                    "recommend least-energy substitutions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server_flag(p):
        p.add_argument("--server", metavar="URL", default=None,
                       help="run against a remote greencoll service instead of in-process")

    def add_meter_flags(p):
        p.add_argument("--meter", choices=["mock", "rapl"], default="mock",
                       help="energy meter backend (GREENCOLL_METER overrides)")
        p.add_argument("--mock-power", type=float, default=10.0, metavar="W",
                       help="simulated power draw of the mock meter")
        p.add_argument("--domains", default="package",
                       help="comma list of energy domains to sum")

    bench = sub.add_parser("bench", help="run the benchmark matrix into a profile table")
    bench.add_argument("--popsize", action="append", type=int, metavar="N",
                       help="population size; repeatable (default: 25000 250000 1000000)")
    bench.add_argument("--reps", type=int, default=10, help="trials per cell")
    bench.add_argument("--trim", type=float, default=0.2,
                       help="fraction trimmed from each tail of the trial series")
    bench.add_argument("--timeout", type=float, default=300.0, metavar="S",
                       help="per-cell wall-clock budget in seconds")
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bench.add_argument("--interfaces", default=None, help="comma list: set,list,map")
    bench.add_argument("--impls", default=None, help="comma list of implementation ids")
    bench.add_argument("--out", required=True, help="profile table output path")
    bench.add_argument("--record-log", default=None,
                       help="incremental JSONL record log (default: <out>.log.jsonl)")
    bench.add_argument("--no-warmup", action="store_true", help="skip the warm-up pass")
    add_meter_flags(bench)
    add_server_flag(bench)
    bench.set_defaults(func=cmd_bench)

    report = sub.add_parser("report", help="render a profile table")
    report.add_argument("table", help="profile table path")
    report.add_argument("--format", choices=["html", "csv", "tty"], default="tty")
    report.add_argument("--exclude-method", action="append", metavar="NAME",
                        help="omit a method row; repeatable")
    report.add_argument("--no-timestamp", action="store_true",
                        help="suppress the embedded timestamp for byte-stable output")
    report.add_argument("--out", default=None, help="write to a file instead of stdout")
    add_server_flag(report)
    report.set_defaults(func=cmd_report)

    advise = sub.add_parser("advise", help="recommend implementations for a usage profile")
    advise.add_argument("table", help="profile table path")
    advise.add_argument("usage", help="usage profile path")
    advise.add_argument("--weighted", action="store_true",
                        help="weight methods by occurrence counts where provided")
    advise.add_argument("--out", default=None, help="write the recommendations document here")
    add_server_flag(advise)
    advise.set_defaults(func=cmd_advise)

    measure = sub.add_parser("measure", help="measure an external command under the meter")
    measure.add_argument("--reps", type=int, default=10)
    measure.add_argument("--trim", type=float, default=0.2)
    measure.add_argument("--baseline", type=float, default=None, metavar="J",
                         help="baseline energy; also print the improvement fraction")
    add_meter_flags(measure)
    measure.add_argument("command", nargs=argparse.REMAINDER,
                         help="command to run, after --")
    measure.set_defaults(func=cmd_measure)

    reg = sub.add_parser("registry", help="list registered implementations")
    reg.add_argument("--json", action="store_true", help="emit the canonical document")
    add_server_flag(reg)
    reg.set_defaults(func=cmd_registry)

    wl = sub.add_parser("workloads", help="show the workload recipe table")
    wl.add_argument("--describe", action="store_true", help="emit the canonical document")
    add_server_flag(wl)
    wl.set_defaults(func=cmd_workloads)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8433)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GreencollError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
