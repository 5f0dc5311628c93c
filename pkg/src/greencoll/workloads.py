"""Deterministic string corpora and per-method benchmark recipes.

Every workload is a pure function of (population size, seed): the corpus,
the operand order, and the resulting functional digest reproduce exactly.
String generation uses ``random.Random`` seeded with string keys, which is
stable across platforms and interpreter runs.

Set recipes follow the classic micro-benchmark protocol: element methods
touch a tenth of the population (half present, half absent), bulk methods
apply the secondary collection five times, iteration is either one full
consuming traversal or repeated iterator construction. List and Map recipes
are reconstructed by analogy and carry ``reconstructed=True``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator

from .adapters import (
    DIGEST_IDENTITY,
    Adapter,
    InterfaceKind,
    MethodId,
    ROSTERS,
    fold_digest,
)
from .errors import PopsizeTooSmall, UnknownMethod

MIN_POPSIZE = 10

_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
_MIN_LEN = 8
_MAX_LEN = 32

# Deterministic cost model used when benchmarking against a virtual clock:
# a flat charge per dispatched operation plus a per-element charge for bulk
# and traversal operands.
COST_BASE_NS = 1000
COST_PER_ELEMENT_NS = 10

# Bulk methods that tear down most of the structure; the recipe refills the
# adapter before each repetition and keeps the refill out of the measured
# region.
DESTRUCTIVE_BULK = frozenset({"clear", "removeAll", "retainAll"})

BULK_REPEATS = 5


class OperandPlan(str, Enum):
    TENTH_HALF_HALF = "tenth_half_half"
    SECONDARY_TIMES_5 = "secondary_times_5"
    REPEAT_5 = "repeat_5"
    TRAVERSE_ALL = "traverse_all"
    PER_ELEMENT_POPSIZE = "per_element_popsize"
    INDEX_PROBE_TENTH = "index_probe_tenth"


@dataclass(frozen=True)
class WorkloadSpec:
    """Recipe for exercising one (interface, method) cell."""

    interface: InterfaceKind
    method: MethodId
    operand_plan: OperandPlan
    description: str
    reconstructed: bool


@dataclass(frozen=True)
class Corpus:
    """Population plus the mixed secondary collection for one popsize."""

    popsize: int
    population: tuple[str, ...]
    secondary: tuple[str, ...]
    seed: int


def _string_stream(rng: random.Random) -> Iterator[str]:
    while True:
        length = rng.randint(_MIN_LEN, _MAX_LEN)
        yield "".join(rng.choices(_ALPHABET, k=length))


def gen_population(popsize: int, seed: int) -> list[str]:
    """``popsize`` distinct alphanumeric strings, fixed by (popsize, seed)."""
    if popsize < MIN_POPSIZE:
        raise PopsizeTooSmall(f"popsize {popsize} < {MIN_POPSIZE}")
    rng = random.Random(f"{seed}:population:{popsize}")
    stream = _string_stream(rng)
    seen: set[str] = set()
    out: list[str] = []
    while len(out) < popsize:
        s = next(stream)
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def gen_secondary(population: list[str], seed: int) -> list[str]:
    """Mixed auxiliary collection sized a tenth of the population.

    Contains ceil(k/2) elements sampled from the population and floor(k/2)
    fresh strings guaranteed absent from it, shuffled in a seeded order.
    """
    k = len(population) // 10
    n_existing = (k + 1) // 2
    rng = random.Random(f"{seed}:secondary:{len(population)}")
    existing = rng.sample(population, n_existing)

    member = set(population)
    fresh_rng = random.Random(f"{seed}:secondary-new:{len(population)}")
    stream = _string_stream(fresh_rng)
    fresh: list[str] = []
    taken: set[str] = set()
    while len(fresh) < k - n_existing:
        s = next(stream)
        if s not in member and s not in taken:
            taken.add(s)
            fresh.append(s)

    combined = existing + fresh
    rng.shuffle(combined)
    return combined


def build_corpus(popsize: int, seed: int) -> Corpus:
    population = gen_population(popsize, seed)
    secondary = gen_secondary(population, seed)
    return Corpus(popsize=popsize, population=tuple(population),
                  secondary=tuple(secondary), seed=seed)


def map_value(key: str) -> str:
    """Value stored against ``key`` when a map is populated."""
    return key + "=v"


def update_value(key: str) -> str:
    """Replacement value written by put workloads."""
    return key + "=u"


def populate_adapter(adapter: Adapter, corpus: Corpus) -> None:
    """Fill a fresh adapter with the corpus population (never measured)."""
    if adapter.interface is InterfaceKind.MAP:
        adapter.populate((k, map_value(k)) for k in corpus.population)
    else:
        adapter.populate(corpus.population)


# --- recipe table ---------------------------------------------------------

_SET_PLANS = {
    "add": (OperandPlan.TENTH_HALF_HALF,
            "add a tenth of the population size in elements, half present and half absent"),
    "addAll": (OperandPlan.SECONDARY_TIMES_5,
               "bulk-add the secondary collection, 5 times"),
    "clear": (OperandPlan.REPEAT_5,
              "clear the structure 5 times, refilled between repetitions"),
    "contains": (OperandPlan.TENTH_HALF_HALF,
                 "membership probes for a tenth of the population size, half present and half absent"),
    "containsAll": (OperandPlan.SECONDARY_TIMES_5,
                    "bulk membership check against the secondary collection, 5 times"),
    "iterateAll": (OperandPlan.TRAVERSE_ALL,
                   "one full traversal consuming every element"),
    "iterator": (OperandPlan.PER_ELEMENT_POPSIZE,
                 "construct an iterator once per populated element"),
    "remove": (OperandPlan.TENTH_HALF_HALF,
               "remove a tenth of the population size in elements, half present and half absent"),
    "removeAll": (OperandPlan.SECONDARY_TIMES_5,
                  "bulk-remove the secondary collection, 5 times, refilled between repetitions"),
    "retainAll": (OperandPlan.SECONDARY_TIMES_5,
                  "intersect with the secondary collection, 5 times, refilled between repetitions"),
    "toArray": (OperandPlan.REPEAT_5, "export to an array 5 times"),
}

_LIST_PLANS = {
    "add": (OperandPlan.TENTH_HALF_HALF,
            "append a tenth of the population size in elements, half already present and half new"),
    "addAll": (OperandPlan.SECONDARY_TIMES_5,
               "bulk-append the secondary collection, 5 times"),
    "addAtIndex": (OperandPlan.INDEX_PROBE_TENTH,
                   "insert an element at a tenth of the population size in seeded positions"),
    "addAllAtIndex": (OperandPlan.SECONDARY_TIMES_5,
                      "insert the secondary collection at a seeded position, 5 times"),
    "clear": (OperandPlan.REPEAT_5,
              "clear the sequence 5 times, refilled between repetitions"),
    "contains": (OperandPlan.TENTH_HALF_HALF,
                 "membership probes for a tenth of the population size, half present and half absent"),
    "containsAll": (OperandPlan.SECONDARY_TIMES_5,
                    "bulk membership check against the secondary collection, 5 times"),
    "get": (OperandPlan.INDEX_PROBE_TENTH,
            "read the element at a tenth of the population size in seeded positions"),
    "indexOf": (OperandPlan.TENTH_HALF_HALF,
                "first-position search for a tenth of the population size in values, half present and half absent"),
    "iterator": (OperandPlan.PER_ELEMENT_POPSIZE,
                 "construct an iterator once per populated element"),
    "lastIndexOf": (OperandPlan.TENTH_HALF_HALF,
                    "last-position search for a tenth of the population size in values, half present and half absent"),
    "listIterator": (OperandPlan.PER_ELEMENT_POPSIZE,
                     "construct a positional iterator once per populated element"),
    "listIteratorAtIndex": (OperandPlan.INDEX_PROBE_TENTH,
                            "construct a positional iterator at a tenth of the population size in seeded positions"),
    "remove": (OperandPlan.TENTH_HALF_HALF,
               "remove a tenth of the population size in values, half present and half absent"),
    "removeAll": (OperandPlan.SECONDARY_TIMES_5,
                  "bulk-remove the secondary collection, 5 times, refilled between repetitions"),
    "removeAtIndex": (OperandPlan.INDEX_PROBE_TENTH,
                      "remove the element at a tenth of the population size in seeded positions"),
    "retainAll": (OperandPlan.SECONDARY_TIMES_5,
                  "intersect with the secondary collection, 5 times, refilled between repetitions"),
    "set": (OperandPlan.INDEX_PROBE_TENTH,
            "replace the element at a tenth of the population size in seeded positions"),
    "sublist": (OperandPlan.REPEAT_5, "take 5 seeded half-open slices"),
    "toArray": (OperandPlan.REPEAT_5, "export to an array 5 times"),
}

_MAP_PLANS = {
    "clear": (OperandPlan.REPEAT_5,
              "clear the map 5 times, refilled between repetitions"),
    "containsKey": (OperandPlan.TENTH_HALF_HALF,
                    "key probes for a tenth of the population size, half present and half absent"),
    "containsValue": (OperandPlan.TENTH_HALF_HALF,
                      "value probes for a tenth of the population size, half present and half absent"),
    "entrySet": (OperandPlan.PER_ELEMENT_POPSIZE,
                 "construct the entry view once per populated entry"),
    "get": (OperandPlan.TENTH_HALF_HALF,
            "look up a tenth of the population size in keys, half present and half absent"),
    "iterateAll": (OperandPlan.TRAVERSE_ALL,
                   "one full traversal consuming every entry"),
    "keySet": (OperandPlan.PER_ELEMENT_POPSIZE,
               "construct the key view once per populated entry"),
    "put": (OperandPlan.TENTH_HALF_HALF,
            "write a tenth of the population size in entries, half updating existing keys and half inserting new"),
    "putAll": (OperandPlan.SECONDARY_TIMES_5,
               "bulk-write the secondary collection as entries, 5 times"),
    "remove": (OperandPlan.TENTH_HALF_HALF,
               "remove a tenth of the population size in keys, half present and half absent"),
    "values": (OperandPlan.PER_ELEMENT_POPSIZE,
               "construct the value view once per populated entry"),
}

_PLAN_TABLES = {
    InterfaceKind.SET: (_SET_PLANS, False),
    InterfaceKind.LIST: (_LIST_PLANS, True),
    InterfaceKind.MAP: (_MAP_PLANS, True),
}


def workload_for(interface: InterfaceKind, method: str | MethodId) -> WorkloadSpec:
    """The recipe for one roster method."""
    name = method.name if isinstance(method, MethodId) else method
    table, reconstructed = _PLAN_TABLES[interface]
    if name not in table:
        raise UnknownMethod(f"{name!r} is not a {interface.value} method")
    plan, description = table[name]
    return WorkloadSpec(
        interface=interface,
        method=MethodId(interface, name),
        operand_plan=plan,
        description=description,
        reconstructed=reconstructed,
    )


def workload_table() -> list[WorkloadSpec]:
    """Every recipe, in roster order."""
    return [
        workload_for(interface, name)
        for interface in InterfaceKind
        for name in ROSTERS[interface]
    ]


def describe_workloads() -> dict:
    """Canonical document describing the full recipe table."""
    return {
        "schema_version": 1,
        "workloads": [
            {
                "interface": spec.interface.value,
                "method": spec.method.name,
                "plan": spec.operand_plan.value,
                "description": spec.description,
                "reconstructed": spec.reconstructed,
            }
            for spec in workload_table()
        ],
    }


# --- execution ------------------------------------------------------------

class _Execution:
    """Shared state while one workload recipe runs against one adapter."""

    def __init__(self, adapter, spec, corpus, cost_hook, checkpoint):
        self.adapter = adapter
        self.spec = spec
        self.corpus = corpus
        self.cost_hook = cost_hook
        self.checkpoint = checkpoint
        self.digest = DIGEST_IDENTITY
        self.rng = random.Random(
            f"{corpus.seed}:{spec.interface.value}:{spec.method.name}:operands"
        )

    def dispatch(self, args: tuple = (), bulk: int = 0) -> None:
        if self.checkpoint is not None:
            self.checkpoint()
        if self.cost_hook is not None:
            self.cost_hook(COST_BASE_NS + COST_PER_ELEMENT_NS * bulk)
        result = self.adapter.dispatch(self.spec.method.name, args)
        self.digest = fold_digest(self.digest, result)

    def refill(self) -> None:
        self.adapter.clear()
        populate_adapter(self.adapter, self.corpus)

    # -- plan bodies --

    def run_tenth_half_half(self) -> None:
        method = self.spec.method.name
        interface = self.spec.interface
        if interface is InterfaceKind.MAP:
            if method == "containsValue":
                for key in self.corpus.secondary:
                    self.dispatch((map_value(key),))
            elif method == "put":
                for key in self.corpus.secondary:
                    self.dispatch((key, update_value(key)))
            else:
                for key in self.corpus.secondary:
                    self.dispatch((key,))
        else:
            for element in self.corpus.secondary:
                self.dispatch((element,))

    def secondary_operand(self):
        if self.spec.interface is InterfaceKind.MAP:
            return [(k, map_value(k)) for k in self.corpus.secondary]
        return list(self.corpus.secondary)

    def run_bulk_rep(self, operand) -> None:
        method = self.spec.method.name
        if method == "addAllAtIndex":
            index = self.rng.randrange(self.adapter.size() + 1)
            self.dispatch((index, operand), bulk=len(operand))
        else:
            self.dispatch((operand,), bulk=len(operand))

    def run_repeat_rep(self) -> None:
        method = self.spec.method.name
        if method == "sublist":
            size = self.adapter.size()
            start = self.rng.randrange(size + 1)
            stop = self.rng.randint(start, size)
            self.dispatch((start, stop), bulk=stop - start)
        else:
            # clear and toArray touch the whole structure
            bulk = self.adapter.size() if method in ("clear", "toArray") else 0
            self.dispatch((), bulk=bulk)

    def run_traverse(self) -> None:
        self.dispatch((), bulk=self.adapter.size())

    def run_per_element(self) -> None:
        for _ in range(self.corpus.popsize):
            self.dispatch(())

    def run_index_probes(self) -> None:
        method = self.spec.method.name
        probes = self.corpus.popsize // 10
        secondary = self.corpus.secondary
        for probe in range(probes):
            size = self.adapter.size()
            if method == "addAtIndex":
                index = self.rng.randrange(size + 1)
                self.dispatch((index, secondary[probe % len(secondary)]))
            elif method == "set":
                index = self.rng.randrange(size)
                self.dispatch((index, secondary[probe % len(secondary)]))
            elif method == "listIteratorAtIndex":
                index = self.rng.randrange(size + 1)
                self.dispatch((index,))
            else:
                index = self.rng.randrange(size)
                self.dispatch((index,))


def execute_workload(
    adapter: Adapter,
    spec: WorkloadSpec,
    corpus: Corpus,
    measured: Callable[[Callable[[], None]], None] | None = None,
    cost_hook: Callable[[int], None] | None = None,
    checkpoint: Callable[[], None] | None = None,
) -> int:
    """Run one recipe against a freshly populated adapter.

    ``measured`` wraps every measured segment (the runner passes the meter
    here); refills between destructive repetitions happen outside it.
    Returns the functional digest folding every dispatch result.
    """
    if spec.interface is not adapter.interface:
        raise ValueError(
            f"spec for {spec.interface.value} cannot run on a {adapter.interface.value} adapter"
        )
    if measured is None:
        measured = lambda segment: segment()

    run = _Execution(adapter, spec, corpus, cost_hook, checkpoint)
    plan = spec.operand_plan

    if plan is OperandPlan.TENTH_HALF_HALF:
        measured(run.run_tenth_half_half)
    elif plan is OperandPlan.SECONDARY_TIMES_5:
        operand = run.secondary_operand()
        if spec.method.name in DESTRUCTIVE_BULK:
            for rep in range(BULK_REPEATS):
                if rep:
                    run.refill()
                measured(lambda: run.run_bulk_rep(operand))
        else:
            def all_reps():
                for _ in range(BULK_REPEATS):
                    run.run_bulk_rep(operand)
            measured(all_reps)
    elif plan is OperandPlan.REPEAT_5:
        if spec.method.name in DESTRUCTIVE_BULK:
            for rep in range(BULK_REPEATS):
                if rep:
                    run.refill()
                measured(run.run_repeat_rep)
        else:
            def all_reps():
                for _ in range(BULK_REPEATS):
                    run.run_repeat_rep()
            measured(all_reps)
    elif plan is OperandPlan.TRAVERSE_ALL:
        measured(run.run_traverse)
    elif plan is OperandPlan.PER_ELEMENT_POPSIZE:
        measured(run.run_per_element)
    elif plan is OperandPlan.INDEX_PROBE_TENTH:
        measured(run.run_index_probes)
    else:  # pragma: no cover - enum is closed
        raise AssertionError(plan)

    return run.digest
