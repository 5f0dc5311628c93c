"""Exception hierarchy shared across the toolchain."""


class GreencollError(Exception):
    """Base class for all greencoll errors."""


# --- meter ---

class BackendUnavailable(GreencollError):
    """The requested meter backend cannot be opened on this host."""


class ReadFailed(GreencollError):
    """A transient counter read failure; the caller may retry."""


class DomainMismatch(GreencollError):
    """Energy samples from different domains (or ranges) were combined."""


# --- adapters ---

class UnknownImplementation(GreencollError):
    """Descriptor does not correspond to a registered implementation."""


class Unsupported(GreencollError):
    """The implementation does not support the dispatched method."""


class OperandMismatch(GreencollError):
    """Operands do not match the dispatched method's arity."""


# --- workloads ---

class PopsizeTooSmall(GreencollError):
    """Population size below the minimum of 10."""


class UnknownMethod(GreencollError):
    """Method name outside the interface's roster."""


class UnknownInterface(GreencollError):
    """Interface name outside {set, list, map}."""


# --- runner ---

class EmptyAfterTrim(GreencollError):
    """No trials survive outlier trimming."""


class CellTimeout(GreencollError):
    """A benchmark cell exceeded its wall-clock budget."""


# --- profile ---

class SchemaVersionMismatch(GreencollError):
    """Document schema version is not supported by this build."""


class MalformedDocument(GreencollError):
    """Document cannot be parsed or violates its schema."""


class EmptyRow(GreencollError):
    """No usable measurement in the requested table row."""


# --- advisor ---

class EmptyTable(GreencollError):
    """Profile table carries no population sizes."""


class IncompleteCandidate(GreencollError):
    """Candidate implementation lacks usable cells for required methods.

    Carries the method names that are missing or skipped.
    """

    def __init__(self, impl_id: str, missing: list[str]):
        super().__init__(f"{impl_id}: no usable measurement for {', '.join(missing)}")
        self.impl_id = impl_id
        self.missing = list(missing)


class NoCompleteCandidate(GreencollError):
    """No implementation covers every method a site uses."""

    def __init__(self, site_id: str, reasons: dict[str, str]):
        detail = "; ".join(f"{impl}: {why}" for impl, why in sorted(reasons.items()))
        super().__init__(f"site {site_id!r}: no complete candidate ({detail})")
        self.site_id = site_id
        self.reasons = dict(reasons)


class NonPositiveOriginal(GreencollError):
    """Improvement is undefined for a non-positive original energy."""
