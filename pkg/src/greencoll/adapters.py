"""Uniform dispatch surface over concrete Set, List, and Map implementations.

Each adapter wraps one host-platform collection layout holding strings
(string->string entries for maps) and exposes the full method roster of its
interface. Dispatch results are small functional digests (booleans, sizes,
elements, checksums) so different implementations can be checked for
behavioural equivalence. Adapters are single-threaded values; never share
one across threads during a measurement.
"""

from __future__ import annotations

import zlib
from bisect import bisect_left
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import islice
from typing import Callable, Iterable

from .errors import OperandMismatch, UnknownImplementation, UnknownMethod, Unsupported


class InterfaceKind(str, Enum):
    SET = "set"
    LIST = "list"
    MAP = "map"


SET_METHODS = (
    "add", "addAll", "clear", "contains", "containsAll", "iterateAll",
    "iterator", "remove", "removeAll", "retainAll", "toArray",
)
LIST_METHODS = (
    "add", "addAll", "addAtIndex", "addAllAtIndex", "clear", "contains",
    "containsAll", "get", "indexOf", "iterator", "lastIndexOf",
    "listIterator", "listIteratorAtIndex", "remove", "removeAll",
    "removeAtIndex", "retainAll", "set", "sublist", "toArray",
)
MAP_METHODS = (
    "clear", "containsKey", "containsValue", "entrySet", "get", "iterateAll",
    "keySet", "put", "putAll", "remove", "values",
)

ROSTERS: dict[InterfaceKind, tuple[str, ...]] = {
    InterfaceKind.SET: SET_METHODS,
    InterfaceKind.LIST: LIST_METHODS,
    InterfaceKind.MAP: MAP_METHODS,
}

# method token -> (adapter attribute, number of operands)
_SET_OPS = {
    "add": ("add", 1),
    "addAll": ("add_all", 1),
    "clear": ("clear", 0),
    "contains": ("contains", 1),
    "containsAll": ("contains_all", 1),
    "iterateAll": ("iterate_all", 0),
    "iterator": ("iterator", 0),
    "remove": ("remove", 1),
    "removeAll": ("remove_all", 1),
    "retainAll": ("retain_all", 1),
    "toArray": ("to_array", 0),
}
_LIST_OPS = {
    "add": ("add", 1),
    "addAll": ("add_all", 1),
    "addAtIndex": ("add_at_index", 2),
    "addAllAtIndex": ("add_all_at_index", 2),
    "clear": ("clear", 0),
    "contains": ("contains", 1),
    "containsAll": ("contains_all", 1),
    "get": ("get", 1),
    "indexOf": ("index_of", 1),
    "iterator": ("iterator", 0),
    "lastIndexOf": ("last_index_of", 1),
    "listIterator": ("list_iterator", 0),
    "listIteratorAtIndex": ("list_iterator_at_index", 1),
    "remove": ("remove", 1),
    "removeAll": ("remove_all", 1),
    "removeAtIndex": ("remove_at_index", 1),
    "retainAll": ("retain_all", 1),
    "set": ("set_element", 2),
    "sublist": ("sublist", 2),
    "toArray": ("to_array", 0),
}
_MAP_OPS = {
    "clear": ("clear", 0),
    "containsKey": ("contains_key", 1),
    "containsValue": ("contains_value", 1),
    "entrySet": ("entry_set", 0),
    "get": ("get", 1),
    "iterateAll": ("iterate_all", 0),
    "keySet": ("key_set", 0),
    "put": ("put", 2),
    "putAll": ("put_all", 1),
    "remove": ("remove", 1),
    "values": ("values", 0),
}
_OP_TABLES = {
    InterfaceKind.SET: _SET_OPS,
    InterfaceKind.LIST: _LIST_OPS,
    InterfaceKind.MAP: _MAP_OPS,
}


@dataclass(frozen=True)
class MethodId:
    """One roster entry: an interface plus a method token."""

    interface: InterfaceKind
    name: str

    def __post_init__(self):
        if self.name not in ROSTERS[self.interface]:
            raise UnknownMethod(f"{self.name!r} is not a {self.interface.value} method")


@dataclass(frozen=True)
class ImplDescriptor:
    """Registry entry describing one concrete implementation."""

    id: str
    interface: InterfaceKind
    display_name: str
    notes: str = ""
    unsupported: frozenset[str] = field(default_factory=frozenset)


# --- functional digests -------------------------------------------------

DIGEST_IDENTITY = 0
_CHECKSUM_MASK = (1 << 64) - 1


def checksum_string(value: str) -> int:
    return zlib.crc32(value.encode("utf-8"))


def checksum_pair(key: str, value: str) -> int:
    return zlib.crc32(value.encode("utf-8"), zlib.crc32(key.encode("utf-8")))


def combine_unordered(checksums: Iterable[int]) -> int:
    """Commutative fold, so iteration order cannot leak into digests."""
    total = 0
    for c in checksums:
        total = (total + c) & _CHECKSUM_MASK
    return total


def fold_digest(digest: int, result) -> int:
    """Chain one dispatch result into a running script digest."""
    if result is None:
        payload = b"N"
    elif result is True:
        payload = b"T"
    elif result is False:
        payload = b"F"
    elif isinstance(result, int):
        payload = b"i%d" % result
    elif isinstance(result, str):
        payload = b"s" + result.encode("utf-8")
    else:
        raise TypeError(f"undigestable dispatch result {type(result).__name__}")
    return zlib.crc32(payload, digest)


# --- adapter base -------------------------------------------------------

_MISSING = object()


class Adapter:
    """Base for all collection adapters; subclasses fill in the roster ops."""

    interface: InterfaceKind

    def __init__(self, descriptor: ImplDescriptor):
        self.descriptor = descriptor

    def dispatch(self, method: str, args: tuple = ()):
        """Invoke one roster method and return its functional digest value."""
        table = _OP_TABLES[self.interface]
        if method not in table:
            raise UnknownMethod(f"{method!r} is not a {self.interface.value} method")
        if method in self.descriptor.unsupported:
            raise Unsupported(f"{self.descriptor.id} does not support {method}")
        attr, arity = table[method]
        if len(args) != arity:
            raise OperandMismatch(f"{method} takes {arity} operand(s), got {len(args)}")
        return getattr(self, attr)(*args)

    def populate(self, items):
        """Bulk-fill an empty adapter; always outside the measured region."""
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError

    def snapshot(self):
        """Canonical content: sorted elements (Set), sequence (List), sorted pairs (Map)."""
        raise NotImplementedError


# --- Set adapters -------------------------------------------------------

class SetAdapter(Adapter):
    interface = InterfaceKind.SET

    def populate(self, items):
        for item in items:
            self.add(item)

    def snapshot(self):
        return sorted(self._iter_elements())

    def iterate_all(self) -> int:
        return combine_unordered(checksum_string(e) for e in self._iter_elements())

    def iterator(self) -> int:
        iter(self._iter_elements())
        return 1

    def to_array(self) -> int:
        return len(list(self._iter_elements()))

    def _iter_elements(self):
        raise NotImplementedError


class HashSetAdapter(SetAdapter):
    """Builtin ``set``: open-addressed hash table."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: set[str] = set()

    def populate(self, items):
        self._items.update(items)

    def size(self):
        return len(self._items)

    def _iter_elements(self):
        return self._items

    def add(self, e):
        before = len(self._items)
        self._items.add(e)
        return len(self._items) != before

    def add_all(self, items):
        before = len(self._items)
        self._items.update(items)
        return len(self._items) != before

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains(self, e):
        return e in self._items

    def contains_all(self, items):
        return self._items.issuperset(items)

    def remove(self, e):
        before = len(self._items)
        self._items.discard(e)
        return len(self._items) != before

    def remove_all(self, items):
        before = len(self._items)
        self._items.difference_update(items)
        return len(self._items) != before

    def retain_all(self, items):
        before = len(self._items)
        self._items.intersection_update(items)
        return len(self._items) != before


class OrderedSetAdapter(SetAdapter):
    """Insertion-ordered set backed by dict keys."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: dict[str, None] = {}

    def populate(self, items):
        self._items.update(dict.fromkeys(items))

    def size(self):
        return len(self._items)

    def _iter_elements(self):
        return self._items

    def add(self, e):
        if e in self._items:
            return False
        self._items[e] = None
        return True

    def add_all(self, items):
        before = len(self._items)
        self._items.update(dict.fromkeys(items))
        return len(self._items) != before

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains(self, e):
        return e in self._items

    def contains_all(self, items):
        return all(e in self._items for e in items)

    def remove(self, e):
        return self._items.pop(e, _MISSING) is not _MISSING

    def remove_all(self, items):
        changed = False
        for e in items:
            if self._items.pop(e, _MISSING) is not _MISSING:
                changed = True
        return changed

    def retain_all(self, items):
        keep = set(items)
        before = len(self._items)
        self._items = {e: None for e in self._items if e in keep}
        return len(self._items) != before


class SortedArraySetAdapter(SetAdapter):
    """Sorted dynamic array with binary-search membership."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: list[str] = []

    def populate(self, items):
        self._items = sorted(items)

    def size(self):
        return len(self._items)

    def _iter_elements(self):
        return self._items

    def _locate(self, e):
        i = bisect_left(self._items, e)
        return i, i < len(self._items) and self._items[i] == e

    def add(self, e):
        i, present = self._locate(e)
        if present:
            return False
        self._items.insert(i, e)
        return True

    def add_all(self, items):
        changed = False
        for e in items:
            if self.add(e):
                changed = True
        return changed

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains(self, e):
        return self._locate(e)[1]

    def contains_all(self, items):
        return all(self.contains(e) for e in items)

    def remove(self, e):
        i, present = self._locate(e)
        if present:
            self._items.pop(i)
        return present

    def remove_all(self, items):
        drop = set(items)
        before = len(self._items)
        self._items = [e for e in self._items if e not in drop]
        return len(self._items) != before

    def retain_all(self, items):
        keep = set(items)
        before = len(self._items)
        self._items = [e for e in self._items if e in keep]
        return len(self._items) != before


class ArraySetAdapter(SetAdapter):
    """Unsorted array with linear-scan membership (copy-on-write style layout)."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: list[str] = []

    def size(self):
        return len(self._items)

    def _iter_elements(self):
        return self._items

    def add(self, e):
        if e in self._items:
            return False
        self._items.append(e)
        return True

    def add_all(self, items):
        changed = False
        for e in items:
            if self.add(e):
                changed = True
        return changed

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains(self, e):
        return e in self._items

    def contains_all(self, items):
        return all(e in self._items for e in items)

    def remove(self, e):
        try:
            self._items.remove(e)
            return True
        except ValueError:
            return False

    def remove_all(self, items):
        drop = set(items)
        before = len(self._items)
        self._items = [e for e in self._items if e not in drop]
        return len(self._items) != before

    def retain_all(self, items):
        keep = set(items)
        before = len(self._items)
        self._items = [e for e in self._items if e in keep]
        return len(self._items) != before


# --- List adapters ------------------------------------------------------

class ListAdapter(Adapter):
    interface = InterfaceKind.LIST

    def populate(self, items):
        for item in items:
            self.add(item)

    def iterator(self) -> int:
        iter(self._iter_elements())
        return 1

    def list_iterator(self) -> int:
        iter(self._iter_elements())
        return 1

    def to_array(self) -> int:
        return len(list(self._iter_elements()))

    def snapshot(self):
        return list(self._iter_elements())

    def _iter_elements(self):
        raise NotImplementedError


class ArrayListAdapter(ListAdapter):
    """Builtin ``list``: contiguous dynamic array."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: list[str] = []

    def populate(self, items):
        self._items.extend(items)

    def size(self):
        return len(self._items)

    def _iter_elements(self):
        return self._items

    def add(self, e):
        self._items.append(e)
        return True

    def add_all(self, items):
        before = len(self._items)
        self._items.extend(items)
        return len(self._items) != before

    def add_at_index(self, i, e):
        self._items.insert(i, e)
        return len(self._items)

    def add_all_at_index(self, i, items):
        before = len(self._items)
        self._items[i:i] = list(items)
        return len(self._items) != before

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains(self, e):
        return e in self._items

    def contains_all(self, items):
        return all(e in self._items for e in items)

    def get(self, i):
        return self._items[i]

    def index_of(self, e):
        try:
            return self._items.index(e)
        except ValueError:
            return -1

    def last_index_of(self, e):
        for pos in range(len(self._items) - 1, -1, -1):
            if self._items[pos] == e:
                return pos
        return -1

    def list_iterator_at_index(self, i):
        # Random access: positioning is O(1).
        return i

    def remove(self, e):
        try:
            self._items.remove(e)
            return True
        except ValueError:
            return False

    def remove_all(self, items):
        drop = set(items)
        before = len(self._items)
        self._items = [x for x in self._items if x not in drop]
        return len(self._items) != before

    def remove_at_index(self, i):
        return self._items.pop(i)

    def retain_all(self, items):
        keep = set(items)
        before = len(self._items)
        self._items = [x for x in self._items if x in keep]
        return len(self._items) != before

    def set_element(self, i, e):
        prev = self._items[i]
        self._items[i] = e
        return prev

    def sublist(self, i, j):
        return len(self._items[i:j])


class DequeListAdapter(ListAdapter):
    """``collections.deque``: doubly-linked list of fixed-size blocks."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: deque[str] = deque()

    def populate(self, items):
        self._items.extend(items)

    def size(self):
        return len(self._items)

    def _iter_elements(self):
        return self._items

    def add(self, e):
        self._items.append(e)
        return True

    def add_all(self, items):
        before = len(self._items)
        self._items.extend(items)
        return len(self._items) != before

    def add_at_index(self, i, e):
        self._items.insert(i, e)
        return len(self._items)

    def add_all_at_index(self, i, items):
        inserted = list(items)
        if not inserted:
            return False
        self._items.rotate(-i)
        self._items.extendleft(reversed(inserted))
        self._items.rotate(i)
        return True

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains(self, e):
        return e in self._items

    def contains_all(self, items):
        return all(e in self._items for e in items)

    def get(self, i):
        return self._items[i]

    def index_of(self, e):
        try:
            return self._items.index(e)
        except ValueError:
            return -1

    def last_index_of(self, e):
        size = len(self._items)
        for offset, value in enumerate(reversed(self._items), start=1):
            if value == e:
                return size - offset
        return -1

    def list_iterator_at_index(self, i):
        for _ in islice(self._items, i):
            pass
        return i

    def remove(self, e):
        try:
            self._items.remove(e)
            return True
        except ValueError:
            return False

    def remove_all(self, items):
        drop = set(items)
        before = len(self._items)
        self._items = deque(x for x in self._items if x not in drop)
        return len(self._items) != before

    def remove_at_index(self, i):
        value = self._items[i]
        del self._items[i]
        return value

    def retain_all(self, items):
        keep = set(items)
        before = len(self._items)
        self._items = deque(x for x in self._items if x in keep)
        return len(self._items) != before

    def set_element(self, i, e):
        prev = self._items[i]
        self._items[i] = e
        return prev

    def sublist(self, i, j):
        return len(list(islice(self._items, i, max(i, j))))


class _Node:
    __slots__ = ("value", "prev", "next")

    def __init__(self, value=None):
        self.value = value
        self.prev: _Node | None = None
        self.next: _Node | None = None


class LinkedListAdapter(ListAdapter):
    """Node-per-element doubly-linked list with sentinel endpoints."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._head = _Node()
        self._tail = _Node()
        self._head.next = self._tail
        self._tail.prev = self._head
        self._size = 0

    def size(self):
        return self._size

    def _iter_elements(self):
        node = self._head.next
        while node is not self._tail:
            yield node.value
            node = node.next

    def _node_at(self, i):
        # Walk from the nearer end, mirroring classic linked-list positioning.
        if not 0 <= i < self._size:
            raise IndexError(i)
        if i < self._size // 2:
            node = self._head.next
            for _ in range(i):
                node = node.next
        else:
            node = self._tail.prev
            for _ in range(self._size - 1 - i):
                node = node.prev
        return node

    def _insert_before(self, anchor, value):
        node = _Node(value)
        node.prev = anchor.prev
        node.next = anchor
        anchor.prev.next = node
        anchor.prev = node
        self._size += 1

    def _unlink(self, node):
        node.prev.next = node.next
        node.next.prev = node.prev
        self._size -= 1
        return node.value

    def add(self, e):
        self._insert_before(self._tail, e)
        return True

    def add_all(self, items):
        added = False
        for e in items:
            self._insert_before(self._tail, e)
            added = True
        return added

    def add_at_index(self, i, e):
        anchor = self._tail if i == self._size else self._node_at(i)
        self._insert_before(anchor, e)
        return self._size

    def add_all_at_index(self, i, items):
        anchor = self._tail if i == self._size else self._node_at(i)
        added = False
        for e in items:
            self._insert_before(anchor, e)
            added = True
        return added

    def clear(self):
        removed = self._size
        self._head.next = self._tail
        self._tail.prev = self._head
        self._size = 0
        return removed

    def contains(self, e):
        return any(value == e for value in self._iter_elements())

    def contains_all(self, items):
        return all(self.contains(e) for e in items)

    def get(self, i):
        return self._node_at(i).value

    def index_of(self, e):
        for pos, value in enumerate(self._iter_elements()):
            if value == e:
                return pos
        return -1

    def last_index_of(self, e):
        node = self._tail.prev
        pos = self._size - 1
        while node is not self._head:
            if node.value == e:
                return pos
            node = node.prev
            pos -= 1
        return -1

    def list_iterator_at_index(self, i):
        if i < self._size:
            self._node_at(i)
        return i

    def remove(self, e):
        node = self._head.next
        while node is not self._tail:
            if node.value == e:
                self._unlink(node)
                return True
            node = node.next
        return False

    def remove_all(self, items):
        drop = set(items)
        changed = False
        node = self._head.next
        while node is not self._tail:
            nxt = node.next
            if node.value in drop:
                self._unlink(node)
                changed = True
            node = nxt
        return changed

    def remove_at_index(self, i):
        return self._unlink(self._node_at(i))

    def retain_all(self, items):
        keep = set(items)
        changed = False
        node = self._head.next
        while node is not self._tail:
            nxt = node.next
            if node.value not in keep:
                self._unlink(node)
                changed = True
            node = nxt
        return changed

    def set_element(self, i, e):
        node = self._node_at(i)
        prev = node.value
        node.value = e
        return prev

    def sublist(self, i, j):
        if i >= self._size:
            return 0
        count = 0
        node = self._node_at(i)
        pos = i
        while node is not self._tail and pos < j:
            count += 1
            pos += 1
            node = node.next
        return count


# --- Map adapters -------------------------------------------------------

class MapAdapter(Adapter):
    interface = InterfaceKind.MAP

    def populate(self, pairs):
        for k, v in pairs:
            self.put(k, v)

    def snapshot(self):
        return sorted(self._iter_entries())

    def iterate_all(self) -> int:
        return combine_unordered(checksum_pair(k, v) for k, v in self._iter_entries())

    def _iter_entries(self):
        raise NotImplementedError


class HashMapAdapter(MapAdapter):
    """Builtin ``dict``: open-addressed hash table."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items: dict[str, str] = {}

    def populate(self, pairs):
        self._items.update(pairs)

    def size(self):
        return len(self._items)

    def _iter_entries(self):
        return self._items.items()

    def clear(self):
        removed = len(self._items)
        self._items.clear()
        return removed

    def contains_key(self, k):
        return k in self._items

    def contains_value(self, v):
        return v in self._items.values()

    def entry_set(self):
        return len(self._items.items())

    def get(self, k):
        return self._items.get(k)

    def key_set(self):
        return len(self._items.keys())

    def put(self, k, v):
        prev = self._items.get(k)
        self._items[k] = v
        return prev

    def put_all(self, pairs):
        self._items.update(pairs)
        return len(self._items)

    def remove(self, k):
        return self._items.pop(k, None)

    def values(self):
        return len(self._items.values())


class OrderedMapAdapter(HashMapAdapter):
    """``collections.OrderedDict``: hash table threaded on a doubly-linked list."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._items = OrderedDict()


class SortedArrayMapAdapter(MapAdapter):
    """Key-sorted parallel arrays with binary-search lookup."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self._keys: list[str] = []
        self._values: list[str] = []

    def populate(self, pairs):
        ordered = sorted(pairs)
        self._keys = [k for k, _ in ordered]
        self._values = [v for _, v in ordered]

    def size(self):
        return len(self._keys)

    def _iter_entries(self):
        return zip(self._keys, self._values)

    def _locate(self, k):
        i = bisect_left(self._keys, k)
        return i, i < len(self._keys) and self._keys[i] == k

    def clear(self):
        removed = len(self._keys)
        self._keys.clear()
        self._values.clear()
        return removed

    def contains_key(self, k):
        return self._locate(k)[1]

    def contains_value(self, v):
        return v in self._values

    def entry_set(self):
        return len(self._keys)

    def get(self, k):
        i, present = self._locate(k)
        return self._values[i] if present else None

    def key_set(self):
        return len(self._keys)

    def put(self, k, v):
        i, present = self._locate(k)
        if present:
            prev = self._values[i]
            self._values[i] = v
            return prev
        self._keys.insert(i, k)
        self._values.insert(i, v)
        return None

    def put_all(self, pairs):
        for k, v in pairs:
            self.put(k, v)
        return len(self._keys)

    def remove(self, k):
        i, present = self._locate(k)
        if not present:
            return None
        self._keys.pop(i)
        return self._values.pop(i)

    def values(self):
        return len(self._values)


# --- registry -----------------------------------------------------------

_BUILTIN_ENTRIES: list[tuple[ImplDescriptor, Callable[[ImplDescriptor], Adapter]]] = [
    (
        ImplDescriptor("hash-set", InterfaceKind.SET, "Hash set (builtin set)",
                       notes="open-addressed hash table"),
        HashSetAdapter,
    ),
    (
        ImplDescriptor("ordered-set", InterfaceKind.SET, "Insertion-ordered set (dict keys)",
                       notes="hash table preserving insertion order; adapter_synthesized: retainAll, containsAll"),
        OrderedSetAdapter,
    ),
    (
        ImplDescriptor("sorted-array-set", InterfaceKind.SET, "Sorted-array set (bisect)",
                       notes="in-repo sorted dynamic array; adapter_synthesized: addAll, removeAll, retainAll, containsAll"),
        SortedArraySetAdapter,
    ),
    (
        ImplDescriptor("array-set", InterfaceKind.SET, "Array set (linear scans)",
                       notes="unsorted array, O(n) membership; expect timeouts at large popsizes; "
                             "adapter_synthesized: addAll, removeAll, retainAll, containsAll"),
        ArraySetAdapter,
    ),
    (
        ImplDescriptor("array-list", InterfaceKind.LIST, "Array list (builtin list)",
                       notes="contiguous dynamic array; adapter_synthesized: lastIndexOf; sublist copies"),
        ArrayListAdapter,
    ),
    (
        ImplDescriptor("deque-list", InterfaceKind.LIST, "Deque list (collections.deque)",
                       notes="block-linked deque; adapter_synthesized: addAllAtIndex, lastIndexOf, removeAll, retainAll, sublist"),
        DequeListAdapter,
    ),
    (
        ImplDescriptor("linked-list", InterfaceKind.LIST, "Linked list (node per element)",
                       notes="in-repo doubly-linked list with sentinel nodes"),
        LinkedListAdapter,
    ),
    (
        ImplDescriptor("hash-map", InterfaceKind.MAP, "Hash map (builtin dict)",
                       notes="open-addressed hash table"),
        HashMapAdapter,
    ),
    (
        ImplDescriptor("ordered-map", InterfaceKind.MAP, "Ordered map (OrderedDict)",
                       notes="hash table threaded on a doubly-linked list"),
        OrderedMapAdapter,
    ),
    (
        ImplDescriptor("sorted-array-map", InterfaceKind.MAP, "Sorted-array map (bisect)",
                       notes="in-repo key-sorted parallel arrays; adapter_synthesized: putAll"),
        SortedArrayMapAdapter,
    ),
]

_registry: dict[str, tuple[ImplDescriptor, Callable[[ImplDescriptor], Adapter]]] = {
    descriptor.id: (descriptor, factory) for descriptor, factory in _BUILTIN_ENTRIES
}


def registry(interface: InterfaceKind | None = None) -> list[ImplDescriptor]:
    """All registered implementations in stable registration order."""
    descriptors = [descriptor for descriptor, _ in _registry.values()]
    if interface is not None:
        descriptors = [d for d in descriptors if d.interface == interface]
    return descriptors


def register(descriptor: ImplDescriptor, factory: Callable[[ImplDescriptor], Adapter]) -> None:
    """Add an implementation (used by tests and extensions)."""
    if descriptor.id in _registry:
        raise ValueError(f"implementation id {descriptor.id!r} already registered")
    _registry[descriptor.id] = (descriptor, factory)


def unregister(impl_id: str) -> None:
    if impl_id not in _registry:
        raise UnknownImplementation(impl_id)
    del _registry[impl_id]


def construct(descriptor: ImplDescriptor) -> Adapter:
    """Build an empty adapter for a registered descriptor."""
    entry = _registry.get(descriptor.id)
    if entry is None or entry[0].interface != descriptor.interface:
        raise UnknownImplementation(descriptor.id)
    registered, factory = entry
    return factory(registered)


def registry_document() -> dict:
    """Canonical document listing every registered implementation."""
    return {
        "schema_version": 1,
        "implementations": [
            {
                "id": d.id,
                "interface": d.interface.value,
                "display_name": d.display_name,
                "notes": d.notes,
                "unsupported": sorted(d.unsupported),
            }
            for d in registry()
        ],
    }
