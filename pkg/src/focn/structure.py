"""Immutable relational structures with a metered local-access interface.

A structure is loaded (or built) once; afterwards algorithms that claim to be
local are only allowed two kinds of queries: neighbor lists in the Gaifman
graph and tuple-membership tests.  Both are counted by an access meter so a
caller can certify that a run touched a bounded number of elements,
independent of the size of the universe.  Building the adjacency index at
load time is a global pass and deliberately not counted.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import FocnError, ParseError

# Words that structure the text format or the formula syntax; they cannot be
# used as relation names.
RESERVED_WORDS = frozenset(
    {"signature", "relation", "tuples", "element", "exists", "forall",
     "existsN", "sphere", "hypothesis", "end"}
)


@dataclass(frozen=True)
class Signature:
    """Relation names with arities.  Purely relational, no constants."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.relations:
            if not name or any(ch.isspace() for ch in name):
                raise FocnError(f"bad relation name {name!r}")
            if name in RESERVED_WORDS:
                raise FocnError(f"relation name {name!r} is reserved")
            if name in seen:
                raise FocnError(f"duplicate relation name {name!r}")
            if arity < 1:
                raise FocnError(f"relation {name!r} needs arity >= 1, got {arity}")
            seen.add(name)

    def arity(self, name: str) -> int:
        for rel, ar in self.relations:
            if rel == name:
                return ar
        raise FocnError(f"unknown relation {name!r}")

    def has_relation(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(rel for rel, _ in self.relations)

    def sorted_relations(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted(self.relations))


@dataclass(frozen=True)
class AccessReceipt:
    """Counts of local-access queries issued since the last reset."""

    neighbor_queries: int
    tuple_queries: int

    def __sub__(self, other: "AccessReceipt") -> "AccessReceipt":
        return AccessReceipt(
            self.neighbor_queries - other.neighbor_queries,
            self.tuple_queries - other.tuple_queries,
        )


class _AccessMeter:
    """Thread-safe counters; exact totals under concurrent readers."""

    def __init__(self):
        self._lock = threading.Lock()
        self._neighbor = 0
        self._tuple = 0

    def count_neighbor(self):
        with self._lock:
            self._neighbor += 1

    def count_tuple(self):
        with self._lock:
            self._tuple += 1

    def snapshot(self) -> AccessReceipt:
        with self._lock:
            return AccessReceipt(self._neighbor, self._tuple)

    def reset(self):
        with self._lock:
            self._neighbor = 0
            self._tuple = 0


class Structure:
    """A finite relational structure over a fixed signature.

    Elements are dense integer ids 0..n-1; external names are kept for I/O.
    The Gaifman graph has an edge between two distinct elements whenever they
    occur together in some relation tuple (repeated entries do not create
    self-edges).  Instances are immutable apart from the access meter.
    """

    def __init__(self, signature: Signature, names: tuple[str, ...],
                 relations: dict, adjacency: tuple):
        # Built via build_structure / load_structure, not directly.
        self.signature = signature
        self._names = names
        self._index = {nm: i for i, nm in enumerate(names)}
        self._relations = relations          # name -> frozenset of id tuples
        self._adjacency = adjacency          # id -> sorted tuple of ids
        self._meter = _AccessMeter()

    # -- universe --------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._names)

    def elements(self) -> range:
        return range(len(self._names))

    def name(self, uid: int) -> str:
        self._check_element(uid)
        return self._names[uid]

    def uid(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise FocnError(f"unknown element {name!r}") from None

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def _check_element(self, uid):
        if not isinstance(uid, int) or not 0 <= uid < len(self._names):
            raise FocnError(f"unknown element id {uid!r}")

    # -- global accessors (not metered; harness/evaluator use only) -------

    def relation(self, name: str) -> frozenset:
        """Full tuple set of a relation.  Global access, not metered."""
        if name not in self._relations:
            raise FocnError(f"unknown relation {name!r}")
        return self._relations[name]

    def relation_sizes(self) -> dict:
        return {name: len(ts) for name, ts in self._relations.items()}

    def max_degree(self) -> int:
        """Maximum Gaifman degree.  Global scan, not metered."""
        if not self._adjacency:
            return 0
        return max(len(a) for a in self._adjacency)

    # -- metered local access ---------------------------------------------

    def neighbors(self, uid: int) -> tuple[int, ...]:
        """Gaifman neighbors of an element, sorted by id.  Metered."""
        self._check_element(uid)
        self._meter.count_neighbor()
        return self._adjacency[uid]

    def has_tuple(self, relation: str, entries: tuple) -> bool:
        """Tuple-membership test.  Metered."""
        if relation not in self._relations:
            raise FocnError(f"unknown relation {relation!r}")
        arity = self.signature.arity(relation)
        if len(entries) != arity:
            raise FocnError(
                f"arity mismatch for {relation!r}: expected {arity}, got {len(entries)}")
        for e in entries:
            self._check_element(e)
        self._meter.count_tuple()
        return tuple(entries) in self._relations[relation]

    def ball(self, centers: Sequence[int], radius: int) -> tuple[int, ...]:
        """All elements within the given distance of any center.

        Order is (BFS layer, element id), which makes the result, and every
        construction derived from it, deterministic.  Runs on neighbor
        queries only, so the cost depends on the ball, not the universe.
        """
        if radius < 0:
            raise FocnError(f"negative radius {radius}")
        if not centers:
            raise FocnError("ball needs at least one center")
        for c in centers:
            self._check_element(c)
        layer = sorted(set(centers))
        seen = set(layer)
        order = list(layer)
        for _ in range(radius):
            if not layer:
                break
            nxt = set()
            for u in layer:
                for v in self.neighbors(u):
                    if v not in seen:
                        nxt.add(v)
            layer = sorted(nxt)
            seen.update(layer)
            order.extend(layer)
        return tuple(order)

    # -- metering ----------------------------------------------------------

    def access_receipt(self) -> AccessReceipt:
        return self._meter.snapshot()

    def reset_access(self):
        self._meter.reset()

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        """Render in the structure text format; reloading reproduces ids."""
        lines = ["signature"]
        for name, arity in self.signature.relations:
            lines.append(f"relation {name} {arity}")
        lines.append("tuples")
        for nm in self._names:
            lines.append(f"element {nm}")
        for name, _ in self.signature.relations:
            for tup in sorted(self._relations[name]):
                lines.append(name + " " + " ".join(self._names[e] for e in tup))
        return "\n".join(lines) + "\n"


def build_structure(signature: Signature, element_names: Sequence[str],
                    relation_tuples: Mapping[str, Iterable[Sequence[str]]]) -> Structure:
    """Assemble a structure from element names and name-level tuples.

    The universe is the given element list, extended (in encounter order) by
    any tuple entry not already listed.  Element names must be whitespace-free
    tokens.
    """
    names: list[str] = []
    index: dict[str, int] = {}

    def intern(nm: str) -> int:
        if nm in index:
            return index[nm]
        if not nm or any(ch.isspace() for ch in nm):
            raise FocnError(f"bad element name {nm!r}")
        index[nm] = len(names)
        names.append(nm)
        return index[nm]

    for nm in element_names:
        if nm in index:
            raise FocnError(f"duplicate element {nm!r}")
        intern(nm)

    for rel in relation_tuples:
        if not signature.has_relation(rel):
            raise FocnError(f"unknown relation {rel!r}")

    rel_sets: dict[str, frozenset] = {}
    for rel, arity in signature.relations:
        tuples = set()
        for tup in relation_tuples.get(rel, ()):
            if len(tup) != arity:
                raise FocnError(
                    f"arity mismatch in {rel!r}: expected {arity}, got {len(tup)}")
            tuples.add(tuple(intern(nm) for nm in tup))
        rel_sets[rel] = frozenset(tuples)

    adj: list[set] = [set() for _ in names]
    for rel, tuples in rel_sets.items():
        for tup in tuples:
            distinct = set(tup)
            for a in distinct:
                for b in distinct:
                    if a != b:
                        adj[a].add(b)
    adjacency = tuple(tuple(sorted(s)) for s in adj)
    return Structure(signature, tuple(names), rel_sets, adjacency)


def load_structure(text: str) -> Structure:
    """Parse the structure text format.

    Layout: a `signature` section declaring `relation NAME ARITY` lines, then
    a `tuples` section with one tuple per line (`NAME e1 .. ek`) and optional
    `element NAME` lines for isolated elements.  `#` starts a comment.  The
    universe is every element name in order of first appearance.
    """
    sig_rels: list[tuple[str, int]] = []
    elements: list[str] = []
    element_seen: set[str] = set()
    tuples: dict[str, list] = {}
    section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "signature":
            if len(parts) != 1 or section is not None:
                raise ParseError("unexpected 'signature'", lineno)
            section = "signature"
        elif head == "tuples":
            if len(parts) != 1 or section != "signature":
                raise ParseError("unexpected 'tuples'", lineno)
            section = "tuples"
        elif section == "signature":
            if head != "relation" or len(parts) != 3:
                raise ParseError(f"expected 'relation NAME ARITY', got {line!r}", lineno)
            name = parts[1]
            try:
                arity = int(parts[2])
            except ValueError:
                raise ParseError(f"bad arity {parts[2]!r}", lineno) from None
            try:
                Signature(tuple(sig_rels) + ((name, arity),))
            except FocnError as exc:
                raise ParseError(str(exc), lineno) from None
            sig_rels.append((name, arity))
            tuples[name] = []
        elif section == "tuples":
            if head == "element":
                if len(parts) != 2:
                    raise ParseError("expected 'element NAME'", lineno)
                if parts[1] not in element_seen:
                    element_seen.add(parts[1])
                    elements.append(parts[1])
            elif head in tuples:
                arity = dict(sig_rels)[head]
                if len(parts) - 1 != arity:
                    raise ParseError(
                        f"arity mismatch for {head!r}: expected {arity} entries, "
                        f"got {len(parts) - 1}", lineno)
                for nm in parts[1:]:
                    if nm not in element_seen:
                        element_seen.add(nm)
                        elements.append(nm)
                tuples[head].append(tuple(parts[1:]))
            else:
                raise ParseError(f"undeclared relation {head!r}", lineno)
        else:
            raise ParseError(f"content before 'signature': {line!r}", lineno)

    if section != "tuples":
        raise ParseError("missing 'signature'/'tuples' sections", 1)
    return build_structure(Signature(tuple(sig_rels)), elements, tuples)
