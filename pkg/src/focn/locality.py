"""Neighborhood spheres, center-respecting isomorphism, canonical keys.

A sphere is the induced substructure on the ball of one or more centers,
detached from global element names: its universe is re-indexed 0..m-1 in BFS
discovery order.  Two spheres are compared only up to isomorphisms that fix
each center position, i.e. treat the i-th center as a distinguished constant.

Isomorphism testing and canonical forms both run on a color-refinement
partition of an incidence graph (elements plus one node per relation tuple,
with position-labelled incidences), individualizing elements when refinement
stalls.  The incidence encoding keeps arities above two honest.  The
canonical key of a sphere is the serialized text of its canonical relabeling,
so keys are equal exactly when spheres are isomorphic, and a key doubles as a
readable witness.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import FocnError, ParseError, SphereShapeError
from .structure import Signature, Structure


@dataclass(frozen=True)
class Sphere:
    """An r-type: local universe 0..size-1, relations, centers, radius.

    `relations` is stored name-sorted for stable equality and hashing.
    Invariant: the local universe equals the ball of the centers at the
    stated radius inside the sphere itself (checked on construction).
    """

    signature: Signature
    size: int
    relations: tuple[tuple[str, frozenset], ...]
    centers: tuple[int, ...]
    radius: int

    @staticmethod
    def make(signature: Signature, size: int,
             relations: Mapping[str, Iterable[tuple[int, ...]]],
             centers: Sequence[int], radius: int) -> "Sphere":
        if size < 0:
            raise FocnError("negative sphere size")
        if radius < 0:
            raise FocnError("negative sphere radius")
        if not centers:
            raise FocnError("a sphere needs at least one center")
        for c in centers:
            if not 0 <= c < size:
                raise FocnError(f"center {c} outside local universe")
        # Normalize the signature to name order so spheres compare equal no
        # matter which declaration order their source structure used.
        signature = Signature(tuple(sorted(signature.relations)))
        rel_map: dict[str, frozenset] = {name: frozenset() for name, _ in signature.relations}
        for name, tuples in relations.items():
            arity = signature.arity(name)
            ts = set()
            for tup in tuples:
                if len(tup) != arity:
                    raise FocnError(f"arity mismatch in sphere relation {name!r}")
                for e in tup:
                    if not 0 <= e < size:
                        raise FocnError(f"sphere tuple entry {e} out of range")
                ts.add(tuple(tup))
            rel_map[name] = frozenset(ts)
        sphere = Sphere(signature, size,
                        tuple(sorted(rel_map.items())), tuple(centers), radius)
        covered = _local_ball(sphere)
        if covered != set(range(size)):
            raise FocnError(
                "sphere universe is not the ball of its centers at its radius")
        return sphere

    def relation(self, name: str) -> frozenset:
        for rel, tuples in self.relations:
            if rel == name:
                return tuples
        raise FocnError(f"unknown relation {name!r}")


def _local_adjacency(sphere: Sphere) -> list[set]:
    adj: list[set] = [set() for _ in range(sphere.size)]
    for _, tuples in sphere.relations:
        for tup in tuples:
            distinct = set(tup)
            for a in distinct:
                for b in distinct:
                    if a != b:
                        adj[a].add(b)
    return adj


def _local_ball(sphere: Sphere) -> set:
    adj = _local_adjacency(sphere)
    seen = set(sphere.centers)
    layer = set(sphere.centers)
    for _ in range(sphere.radius):
        layer = {v for u in layer for v in adj[u]} - seen
        if not layer:
            break
        seen |= layer
    return seen


def _local_distances(sphere: Sphere) -> list[int]:
    """BFS distance of each local element from the center set."""
    adj = _local_adjacency(sphere)
    dist = [None] * sphere.size
    layer = sorted(set(sphere.centers))
    for c in layer:
        dist[c] = 0
    d = 0
    while layer:
        d += 1
        nxt = []
        for u in layer:
            for v in adj[u]:
                if dist[v] is None:
                    dist[v] = d
                    nxt.append(v)
        layer = nxt
    return dist


# ---------------------------------------------------------------------------
# extraction

def extract_sphere(structure: Structure, centers: Sequence[int], radius: int) -> Sphere:
    """Extract the radius-sphere around a tuple using local access only.

    Cost is polynomial in the ball: one neighbor query per ball element (on
    top of the BFS) and one membership query per candidate tuple, where
    candidates are the tuples over ball elements whose distinct entries are
    pairwise adjacent (any relation tuple satisfies this by construction of
    the Gaifman graph).
    """
    order = structure.ball(tuple(centers), radius)
    index = {g: i for i, g in enumerate(order)}
    ball_set = set(order)
    allowed: dict[int, set] = {}
    for g in order:
        allowed[g] = (set(structure.neighbors(g)) & ball_set) | {g}

    relations: dict[str, set] = {}
    for name, arity in structure.signature.relations:
        found = set()
        if arity == 1:
            for g in order:
                if structure.has_tuple(name, (g,)):
                    found.add((index[g],))
        else:
            def extend(prefix: tuple, feas: set):
                if len(prefix) == arity:
                    if structure.has_tuple(name, prefix):
                        found.add(tuple(index[g] for g in prefix))
                    return
                for g in sorted(feas):
                    extend(prefix + (g,), feas & allowed[g])
            for g in order:
                extend((g,), allowed[g])
        relations[name] = found

    return Sphere.make(structure.signature, len(order), relations,
                       tuple(index[c] for c in centers), radius)


# ---------------------------------------------------------------------------
# refinement machinery

class _Incidence:
    """Element and tuple nodes of a sphere, with initial colors.

    Initial element colors already encode center positions and unary
    memberships, which is what makes every derived computation
    center-respecting.
    """

    def __init__(self, sphere: Sphere):
        self.sphere = sphere
        self.m = sphere.size
        centers_at = [[] for _ in range(sphere.size)]
        for pos, c in enumerate(sphere.centers):
            centers_at[c].append(pos)
        unary = [[] for _ in range(sphere.size)]
        self.tnodes: list[tuple[str, tuple[int, ...]]] = []
        for name, tuples in sphere.relations:
            if sphere.signature.arity(name) == 1:
                for (v,) in tuples:
                    unary[v].append(name)
            else:
                for tup in sorted(tuples):
                    self.tnodes.append((name, tup))
        self.elem_keys = [
            ("e", tuple(centers_at[v]), tuple(sorted(unary[v])))
            for v in range(sphere.size)
        ]
        self.tnode_keys = [("t", name) for name, _ in self.tnodes]
        self.elem_inc: list[list[tuple[int, int]]] = [[] for _ in range(sphere.size)]
        for t, (_, tup) in enumerate(self.tnodes):
            for pos, v in enumerate(tup):
                self.elem_inc[v].append((t, pos))

    def initial_colors(self, palette: dict) -> list[int]:
        keys = self.elem_keys + self.tnode_keys
        for k in sorted(set(keys)):
            palette.setdefault(k, len(palette))
        return [palette[k] for k in keys]


def _refine(inc: _Incidence, colors: list[int]) -> list[int]:
    """Stabilize colors.  Signatures include the previous color, so cells
    only ever split; new colors are ranks of sorted signatures, which keeps
    them comparable across isomorphic spheres."""
    m = inc.m
    while True:
        sigs = []
        for v in range(m):
            sigs.append((0, colors[v],
                         tuple(sorted((pos, colors[m + t]) for t, pos in inc.elem_inc[v]))))
        for t, (_, tup) in enumerate(inc.tnodes):
            sigs.append((1, colors[m + t], tuple(colors[e] for e in tup)))
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _element_cells(inc: _Incidence, colors: list[int]) -> dict[int, list[int]]:
    cells: dict[int, list[int]] = {}
    for v in range(inc.m):
        cells.setdefault(colors[v], []).append(v)
    return cells


def _individualize(colors: list[int], node: int) -> list[int]:
    out = list(colors)
    out[node] = max(colors) + 1
    return out


# ---------------------------------------------------------------------------
# canonical form

def _relabel(sphere: Sphere, perm: Sequence[int]) -> Sphere:
    """Apply old-id -> new-id map."""
    rels = {
        name: {tuple(perm[e] for e in tup) for tup in tuples}
        for name, tuples in sphere.relations
    }
    return Sphere.make(sphere.signature, sphere.size, rels,
                       tuple(perm[c] for c in sphere.centers), sphere.radius)


def serialize_sphere(sphere: Sphere) -> str:
    """Bit-exact text form: relations sorted by name, tuples lexicographic."""
    lines = ["sphere",
             f"radius {sphere.radius}",
             "centers " + " ".join(str(c) for c in sphere.centers),
             f"size {sphere.size}"]
    for name, arity in sphere.signature.sorted_relations():
        lines.append(f"relation {name} {arity}")
        for tup in sorted(sphere.relation(name)):
            lines.append(name + " " + " ".join(str(e) for e in tup))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_sphere(text: str) -> Sphere:
    """Inverse of serialize_sphere; accepts any consistent sphere block."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    it = iter(enumerate(lines, start=1))

    def take(expect: str):
        try:
            no, ln = next(it)
        except StopIteration:
            raise ParseError(f"sphere block ended early, expected {expect!r}") from None
        parts = ln.split()
        if parts[0] != expect:
            raise ParseError(f"expected {expect!r}, got {parts[0]!r}", no)
        return parts[1:]

    take("sphere")
    radius = int(take("radius")[0])
    centers = tuple(int(c) for c in take("centers"))
    size = int(take("size")[0])
    rels: dict[str, set] = {}
    sig: list[tuple[str, int]] = []
    current = None
    for no, ln in it:
        parts = ln.split()
        if parts[0] == "end":
            break
        if parts[0] == "relation":
            if len(parts) != 3:
                raise ParseError("expected 'relation NAME ARITY'", no)
            current = parts[1]
            sig.append((current, int(parts[2])))
            rels[current] = set()
        elif parts[0] == current:
            rels[current].add(tuple(int(x) for x in parts[1:]))
        else:
            raise ParseError(f"unexpected line {ln!r} in sphere block", no)
    else:
        raise ParseError("sphere block missing 'end'")
    return Sphere.make(Signature(tuple(sig)), size, rels, centers, radius)


@functools.lru_cache(maxsize=65536)
def canonical_form(sphere: Sphere) -> tuple[Sphere, bytes]:
    """Canonical relabeling and its serialized bytes.

    Recursively individualizes the first non-singleton element cell and keeps
    the lexicographically least certificate over all discrete leaves.  Both
    the branching cell and the color ranks are value-determined, hence
    isomorphism-invariant, so certificates agree exactly on isomorphic
    spheres.
    """
    inc = _Incidence(sphere)
    palette: dict = {}
    best: list = [None, None]

    def rec(colors: list[int]):
        colors = _refine(inc, colors)
        cells = _element_cells(inc, colors)
        target = None
        for color in sorted(cells):
            if len(cells[color]) > 1:
                target = color
                break
        if target is None:
            order = sorted(range(inc.m), key=lambda v: colors[v])
            perm = [0] * inc.m
            for new_id, old in enumerate(order):
                perm[old] = new_id
            cand = _relabel(sphere, perm)
            cert = serialize_sphere(cand).encode()
            if best[1] is None or cert < best[1]:
                best[0], best[1] = cand, cert
            return
        for v in sorted(cells[target]):
            rec(_individualize(colors, v))

    rec(inc.initial_colors(palette))
    return best[0], best[1]


def canonical_key(sphere: Sphere) -> bytes:
    """Opaque key with key equality iff center-respecting isomorphism."""
    return canonical_form(sphere)[1]


# ---------------------------------------------------------------------------
# isomorphism search

def _check_shape(a: Sphere, b: Sphere):
    if set(a.signature.relations) != set(b.signature.relations):
        raise SphereShapeError("spheres over different signatures")
    if len(a.centers) != len(b.centers):
        raise SphereShapeError(
            f"center count mismatch: {len(a.centers)} vs {len(b.centers)}")
    if a.radius != b.radius:
        raise SphereShapeError(f"radius mismatch: {a.radius} vs {b.radius}")


def spheres_isomorphic(a: Sphere, b: Sphere) -> bool:
    """Decide center-respecting isomorphism by paired refinement search.

    This is a genuine backtracking search (not a key comparison): refinement
    runs on both spheres with a shared palette, cells are matched by color,
    and every discrete branch is verified against the actual relations.
    """
    _check_shape(a, b)
    if a.size != b.size:
        return False
    if {n: len(t) for n, t in a.relations} != {n: len(t) for n, t in b.relations}:
        return False

    inc_a, inc_b = _Incidence(a), _Incidence(b)
    palette: dict = {}
    ca = inc_a.initial_colors(palette)
    cb = inc_b.initial_colors(palette)

    def refine_pair(c1: list[int], c2: list[int]):
        while True:
            sigs1 = _pair_sigs(inc_a, c1)
            sigs2 = _pair_sigs(inc_b, c2)
            rank = {s: i for i, s in enumerate(sorted(set(sigs1) | set(sigs2)))}
            n1 = [rank[s] for s in sigs1]
            n2 = [rank[s] for s in sigs2]
            if _counts(n1) != _counts(n2):
                return None
            if len(set(n1)) == len(set(c1)) and len(set(n2)) == len(set(c2)):
                return n1, n2
            c1, c2 = n1, n2

    def rec(c1: list[int], c2: list[int]) -> bool:
        refined = refine_pair(c1, c2)
        if refined is None:
            return False
        c1, c2 = refined
        cells1 = _element_cells(inc_a, c1)
        cells2 = _element_cells(inc_b, c2)
        target = None
        for color in sorted(cells1):
            if len(cells1[color]) > 1:
                target = color
                break
        if target is None:
            mapping = [None] * a.size
            by_color = {c2[v]: v for v in range(b.size)}
            for u in range(a.size):
                v = by_color.get(c1[u])
                if v is None:
                    return False
                mapping[u] = v
            return _verify_iso(a, b, mapping)
        u = min(cells1[target])
        for v in cells2.get(target, ()):
            if rec(_individualize(c1, u), _individualize(c2, v)):
                return True
        return False

    return rec(ca, cb)


def _pair_sigs(inc: _Incidence, colors: list[int]):
    sigs = []
    for v in range(inc.m):
        sigs.append((0, colors[v],
                     tuple(sorted((pos, colors[inc.m + t]) for t, pos in inc.elem_inc[v]))))
    for t, (_, tup) in enumerate(inc.tnodes):
        sigs.append((1, colors[inc.m + t], tuple(colors[e] for e in tup)))
    return sigs


def _counts(colors: list[int]) -> dict:
    out: dict = {}
    for c in colors:
        out[c] = out.get(c, 0) + 1
    return out


def _verify_iso(a: Sphere, b: Sphere, mapping: list[int]) -> bool:
    if sorted(mapping) != list(range(b.size)):
        return False
    for pos in range(len(a.centers)):
        if mapping[a.centers[pos]] != b.centers[pos]:
            return False
    for name, tuples in a.relations:
        image = {tuple(mapping[e] for e in tup) for tup in tuples}
        if image != set(b.relation(name)):
            return False
    return True


# ---------------------------------------------------------------------------
# sphere formulas

def evaluate_sphere_formula(structure: Structure, sphere: Sphere,
                            anchors: Sequence[int]) -> int:
    """1 iff the sphere around the anchor tuple is isomorphic to `sphere`.

    Uses local access only (extraction plus isomorphism on the extracted
    part).  The anchor tuple length must match the sphere's center count.
    """
    if len(anchors) != len(sphere.centers):
        raise FocnError(
            f"anchor tuple has {len(anchors)} entries for a "
            f"{len(sphere.centers)}-center sphere")
    extracted = extract_sphere(structure, tuple(anchors), sphere.radius)
    return int(spheres_isomorphic(extracted, sphere))


DEFAULT_RENDER_CAP = 12


def render_sphere_formula(sphere: Sphere, cap: int = DEFAULT_RENDER_CAP,
                          center_vars: Optional[Sequence[str]] = None) -> str:
    """First-order text whose models are exactly the anchor tuples whose
    sphere is isomorphic to this one.

    The formula binds one variable per local element and asserts pairwise
    distinctness, the exact relational diagram (positive and negative
    literals), identification of the free center variables, and a closure
    clause: every element strictly inside the radius has no neighbors beyond
    its local ones.  Formula size is exponential in relation arity, so the
    local universe is capped.
    """
    m = sphere.size
    if m > cap:
        raise FocnError(f"sphere size {m} exceeds render cap {cap}")
    taken = set(sphere.signature.names)
    if center_vars is None:
        center_vars = [_fresh(f"x{i + 1}", taken) for i in range(len(sphere.centers))]
    elif len(center_vars) != len(sphere.centers):
        raise FocnError("need one center variable per center")
    evars = [_fresh(f"u{i}", taken) for i in range(m)]
    zvar = _fresh("z", taken)

    parts: list[str] = []
    for i in range(m):
        for j in range(i + 1, m):
            parts.append(f"!({evars[i]} = {evars[j]})")
    for pos, c in enumerate(sphere.centers):
        parts.append(f"{center_vars[pos]} = {evars[c]}")
    for name, arity in sphere.signature.sorted_relations():
        present = sphere.relation(name)
        for tup in itertools.product(range(m), repeat=arity):
            atom = f"{name}({','.join(evars[e] for e in tup)})"
            parts.append(atom if tup in present else f"!{atom}")

    dist = _local_distances(sphere)
    adj = _local_adjacency(sphere)
    for i in range(m):
        if dist[i] >= sphere.radius:
            continue
        adjacency = _adjacent_text(sphere.signature, evars[i], zvar, taken)
        # z = u_i itself is always allowed: co-occurrence of an element with
        # itself (a self-loop) is not Gaifman adjacency
        members = [f"{zvar} = {evars[j]}" for j in [i] + sorted(adj[i])]
        parts.append(
            f"forall {zvar} (!({adjacency}) | {' | '.join(members)})")

    body = " & ".join(parts) if parts else f"{evars[0]} = {evars[0]}"
    text = f"({body})"
    for v in reversed(evars):
        text = f"exists {v} {text}"
    return text


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name = "_" + name
    taken.add(name)
    return name


def _adjacent_text(signature: Signature, a: str, b: str, taken: set) -> str:
    """Gaifman adjacency of two variables as a formula over the signature."""
    pieces: list[str] = []
    for name, arity in signature.sorted_relations():
        if arity < 2:
            continue
        if arity == 2:
            pieces.append(f"{name}({a},{b})")
            pieces.append(f"{name}({b},{a})")
            continue
        aux = [_fresh(f"w{i}", set(taken) | {a, b}) for i in range(arity - 2)]
        for pa, pb in itertools.permutations(range(arity), 2):
            args: list[str] = []
            k = 0
            for pos in range(arity):
                if pos == pa:
                    args.append(a)
                elif pos == pb:
                    args.append(b)
                else:
                    args.append(aux[k])
                    k += 1
            inner = f"{name}({','.join(args)})"
            for v in reversed(aux):
                inner = f"exists {v} ({inner})"
            pieces.append(inner)
    if not pieces:
        return f"!({a} = {a})"
    return "(" + " | ".join(pieces) + ")"


def count_type_occurrences(structure: Structure, sphere: Sphere) -> int:
    """How many elements realize this 1-center type.  Global scan; meant for
    harness-side statistics, not for the learners."""
    if len(sphere.centers) != 1:
        raise FocnError("count_type_occurrences expects a 1-center sphere")
    key = canonical_key(sphere)
    total = 0
    for a in structure.elements():
        if canonical_key(extract_sphere(structure, (a,), sphere.radius)) == key:
            total += 1
    return total
