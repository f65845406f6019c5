"""Builders for the worked structures and labeled corpora.

Each gadget builder returns a bundle whose `facts` were re-derived by direct
evaluation during construction — a bundle that fails its own arithmetic never
comes back, it raises.  The random-structure generator and the target planter
supply the corpora the property suites and the experiment harness run on.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import FocnError, GenerationError
from .learner import TrainingSequence
from .logic import CompiledFormula, Formula, free_variables, parse_formula
from .structure import Signature, Structure, build_structure


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph on vertices 0..n-1; edges as (a, b) with a < b."""

    n: int
    edges: frozenset

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < b < self.n):
                raise FocnError(f"bad edge ({a}, {b}) for {self.n} vertices")

    @staticmethod
    def random(n: int, edge_prob: float, rng: random.Random) -> "SimpleGraph":
        edges = frozenset((a, b) for a, b in itertools.combinations(range(n), 2)
                          if rng.random() < edge_prob)
        return SimpleGraph(n, edges)

    @staticmethod
    def complete(n: int) -> "SimpleGraph":
        return SimpleGraph(n, frozenset(itertools.combinations(range(n), 2)))


@dataclass(frozen=True)
class GadgetBundle:
    structure: Structure
    formulas: Mapping[str, str]
    trainings: Mapping[str, TrainingSequence]
    facts: Mapping[str, object]


def _require(condition: bool, message: str):
    if not condition:
        raise GenerationError(message)


# ---------------------------------------------------------------------------
# encyclopedia

ENCYCLOPEDIA_PHI = ("C(c) & (L(c,p) | exists x (L(c,x) & "
                    "#(y).(L(x,y) & L(p,y)) >= 2))")
ENCYCLOPEDIA_PHI_KAPPA = ("C(c) & (L(c,p) | exists x (L(c,x) & "
                          "#(y).(L(x,y) & L(p,y)) >= kappa))")

_ENC_LINKS = ((1, 2), (2, 3), (2, 4), (2, 5), (5, 4), (6, 4), (6, 5), (7, 6),
              (8, 3), (8, 4), (8, 5), (8, 6))
_ENC_TRAINING = (((1, 2), 1), ((1, 8), 1), ((7, 6), 1), ((1, 5), 0), ((8, 2), 0))
_ENC_EXPECTED = frozenset(
    (("1", "2"), ("1", "6"), ("1", "8"), ("7", "2"), ("7", "6"), ("7", "8")))


def gen_encyclopedia() -> GadgetBundle:
    """Eight pages, two of them categories, and the link relation of the
    worked example; training sequence and expected learned relation included
    and re-verified by evaluating the defining formula on all pairs."""
    signature = Signature((("L", 2), ("C", 1)))
    names = [str(i) for i in range(1, 9)]
    structure = build_structure(signature, names, {
        "L": [(str(a), str(b)) for a, b in _ENC_LINKS],
        "C": [("1",), ("7",)],
    })
    _require(structure.n == 8, "encyclopedia universe must have 8 pages")
    _require(structure.max_degree() == 4, "encyclopedia Gaifman degree must be 4")

    phi = CompiledFormula(structure, parse_formula(ENCYCLOPEDIA_PHI, signature))
    realized = frozenset(
        (structure.name(c), structure.name(p))
        for c in structure.elements() for p in structure.elements()
        if phi({"c": c, "p": p}))
    _require(realized == _ENC_EXPECTED,
             f"encyclopedia relation came out as {sorted(realized)}")

    examples = []
    for (c, p), label in _ENC_TRAINING:
        cu, pu = structure.uid(str(c)), structure.uid(str(p))
        _require(phi({"c": cu, "p": pu}) == label,
                 f"training pair ({c}, {p}) should evaluate to {label}")
        examples.append(((cu, pu), label))
    training = TrainingSequence(2, tuple(examples))

    return GadgetBundle(
        structure=structure,
        formulas={"phi": ENCYCLOPEDIA_PHI, "phi_kappa": ENCYCLOPEDIA_PHI_KAPPA},
        trainings={"examples": training},
        facts={"expected_relation": realized, "size": structure.n,
               "degree": structure.max_degree()},
    )


# ---------------------------------------------------------------------------
# sublinearity gadget

THM2_PHI = ("exists v1 exists v2 "
            "(R(x,v1) & R(x,v2) & S(y,v1) & S(y,v2) & E(v1,v2))")


def _thm2_block_has_edge(i: int, j: int) -> bool:
    if j == 1:
        return False
    if j == 2:
        return True
    return (j - i) % 2 == 1


def gen_thm2(t: int, n: int) -> GadgetBundle:
    """Two rows of t blocks of n vertices each, rows tied to y1/y2 by S and
    columns to x1..xt by R; a block either has a single edge (between its two
    first vertices) or none.  The j-th label of row i says whether block
    (i, j) has an edge; the two training sequences present the same label
    string over different column orders."""
    if t < 2 or t % 2 != 0:
        raise GenerationError(f"t must be a positive even integer, got {t}")
    if n < 2:
        raise GenerationError(f"block size must be at least 2, got {n}")

    signature = Signature((("E", 2), ("R", 2), ("S", 2)))
    names = [f"x{j}" for j in range(1, t + 1)] + ["y1", "y2"]
    block_names: dict[tuple[int, int], list[str]] = {}
    for i in (1, 2):
        for j in range(1, t + 1):
            block = [f"g{i}_{j}_{v}" for v in range(1, n + 1)]
            block_names[(i, j)] = block
            names.extend(block)

    edges, links_r, links_s = [], [], []
    for (i, j), block in sorted(block_names.items()):
        if _thm2_block_has_edge(i, j):
            a, b = block[0], block[1]
            edges.extend([(a, b), (b, a)])
        for v in block:
            links_r.append((f"x{j}", v))
            links_s.append((f"y{i}", v))
    structure = build_structure(signature, names,
                                {"E": edges, "R": links_r, "S": links_s})
    _require(structure.n == t * (2 * n + 1) + 2,
             f"universe size {structure.n} != t(2n+1)+2 = {t * (2 * n + 1) + 2}")

    phi = CompiledFormula(structure, parse_formula(THM2_PHI, signature))
    labels: dict[tuple[int, int], int] = {}
    for i in (1, 2):
        yi = structure.uid(f"y{i}")
        for j in range(1, t + 1):
            value = phi({"x": structure.uid(f"x{j}"), "y": yi})
            _require(value == int(_thm2_block_has_edge(i, j)),
                     f"label c_{i}{j} evaluated to {value}")
            labels[(i, j)] = value
    if t >= 3:
        _require(labels[(1, 3)] == 0 and labels[(2, 3)] == 1,
                 "labels c_13 / c_23 must differ as 0 / 1")

    def example(i: int, j: int):
        return ((structure.uid(f"x{j}"),), labels[(i, j)])

    t1 = TrainingSequence(1, tuple(example(1, j) for j in range(1, t + 1)))
    order2 = [1, 2]
    for base in range(3, t, 2):
        order2.extend([base + 1, base])
    t2 = TrainingSequence(1, tuple(example(2, j) for j in order2))

    return GadgetBundle(
        structure=structure,
        formulas={"phi": THM2_PHI},
        trainings={"t1": t1, "t2": t2},
        facts={"labels": labels, "size": structure.n, "t": t, "n": n,
               "block_has_edge": {key: _thm2_block_has_edge(*key)
                                  for key in labels}},
    )


# ---------------------------------------------------------------------------
# clique-hardness gadget

def eth_psi(i: int, j: int, q: int) -> str:
    binders = " ".join(f"exists v{s}" for s in range(1, q + 1))
    members = [f"X{i}(v{s}) & Y{j}(v{s})" for s in range(1, q + 1)]
    pairs = [f"E(v{a},v{b})"
             for a, b in itertools.combinations(range(1, q + 1), 2)]
    return (f"X{i}(x) & Y{j}(y) & {binders} "
            f"({' & '.join(members + pairs)})")


def eth_phi(q: int) -> str:
    disjuncts = " | ".join(f"({eth_psi(i, j, q)})"
                           for i in (1, 2) for j in (1, 2))
    return f"X(x) & Y(y) & ({disjuncts})"


def gen_eth(graph: SimpleGraph, q: int) -> GadgetBundle:
    """Four blocks (the input graph, a copy, a positive block containing a
    q-clique, and an edgeless negative block) wired to x1/x2/y1/y2 by the
    overlap pattern that makes the parameter choice y1 consistent with
    ((x1,1), (x2,0)) exactly when the input graph has a q-clique, and y2
    exactly when it does not."""
    if q < 2:
        raise GenerationError(f"clique size must be at least 2, got {q}")
    if q > graph.n:
        raise GenerationError(
            f"clique size {q} exceeds graph size {graph.n}")

    size = graph.n
    blocks = {
        "g": [f"g{v}" for v in range(size)],
        "gp": [f"gp{v}" for v in range(size)],
        "hp": [f"hp{v}" for v in range(size)],
        "hm": [f"hm{v}" for v in range(size)],
    }
    names = ["x1", "x2", "y1", "y2"]
    for block in blocks.values():
        names.extend(block)

    edges = []
    for prefix in ("g", "gp"):
        for a, b in sorted(graph.edges):
            edges.extend([(blocks[prefix][a], blocks[prefix][b]),
                          (blocks[prefix][b], blocks[prefix][a])])
    for a, b in itertools.combinations(range(q), 2):
        edges.extend([(blocks["hp"][a], blocks["hp"][b]),
                      (blocks["hp"][b], blocks["hp"][a])])

    unary = lambda *groups: [(v,) for group in groups for v in group]
    signature = Signature((("E", 2), ("X", 1), ("Y", 1), ("X1", 1),
                           ("X2", 1), ("Y1", 1), ("Y2", 1)))
    structure = build_structure(signature, names, {
        "E": edges,
        "X": [("x1",), ("x2",)],
        "Y": [("y1",), ("y2",)],
        "X1": unary(["x1"], blocks["g"], blocks["hp"]),
        "X2": unary(["x2"], blocks["gp"], blocks["hm"]),
        "Y1": unary(["y1"], blocks["g"], blocks["hm"]),
        "Y2": unary(["y2"], blocks["gp"], blocks["hp"]),
    })
    _require(structure.n == 4 + 4 * size,
             f"universe size {structure.n} != 4 + 4|G| = {4 + 4 * size}")

    phi_text = eth_phi(q)
    phi = CompiledFormula(structure, parse_formula(phi_text, signature))
    x1, x2 = structure.uid("x1"), structure.uid("x2")
    verdicts = {}
    for label in ("y1", "y2"):
        y = structure.uid(label)
        verdicts[label] = (phi({"x": x1, "y": y}) == 1
                           and phi({"x": x2, "y": y}) == 0)
    _require(verdicts["y1"] != verdicts["y2"],
             "exactly one of y1, y2 must give a consistent hypothesis")

    training = TrainingSequence(1, (((x1,), 1), ((x2,), 0)))
    return GadgetBundle(
        structure=structure,
        formulas={"phi": phi_text,
                  **{f"psi{i}{j}": eth_psi(i, j, q)
                     for i in (1, 2) for j in (1, 2)}},
        trainings={"t": training},
        facts={"y1_consistent": verdicts["y1"],
               "y2_consistent": verdicts["y2"],
               "size": structure.n, "q": q, "graph": graph},
    )


# ---------------------------------------------------------------------------
# random corpora

def gen_random(n: int, d: int, signature: Signature, seed: int,
               tuple_counts: Optional[Mapping[str, int]] = None) -> Structure:
    """Seeded random structure whose Gaifman degree stays at most d.

    Tuples are sampled uniformly and rejected when they would push any
    element past the degree bound.  Without explicit `tuple_counts`
    (defaults: n arity->=2 tuples and n/2 unary tuples per relation) the
    generator keeps whatever fits; with explicit counts it raises when a
    count proves unreachable.
    """
    if n < 1:
        raise GenerationError("need at least one element")
    if d < 0:
        raise GenerationError("degree bound must be nonnegative")
    rng = random.Random(seed)
    names = [f"e{i}" for i in range(n)]
    adjacency: list[set] = [set() for _ in range(n)]
    relations: dict[str, list] = {}
    for rel_name, arity in signature.relations:
        explicit = tuple_counts is not None and rel_name in tuple_counts
        target = (tuple_counts[rel_name] if explicit
                  else (max(1, n // 2) if arity == 1 else n))
        chosen: set = set()
        attempts = 0
        while len(chosen) < target and attempts < 200 * (target + 1):
            attempts += 1
            tup = tuple(rng.randrange(n) for _ in range(arity))
            if tup in chosen:
                continue
            distinct = sorted(set(tup))
            fits = True
            for u in distinct:
                extra = [v for v in distinct if v != u and v not in adjacency[u]]
                if len(adjacency[u]) + len(extra) > d:
                    fits = False
                    break
            if not fits:
                continue
            for u in distinct:
                for v in distinct:
                    if u != v:
                        adjacency[u].add(v)
            chosen.add(tup)
        if explicit and len(chosen) < target:
            raise GenerationError(
                f"could not place {target} tuples of {rel_name!r} under "
                f"degree bound {d}")
        relations[rel_name] = [tuple(names[e] for e in tup) for tup in sorted(chosen)]
    return build_structure(signature, names, relations)


def pad_with_isolated(structure: Structure, count: int,
                      prefix: str = "pad") -> Structure:
    """Same structure plus `count` fresh isolated elements (appended after
    the existing ones, so existing element ids are unchanged)."""
    if count < 0:
        raise GenerationError("padding count must be nonnegative")
    names = list(structure.names)
    taken = set(names)
    for i in range(count):
        name = f"{prefix}{i}"
        while name in taken:
            name = "_" + name
        taken.add(name)
        names.append(name)
    relations = {
        name: [tuple(structure.name(e) for e in tup)
               for tup in sorted(structure.relation(name))]
        for name, _ in structure.signature.relations
    }
    return build_structure(structure.signature, names, relations)


def plant_target(structure: Structure, formula: Formula,
                 params: Mapping[str, int], num_params: Mapping[str, int],
                 t: int, seed: int) -> TrainingSequence:
    """Label t uniformly drawn tuples by the formula at fixed parameters.

    The formula's free structure variables not covered by `params` become
    the example tuple positions, in sorted name order.  The resulting
    sequence is consistent with the target by construction.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula, structure.signature)
    free_struct, free_num = free_variables(formula)
    x_vars = sorted(free_struct - set(params))
    if not x_vars:
        raise GenerationError("formula leaves no free variables for examples")
    missing = free_num - set(num_params)
    if missing:
        raise GenerationError(f"unassigned number variables: {sorted(missing)}")
    for name, value in num_params.items():
        if not 0 <= value <= structure.n:
            raise GenerationError(
                f"number parameter {name}={value} outside 0..{structure.n}")
    compiled = CompiledFormula(structure, formula)
    rng = random.Random(seed)
    examples = []
    for _ in range(t):
        entries = tuple(rng.randrange(structure.n) for _ in x_vars)
        assignment = dict(params)
        assignment.update(zip(x_vars, entries))
        examples.append((entries, compiled(assignment, dict(num_params))))
    return TrainingSequence(len(x_vars), tuple(examples))
