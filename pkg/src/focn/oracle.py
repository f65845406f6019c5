"""Brute-force reference implementations.

Everything here is deliberately naive: exhaustive permutation search for
sphere isomorphism, full-universe parameter search with explicit subset
enumeration for the learners, and a subset scan for cliques.  These are the
independent baselines the fast paths are tested against, shipped in the
library so certification runs are available from the command line.  Budgets
make the exponential blow-ups refuse loudly instead of hanging.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import BudgetError, FocnError, SphereShapeError
from .locality import (Sphere, canonical_form, extract_sphere,
                       spheres_isomorphic)
from .learner import Hypothesis, LearnerConfig, TrainingSequence
from .structure import Structure


@dataclass(frozen=True)
class OracleBudget:
    """Hard caps; exceeding one raises BudgetError before work starts (size
    caps) or as soon as it is noticed (count and wall-clock caps)."""

    max_universe: int = 24
    max_candidates: int = 2_000_000
    wall_seconds: Optional[float] = None

    def deadline(self) -> Optional[float]:
        if self.wall_seconds is None:
            return None
        return time.monotonic() + self.wall_seconds


ISO_BUDGET = OracleBudget(max_universe=8)
SEARCH_BUDGET = OracleBudget(max_universe=24)
CLIQUE_BUDGET = OracleBudget(max_universe=20)
WALK_BUDGET = OracleBudget(max_universe=12, max_candidates=512)


def _tick(deadline: Optional[float], what: str):
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetError(f"{what} exceeded its wall-clock budget")


def brute_force_iso(a: Sphere, b: Sphere, budget: OracleBudget = ISO_BUDGET) -> int:
    """All-permutations center-respecting isomorphism test.

    Center images are forced up front; every permutation of the remaining
    elements is tried and verified against the full relation sets.
    """
    if set(a.signature.relations) != set(b.signature.relations):
        raise SphereShapeError("spheres over different signatures")
    if len(a.centers) != len(b.centers):
        raise SphereShapeError(
            f"center count mismatch: {len(a.centers)} vs {len(b.centers)}")
    if a.radius != b.radius:
        raise SphereShapeError(f"radius mismatch: {a.radius} vs {b.radius}")
    if max(a.size, b.size) > budget.max_universe:
        raise BudgetError(
            f"sphere size {max(a.size, b.size)} over the oracle cap "
            f"{budget.max_universe}")
    if a.size != b.size:
        return 0

    forced: dict[int, int] = {}
    for ca, cb in zip(a.centers, b.centers):
        if forced.setdefault(ca, cb) != cb:
            return 0
    if len(set(forced.values())) != len(forced):
        return 0
    rest_a = [v for v in range(a.size) if v not in forced]
    used = set(forced.values())
    rest_b = [v for v in range(b.size) if v not in used]

    b_rels = {name: set(tuples) for name, tuples in b.relations}
    deadline = budget.deadline()
    for images in itertools.permutations(rest_b):
        _tick(deadline, "brute_force_iso")
        mapping = dict(forced)
        mapping.update(zip(rest_a, images))
        ok = True
        for name, tuples in a.relations:
            if {tuple(mapping[e] for e in tup) for tup in tuples} != b_rels[name]:
                ok = False
                break
        if ok:
            return 1
    return 0


def _example_classes(structure: Structure, training: TrainingSequence,
                     params: tuple[int, ...], radius: int):
    """Group examples by pairwise isomorphism of their spheres (no canonical
    keys involved).  Returns (class representatives, class index per example)."""
    spheres = [extract_sphere(structure, entries + params, radius)
               for entries, _ in training.examples]
    reps: list[Sphere] = []
    class_of: list[int] = []
    for sphere in spheres:
        for idx, rep in enumerate(reps):
            if spheres_isomorphic(sphere, rep):
                class_of.append(idx)
                break
        else:
            class_of.append(len(reps))
            reps.append(sphere)
    return reps, class_of


def _all_parameter_tuples(structure: Structure, config: LearnerConfig):
    for m in range(config.ell + 1):
        yield from itertools.product(range(structure.n), repeat=m)


def _subset_hypothesis(config: LearnerConfig, params: tuple[int, ...],
                       reps: list[Sphere], mask: int) -> Hypothesis:
    chosen = [canonical_form(rep)[0] for i, rep in enumerate(reps)
              if (mask >> i) & 1]
    ordered = tuple(s for _, s in sorted(
        (canonical_form(s)[1], s) for s in chosen))
    return Hypothesis(config.k, config.rho, params, ordered)


def brute_force_consistent(structure: Structure, training: TrainingSequence,
                           config: LearnerConfig,
                           budget: OracleBudget = SEARCH_BUDGET
                           ) -> Optional[Hypothesis]:
    """Search the FULL universe for parameters (every tuple of every length
    up to ell) and every subset of the realized sphere classes; return the
    first consistent hypothesis found, or None."""
    if structure.n > budget.max_universe:
        raise BudgetError(f"universe size {structure.n} over the oracle cap")
    deadline = budget.deadline()
    spent = 0
    labels = [label for _, label in training.examples]
    for params in _all_parameter_tuples(structure, config):
        _tick(deadline, "brute_force_consistent")
        reps, class_of = _example_classes(structure, training, params, config.rho)
        spent += 1 << len(reps)
        if spent > budget.max_candidates:
            raise BudgetError("candidate budget exhausted")
        for mask in range(1 << len(reps)):
            if all(((mask >> c) & 1) == lab for c, lab in zip(class_of, labels)):
                return _subset_hypothesis(config, params, reps, mask)
    return None


def brute_force_min_error(structure: Structure, training: TrainingSequence,
                          config: LearnerConfig,
                          budget: OracleBudget = SEARCH_BUDGET
                          ) -> tuple[Hypothesis, Fraction]:
    """Exhaustive minimum of the training error over the same space; the
    first candidate attaining the minimum wins."""
    if structure.n > budget.max_universe:
        raise BudgetError(f"universe size {structure.n} over the oracle cap")
    if not training.examples:
        raise FocnError("training error undefined for an empty sequence")
    deadline = budget.deadline()
    spent = 0
    labels = [label for _, label in training.examples]
    best: Optional[tuple[int, tuple[int, ...], list[Sphere], int]] = None
    for params in _all_parameter_tuples(structure, config):
        _tick(deadline, "brute_force_min_error")
        reps, class_of = _example_classes(structure, training, params, config.rho)
        spent += 1 << len(reps)
        if spent > budget.max_candidates:
            raise BudgetError("candidate budget exhausted")
        for mask in range(1 << len(reps)):
            wrong = sum(1 for c, lab in zip(class_of, labels)
                        if ((mask >> c) & 1) != lab)
            if best is None or wrong < best[0]:
                best = (wrong, params, reps, mask)
    wrong, params, reps, mask = best
    return (_subset_hypothesis(config, params, reps, mask),
            Fraction(wrong, len(training.examples)))


def brute_force_clique(vertex_count: int, edges: Iterable[tuple[int, int]],
                       q: int, budget: OracleBudget = CLIQUE_BUDGET) -> int:
    """1 iff the graph has a q-clique, by scanning all q-subsets."""
    if vertex_count > budget.max_universe:
        raise BudgetError(f"graph size {vertex_count} over the oracle cap")
    if q > 6:
        raise BudgetError(f"clique size {q} over the oracle cap 6")
    if q < 1:
        raise FocnError("clique size must be positive")
    adjacent = {frozenset(e) for e in edges if len(set(e)) == 2}
    for subset in itertools.combinations(range(vertex_count), q):
        if all(frozenset(pair) in adjacent
               for pair in itertools.combinations(subset, 2)):
            return 1
    return 0


def phi_star_walk(structure: Structure, config: LearnerConfig,
                  budget: OracleBudget = WALK_BUDGET,
                  params: tuple[int, ...] = ()) -> Iterator[Hypothesis]:
    """Walk Boolean combinations of realized sphere atoms.

    Enumerates formulas over the atoms "this tuple's sphere has type τ_i"
    (empty disjunction, atoms, negated atoms, disjunctions and conjunctions
    of atoms), evaluates each formula pointwise on every k-tuple, and yields
    the corresponding hypothesis.  Since same-radius sphere atoms are
    mutually exclusive and every tuple realizes exactly one type, each
    formula must coincide with a union of realized types; the walk verifies
    that on every tuple and fails hard otherwise, which is the point of
    running it.
    """
    if structure.n > budget.max_universe:
        raise BudgetError(f"universe size {structure.n} over the walk cap")
    tuples = [tup + params
              for tup in itertools.product(range(structure.n), repeat=config.k)]
    reps: list[Sphere] = []
    keys: dict[bytes, int] = {}
    type_of: list[int] = []
    for tup in tuples:
        canon, key = canonical_form(extract_sphere(structure, tup, config.rho))
        if key not in keys:
            keys[key] = len(reps)
            reps.append(canon)
        type_of.append(keys[key])
    m = len(reps)
    if m > 12:
        raise BudgetError(f"{m} realized types exceed the walk cap 12")

    def atom(i):
        return lambda t: int(type_of[t] == i)

    formulas = [("false", lambda t: 0)]
    formulas += [(f"t{i}", atom(i)) for i in range(m)]
    formulas += [(f"!t{i}", lambda t, i=i: int(type_of[t] != i))
                 for i in range(m)]
    for size in range(2, m + 1):
        for combo in itertools.combinations(range(m), size):
            formulas.append(
                ("|".join(f"t{i}" for i in combo),
                 lambda t, c=combo: int(type_of[t] in c)))
    for i, j in itertools.combinations(range(m), 2):
        formulas.append(
            (f"t{i}&t{j}",
             lambda t, i=i, j=j: int(type_of[t] == i and type_of[t] == j)))
        formulas.append(
            (f"!t{i}&!t{j}",
             lambda t, i=i, j=j: int(type_of[t] != i and type_of[t] != j)))

    deadline = budget.deadline()
    for count, (label, fn) in enumerate(formulas):
        if count >= budget.max_candidates:
            return
        _tick(deadline, "phi_star_walk")
        bits = [fn(t) for t in range(len(tuples))]
        positive = {type_of[t] for t, bit in enumerate(bits) if bit}
        for t, bit in enumerate(bits):
            if bit != int(type_of[t] in positive):
                raise FocnError(
                    f"combination {label} is not a union of realized types")
        yield _subset_hypothesis(config, params, reps,
                                 sum(1 << i for i in positive))
