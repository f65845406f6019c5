"""Tests for the brute-force reference implementations."""

import random
from fractions import Fraction

import pytest

import focn
from focn import (MODE_MIN_ERROR, BudgetError, LearnerConfig, OracleBudget,
                  TrainingSequence, brute_force_clique, brute_force_consistent,
                  brute_force_iso, brute_force_min_error, evaluate_hypothesis,
                  extract_sphere, learn_consistent, phi_star_walk,
                  training_error)

from conftest import SIG_E, SIG_EC, cycle_structure, path_structure


@pytest.fixture(scope="module")
def enc():
    return focn.gen_encyclopedia().structure


# ---------------------------------------------------------------------------
# permutation isomorphism

def test_iso_identical(enc):
    s = extract_sphere(enc, (enc.uid("4"),), 1)
    assert brute_force_iso(s, s) == 1


def test_iso_4_vs_5(enc):
    a = extract_sphere(enc, (enc.uid("4"),), 1)
    b = extract_sphere(enc, (enc.uid("5"),), 1)
    assert brute_force_iso(a, b) == 0


def test_iso_shape_mismatch(enc):
    a = extract_sphere(enc, (enc.uid("4"),), 1)
    b = extract_sphere(enc, (enc.uid("4"),), 2)
    with pytest.raises(focn.SphereShapeError):
        brute_force_iso(a, b)


def test_iso_budget():
    s = cycle_structure(20)
    nine = extract_sphere(s, (0,), 4)
    assert nine.size == 9
    with pytest.raises(BudgetError):
        brute_force_iso(nine, nine)
    assert brute_force_iso(nine, nine, budget=OracleBudget(max_universe=9)) == 1


def test_iso_respects_center_order():
    s = path_structure(4)
    a = extract_sphere(s, (1, 2), 0)
    b = extract_sphere(s, (2, 1), 0)
    # (1,2) and (2,1) carry the same unordered picture, and with radius 0
    # there is no edge inside either sphere, so center swap is invisible here
    assert brute_force_iso(a, b) == 1
    c = extract_sphere(s, (0, 1), 1)
    d = extract_sphere(s, (1, 0), 1)
    # at radius 1 the centers see asymmetric neighborhoods:0 is an endpoint
    assert brute_force_iso(c, d) == 0


# ---------------------------------------------------------------------------
# consistent / min-error search

def test_consistent_none_on_duplicates(enc):
    t = TrainingSequence(1, (((0,), 1), ((0,), 0)))
    assert brute_force_consistent(enc, t, LearnerConfig(1, 1, 1, 1)) is None


def test_consistent_finds_encyclopedia_hypothesis(enc):
    bundle = focn.gen_encyclopedia()
    t = bundle.trainings["examples"]
    cfg = LearnerConfig(k=2, ell=0, r=2, w=1)
    h = brute_force_consistent(enc, t, cfg)
    assert h is not None
    assert training_error(enc, h, t) == 0


def test_learner_implies_oracle(enc):
    rng = random.Random(17)
    cfg = LearnerConfig(k=1, ell=1, r=1, w=1)
    for _ in range(10):
        t = TrainingSequence(1, tuple(((rng.randrange(enc.n),),
                                       rng.randrange(2)) for _ in range(4)))
        out = learn_consistent(enc, t, cfg)
        if not out.rejected:
            assert brute_force_consistent(enc, t, cfg) is not None


def test_min_error_consistent_training(enc):
    bundle = focn.gen_encyclopedia()
    t = bundle.trainings["examples"]
    cfg = LearnerConfig(k=2, ell=0, r=2, w=1, mode=MODE_MIN_ERROR)
    _, err = brute_force_min_error(enc, t, cfg)
    assert err == 0


def test_min_error_duplicates(enc):
    u = (enc.uid("4"),)
    t = TrainingSequence(1, ((u, 1), (u, 1), (u, 1), (u, 0)))
    cfg = LearnerConfig(k=1, ell=0, r=1, w=1, mode=MODE_MIN_ERROR)
    h, err = brute_force_min_error(enc, t, cfg)
    assert err == Fraction(1, 4)
    assert evaluate_hypothesis(enc, h, u) == 1


def test_oracle_budget_universe_cap():
    s = cycle_structure(30)
    t = TrainingSequence(1, (((0,), 1),))
    with pytest.raises(BudgetError):
        brute_force_consistent(s, t, LearnerConfig(1, 1, 1, 1),
                               budget=OracleBudget(max_universe=24))
    assert brute_force_consistent(
        s, t, LearnerConfig(1, 1, 1, 1),
        budget=OracleBudget(max_universe=32)) is not None


# ---------------------------------------------------------------------------
# cliques

def test_clique_k4():
    g = focn.SimpleGraph.complete(4)
    assert brute_force_clique(g.n, g.edges, 4) == 1
    assert brute_force_clique(g.n, g.edges, 2) == 1


def test_clique_edgeless():
    assert brute_force_clique(5, (), 2) == 0


def test_clique_triangle_plus_pendant():
    edges = ((0, 1), (0, 2), (1, 2), (2, 3))
    assert brute_force_clique(4, edges, 3) == 1
    assert brute_force_clique(4, edges, 4) == 0


def test_clique_budget():
    with pytest.raises(BudgetError):
        brute_force_clique(25, (), 3)
    with pytest.raises(BudgetError):
        brute_force_clique(5, (), 7)


# ---------------------------------------------------------------------------
# the literal formula-walker

def test_walk_contains_all_unions():
    s = path_structure(4)
    cfg = LearnerConfig(k=1, ell=0, r=1, w=1)
    functions = set()
    for h in phi_star_walk(s, cfg):
        functions.add(tuple(evaluate_hypothesis(s, h, (u,))
                            for u in range(s.n)))
    # two realized types (endpoint, inner) -> exactly 4 unions
    assert functions == {(0, 0, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0),
                         (1, 1, 1, 1)}


def test_walk_negation_is_union_of_rest():
    s = path_structure(5)
    cfg = LearnerConfig(k=1, ell=0, r=1, w=1)
    hyps = list(phi_star_walk(s, cfg))
    tables = [tuple(evaluate_hypothesis(s, h, (u,)) for u in range(s.n))
              for h in hyps]
    # the all-zero classifier (empty combination) is present
    assert tuple([0] * s.n) in tables
    # and every classifier's complement is also present
    for table in tables:
        complement = tuple(1 - b for b in table)
        assert complement in tables


def test_walk_respects_type_cap():
    # a path has few symmetries, so whole-structure pair types outnumber the
    # walker's hard cap
    s = path_structure(8)
    cfg = LearnerConfig(k=2, ell=0, r=2, w=2)
    with pytest.raises(focn.FocnError):
        list(phi_star_walk(s, cfg))
