"""Sample-size formulas, finite distributions, and the PAC experiment.

The experiment draws i.i.d. labeled tuples from a finite distribution, runs
the degree-bounded min-error learner, and compares each hypothesis's exact
generalization error against the best achievable over the realized hypothesis
class (every choice of parameter tuple plus union of realized sphere types).
Sample sizes come from the uniform-convergence bound with the realized class
size standing in for the astronomical syntactic bound, which the bound's
proof permits: it holds for any finite class containing the learner's
outputs.  All logarithms are natural; all error arithmetic is exact.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import BudgetError, FocnError, ParseError
from .learner import (MODE_MIN_ERROR, Hypothesis, LearnerConfig,
                      TrainingSequence, evaluate_hypothesis, learn_bounded,
                      training_error)
from .locality import canonical_key, extract_sphere
from .structure import Signature, Structure


# ---------------------------------------------------------------------------
# sample-size calculators

def uc_sample_size(class_size: int, eps: float, delta: float) -> int:
    """Samples needed for uniform convergence over a finite class:
    ceil(ln(2|H|/delta) / (2 eps^2))."""
    if class_size < 1:
        raise FocnError("class size must be positive")
    if not (0 < eps < 1 and 0 < delta < 1):
        raise FocnError("eps and delta must lie strictly between 0 and 1")
    return math.ceil(math.log(2 * class_size / delta) / (2 * eps * eps))


def pac_sample_size(n: int, ell: int, s: int, eps: float, delta: float) -> int:
    """s * ceil(ln(n/delta) / eps^2); the caller folds the class-size factor
    (which carries ell) into s, hence ell is validated but not used."""
    if n < 1:
        raise FocnError("structure size must be positive")
    if ell < 0:
        raise FocnError("ell must be nonnegative")
    if s < 1:
        raise FocnError("s must be at least 1")
    if not (0 < eps < 1 and 0 < delta < 1):
        raise FocnError("eps and delta must lie strictly between 0 and 1")
    return s * math.ceil(math.log(n / delta) / (eps * eps))


def neighborhood_size_bound(d: int, r: int) -> int:
    """Largest possible radius-r ball in a structure of Gaifman degree d:
    1 + d * sum_{i<r} (d-1)^i."""
    if d < 0 or r < 0:
        raise FocnError("degree and radius must be nonnegative")
    return 1 + d * sum((d - 1) ** i for i in range(r))


@dataclass(frozen=True)
class PhiStarBounds:
    """Counting bounds for the hypothesis class over degree-d structures.

    `nu` bounds a 1-center sphere, `elements` a (k+ell)-center sphere at the
    locality radius.  `log2_types` is the base-2 log of the bound on
    non-isomorphic sphere types (sum over relations of elements^arity).  The
    bound on normalized formulas is doubly exponential on top of that, so it
    is reported as `log2_log2_formulas` (the log of its log), and even that
    is withheld (None) when materializing 2^log2_types would not fit in
    memory.
    """

    nu: int
    elements: int
    log2_types: int
    log2_log2_formulas: Optional[int]


_MATERIALIZE_LIMIT = 10_000_000


def phi_star_bounds(d: int, k: int, ell: int, r: int, w: int,
                    signature) -> PhiStarBounds:
    """Exact evaluation of the class-size bounds for the given limits.
    `signature` may be a Signature or a bare sequence of relation arities."""
    if min(d, ell, r, w) < 0 or k < 1:
        raise FocnError("need d, ell, r, w >= 0 and k >= 1")
    arities = (tuple(arity for _, arity in signature.relations)
               if isinstance(signature, Signature) else tuple(signature))
    rho = (2 * w + 1) ** r - 1
    nu = neighborhood_size_bound(d, rho)
    elements = (k + ell) * nu
    log2_types = sum(elements ** arity for arity in arities)
    if log2_types <= _MATERIALIZE_LIMIT:
        types_bound = 1 << log2_types
        log2_log2 = 2 * types_bound * (1 << k) * math.factorial(k)
    else:
        log2_log2 = None
    return PhiStarBounds(nu, elements, log2_types, log2_log2)


# ---------------------------------------------------------------------------
# distributions

@dataclass(frozen=True)
class Distribution:
    """Finite distribution over labeled k-tuples, exact weights summing to 1."""

    arity: int
    support: tuple[tuple[tuple[int, ...], int, Fraction], ...]

    def __post_init__(self):
        if self.arity < 1:
            raise FocnError("distribution arity must be at least 1")
        if not self.support:
            raise FocnError("distribution needs a nonempty support")
        total = Fraction(0)
        seen = set()
        for entries, label, weight in self.support:
            if len(entries) != self.arity:
                raise FocnError(f"support tuple {entries} has wrong arity")
            if label not in (0, 1):
                raise FocnError("support labels must be 0 or 1")
            if weight <= 0:
                raise FocnError("support weights must be positive")
            if (entries, label) in seen:
                raise FocnError(f"duplicate support point {entries}, {label}")
            seen.add((entries, label))
            total += weight
        if total != 1:
            raise FocnError(f"support weights sum to {total}, expected 1")

    def sample(self, count: int, seed: int) -> TrainingSequence:
        """`count` i.i.d. draws; deterministic per seed."""
        rng = random.Random(seed)
        weights = [float(w) for _, _, w in self.support]
        picks = rng.choices(range(len(self.support)), weights=weights, k=count)
        return TrainingSequence(
            self.arity,
            tuple((self.support[i][0], self.support[i][1]) for i in picks))


def load_distribution(text: str, structure: Structure) -> Distribution:
    """Parse `u1 ... uk label weight` lines; weights like 1/4 or 0.25."""
    support = []
    arity = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ParseError("expected 'u1 ... uk label weight'", no)
        try:
            weight = Fraction(parts[-1])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad weight {parts[-1]!r}", no) from None
        if parts[-2] not in ("0", "1"):
            raise ParseError(f"label must be 0 or 1, got {parts[-2]!r}", no)
        names = parts[:-2]
        if arity is None:
            arity = len(names)
        elif len(names) != arity:
            raise ParseError(f"expected {arity} elements, got {len(names)}", no)
        try:
            entries = tuple(structure.uid(n) for n in names)
        except FocnError as exc:
            raise ParseError(str(exc), no) from None
        support.append((entries, int(parts[-2]), weight))
    if arity is None:
        raise ParseError("distribution file contains no support points")
    return Distribution(arity, tuple(support))


def format_distribution(distribution: Distribution, structure: Structure) -> str:
    lines = []
    for entries, label, weight in distribution.support:
        names = " ".join(structure.name(u) for u in entries)
        lines.append(f"{names} {label} {weight}")
    return "\n".join(lines) + "\n"


def generalization_error(structure: Structure, hypothesis: Hypothesis,
                         distribution: Distribution) -> Fraction:
    """Exact probability of misclassification: sum of weights of support
    points the hypothesis gets wrong."""
    if distribution.arity != hypothesis.arity:
        raise FocnError("distribution and hypothesis arities differ")
    wrong = Fraction(0)
    for entries, label, weight in distribution.support:
        if evaluate_hypothesis(structure, hypothesis, entries) != label:
            wrong += weight
    return wrong


# ---------------------------------------------------------------------------
# realized hypothesis class

def _parameter_space(structure: Structure, config: LearnerConfig):
    for m in range(config.ell + 1):
        yield from itertools.product(range(structure.n), repeat=m)


def realized_class_size(structure: Structure, config: LearnerConfig,
                        budget: int = 1_000_000) -> int:
    """Number of distinct classification functions over all parameter tuples
    (up to ell, full universe) and all unions of realized sphere types.
    Exact: tables are materialized as bitmasks and deduplicated."""
    tuples = list(itertools.product(range(structure.n), repeat=config.k))
    tables: set = set()
    spent = 0
    for params in _parameter_space(structure, config):
        type_index: dict[bytes, int] = {}
        masks: list[int] = []
        for position, tup in enumerate(tuples):
            key = canonical_key(extract_sphere(structure, tup + params, config.rho))
            idx = type_index.setdefault(key, len(masks))
            if idx == len(masks):
                masks.append(0)
            masks[idx] |= 1 << position
        spent += 1 << len(masks)
        if spent > budget:
            raise BudgetError(
                f"realized-class enumeration passed the budget {budget}")
        for selection in range(1 << len(masks)):
            table = 0
            remaining = selection
            while remaining:
                low = remaining & -remaining
                table |= masks[low.bit_length() - 1]
                remaining ^= low
            tables.add(table)
    return len(tables)


def class_min_generalization_error(structure: Structure, config: LearnerConfig,
                                   distribution: Distribution) -> Fraction:
    """Exact minimum of the generalization error over the realized class.

    For fixed parameters the best union takes, per sphere type, whichever
    label carries more weight, so the minimum is a per-type sum of the
    smaller side, minimized over all parameter tuples.
    """
    if distribution.arity != config.k:
        raise FocnError("distribution arity does not match config")
    best: Optional[Fraction] = None
    for params in _parameter_space(structure, config):
        weight_by_type: dict[bytes, list[Fraction]] = {}
        for entries, label, weight in distribution.support:
            key = canonical_key(
                extract_sphere(structure, entries + params, config.rho))
            bucket = weight_by_type.setdefault(key, [Fraction(0), Fraction(0)])
            bucket[label] += weight
        err = sum((min(neg, pos) for neg, pos in weight_by_type.values()),
                  Fraction(0))
        if best is None or err < best:
            best = err
    return best


# ---------------------------------------------------------------------------
# the experiment

@dataclass(frozen=True)
class TrialResult:
    training_error: Fraction
    generalization_error: Fraction
    success: bool


@dataclass(frozen=True)
class PacReport:
    eps: float
    delta: float
    sample_size: int
    class_size: int
    class_min: Fraction
    trials: tuple[TrialResult, ...]

    @property
    def success_frequency(self) -> Fraction:
        return Fraction(sum(1 for t in self.trials if t.success),
                        len(self.trials))


def run_pac_experiment(structure: Structure, distribution: Distribution,
                       config: LearnerConfig, eps: float, delta: float,
                       trials: int, seed: int) -> PacReport:
    """Seeded end-to-end check that excess generalization error stays within
    eps with frequency about 1 - delta.

    Each trial draws uc_sample_size(realized class size, eps, delta)
    examples with generator seed `seed ^ trial_index`, learns with the
    bounded min-error learner, and scores err_D(H) - class minimum <= eps.
    """
    if trials < 1:
        raise FocnError("need at least one trial")
    if config.mode != MODE_MIN_ERROR or config.bounded_degree is None:
        raise FocnError("the experiment runs learn_bounded in min_error mode; "
                        "configure mode and bounded_degree accordingly")
    class_size = realized_class_size(structure, config)
    sample_size = uc_sample_size(class_size, eps, delta)
    class_min = class_min_generalization_error(structure, config, distribution)
    results = []
    for index in range(trials):
        training = distribution.sample(sample_size, seed ^ index)
        outcome = learn_bounded(structure, training, config)
        hypothesis = outcome.hypothesis
        err_t = training_error(structure, hypothesis, training)
        err_d = generalization_error(structure, hypothesis, distribution)
        results.append(TrialResult(err_t, err_d,
                                   float(err_d - class_min) <= eps))
    return PacReport(eps, delta, sample_size, class_size, class_min,
                     tuple(results))
