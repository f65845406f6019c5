"""Learning Boolean tuple classifiers over a fixed structure by local access.

Both learners search over parameter tuples drawn from a BFS neighborhood of
the training tuples and classify a k-tuple by the isomorphism type of the
sphere around the tuple extended with the chosen parameters.  A hypothesis is
a set of positive sphere types plus the parameter tuple; evaluating it needs
one sphere extraction, so the query cost depends on the degree and radius but
not on the size of the background structure.

`learn_consistent` returns the first candidate consistent with every example,
or rejects.  `learn_min_error` keeps, for each candidate, the types where
positive examples are at least as frequent as negative ones, and returns the
candidate with the fewest misclassified examples (first win on ties); it
never rejects.  `learn_bounded` is the degree-bounded variant that fixes the
parameter count to exactly `ell`.
"""

from __future__ import annotations

import concurrent.futures
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import FocnError, ParseError
from .locality import (Sphere, canonical_form, canonical_key, extract_sphere,
                       parse_sphere, serialize_sphere)
from .structure import AccessReceipt, Structure

MODE_CONSISTENT = "consistent"
MODE_MIN_ERROR = "min_error"


@dataclass(frozen=True)
class TrainingSequence:
    """Ordered labeled examples; duplicates and contradictions allowed."""

    arity: int
    examples: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self):
        if self.arity < 1:
            raise FocnError("training arity must be at least 1")
        for entries, label in self.examples:
            if len(entries) != self.arity:
                raise FocnError(
                    f"training tuple {entries} does not have arity {self.arity}")
            if label not in (0, 1):
                raise FocnError(f"training label must be 0 or 1, got {label!r}")

    @staticmethod
    def from_pairs(arity: int,
                   pairs: Iterable[tuple[Sequence[int], int]]) -> "TrainingSequence":
        return TrainingSequence(
            arity, tuple((tuple(entries), int(label)) for entries, label in pairs))

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)


def load_training(text: str, structure: Structure) -> TrainingSequence:
    """Parse `u1 ... uk label` lines (element names, # comments allowed)."""
    examples = []
    arity = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ParseError("expected 'u1 ... uk label'", no)
        if parts[-1] not in ("0", "1"):
            raise ParseError(f"label must be 0 or 1, got {parts[-1]!r}", no)
        names = parts[:-1]
        if arity is None:
            arity = len(names)
        elif len(names) != arity:
            raise ParseError(
                f"expected {arity} elements per example, got {len(names)}", no)
        try:
            entries = tuple(structure.uid(n) for n in names)
        except FocnError as exc:
            raise ParseError(str(exc), no) from None
        examples.append((entries, int(parts[-1])))
    if arity is None:
        raise ParseError("training file contains no examples")
    return TrainingSequence(arity, tuple(examples))


def format_training(training: TrainingSequence, structure: Structure) -> str:
    lines = []
    for entries, label in training.examples:
        lines.append(" ".join(structure.name(u) for u in entries) + f" {label}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LearnerConfig:
    """Search-space bounds: tuple arity k, parameter budget ell, and the
    binding rank/width bounds r, w of the (implicit) target class.

    `degree` is the caller-supplied Gaifman degree of the structure; the
    bounded learner checks it against `bounded_degree` instead of scanning.
    """

    k: int
    ell: int
    r: int
    w: int
    mode: str = MODE_CONSISTENT
    bounded_degree: Optional[int] = None
    degree: Optional[int] = None

    def __post_init__(self):
        if self.k < 1:
            raise FocnError("k must be at least 1")
        if min(self.ell, self.r, self.w) < 0:
            raise FocnError("ell, r, w must be nonnegative")
        if self.mode not in (MODE_CONSISTENT, MODE_MIN_ERROR):
            raise FocnError(f"unknown mode {self.mode!r}")

    @property
    def rho(self) -> int:
        """Locality radius: spheres of this radius determine truth of any
        formula with binding rank <= r and binding width <= w."""
        return (2 * self.w + 1) ** self.r - 1

    @property
    def search_radius(self) -> int:
        """Parameters beyond this distance from the training tuples are
        interchangeable with closer ones, so the search stops here."""
        return 2 * self.ell * self.rho


@dataclass(frozen=True)
class Hypothesis:
    """Parameter tuple plus positive sphere types (canonical witnesses)."""

    arity: int
    radius: int
    parameters: tuple[int, ...]
    positive_types: tuple[Sphere, ...]

    def __post_init__(self):
        centers = self.arity + len(self.parameters)
        for sphere in self.positive_types:
            if len(sphere.centers) != centers:
                raise FocnError(
                    f"type has {len(sphere.centers)} centers, expected {centers}")
            if sphere.radius != self.radius:
                raise FocnError(
                    f"type radius {sphere.radius} differs from hypothesis "
                    f"radius {self.radius}")

    @property
    def keys(self) -> frozenset:
        return frozenset(canonical_key(s) for s in self.positive_types)


@dataclass(frozen=True)
class LearnOutcome:
    """Hypothesis or rejection, with search diagnostics."""

    hypothesis: Optional[Hypothesis]
    candidates_examined: int
    receipt: AccessReceipt

    @property
    def rejected(self) -> bool:
        return self.hypothesis is None


def candidate_parameters(structure: Structure, training: TrainingSequence,
                         config: LearnerConfig) -> list[tuple[int, ...]]:
    """Parameter tuples in deterministic search order.

    N is the ball of all training entries at the search radius, in ball
    order; the list is the empty tuple followed by N^m for m = 1..ell,
    lexicographic.  In bounded mode only the full-arity tuples are searched
    (falling back to the empty tuple when N is empty).
    """
    entries = tuple(e for example, _ in training.examples for e in example)
    if config.ell == 0 or not entries:
        return [()]
    neighborhood = structure.ball(entries, config.search_radius)
    bounded = config.bounded_degree is not None
    if bounded:
        out = [tuple(t) for t in itertools.product(neighborhood, repeat=config.ell)]
        return out if out else [()]
    out = [()]
    for m in range(1, config.ell + 1):
        out.extend(tuple(t) for t in itertools.product(neighborhood, repeat=m))
    return out


def _check_inputs(training: TrainingSequence, config: LearnerConfig):
    if training.arity != config.k:
        raise FocnError(
            f"training arity {training.arity} does not match k={config.k}")


def _buckets(structure: Structure, training: TrainingSequence,
             params: tuple[int, ...], radius: int) -> dict:
    """Canonical key -> [witness sphere, positive count, negative count]."""
    buckets: dict = {}
    for entries, label in training.examples:
        canon, key = canonical_form(extract_sphere(structure, entries + params, radius))
        bucket = buckets.get(key)
        if bucket is None:
            buckets[key] = bucket = [canon, 0, 0]
        bucket[1 if label == 1 else 2] += 1
    return buckets


def _make_hypothesis(config: LearnerConfig, params: tuple[int, ...],
                     spheres: Iterable[Sphere]) -> Hypothesis:
    ordered = tuple(s for _, s in sorted((canonical_key(s), s) for s in spheres))
    return Hypothesis(config.k, config.rho, params, ordered)


def _probe_consistent(structure, training, config, params) -> Optional[Hypothesis]:
    buckets = _buckets(structure, training, params, config.rho)
    positives = []
    for witness, pos, neg in buckets.values():
        if pos and neg:
            return None
        if pos:
            positives.append(witness)
    return _make_hypothesis(config, params, positives)


def _score_min_error(structure, training, config, params) -> tuple[int, Hypothesis]:
    buckets = _buckets(structure, training, params, config.rho)
    consistent = 0
    positives = []
    for witness, pos, neg in buckets.values():
        if pos >= neg:
            positives.append(witness)
            consistent += pos
        else:
            consistent += neg
    return consistent, _make_hypothesis(config, params, positives)


def _first_match(worker, candidates: list, jobs: int):
    """Index and result of the first candidate accepted by `worker`.

    With several jobs, candidates are probed in windows; the reduction picks
    the minimal accepted index, so the outcome equals the sequential scan.
    """
    if jobs <= 1:
        for i, params in enumerate(candidates):
            result = worker(params)
            if result is not None:
                return i, result
        return len(candidates), None
    window = max(jobs * 8, 16)
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        for start in range(0, len(candidates), window):
            chunk = candidates[start:start + window]
            for offset, result in enumerate(pool.map(worker, chunk)):
                if result is not None:
                    return start + offset, result
    return len(candidates), None


def learn_consistent(structure: Structure, training: TrainingSequence,
                     config: LearnerConfig, jobs: int = 1) -> LearnOutcome:
    """First-match search for a hypothesis with training error zero.

    If any target with binding rank <= r, binding width <= w, and at most
    ell parameters is consistent with the training sequence, the search
    neighborhood contains a consistent candidate, so a non-realizable
    sequence is the only way to a rejection.
    """
    _check_inputs(training, config)
    before = structure.access_receipt()
    candidates = candidate_parameters(structure, training, config)
    index, hypothesis = _first_match(
        lambda params: _probe_consistent(structure, training, config, params),
        candidates, jobs)
    examined = index + 1 if hypothesis is not None else len(candidates)
    return LearnOutcome(hypothesis, examined, structure.access_receipt() - before)


def learn_min_error(structure: Structure, training: TrainingSequence,
                    config: LearnerConfig, jobs: int = 1) -> Hypothesis:
    """Hypothesis with the fewest misclassified training examples over the
    candidate space; ties go to the earliest candidate.  Never rejects."""
    _check_inputs(training, config)
    candidates = candidate_parameters(structure, training, config)

    def score(params):
        return _score_min_error(structure, training, config, params)

    if jobs <= 1:
        results = map(score, candidates)
        best = None
        best_score = -1
        for consistent, hypothesis in results:
            if consistent > best_score:
                best, best_score = hypothesis, consistent
        return best
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        scored = list(pool.map(score, candidates))
    best, best_score = None, -1
    for consistent, hypothesis in scored:
        if consistent > best_score:
            best, best_score = hypothesis, consistent
    return best


def learn_bounded(structure: Structure, training: TrainingSequence,
                  config: LearnerConfig, jobs: int = 1) -> LearnOutcome:
    """Degree-bounded variant: candidate tuples of arity exactly ell.

    The degree is taken from the config (the learner never scans the
    structure to measure it); exceeding the bound is an error.
    """
    _check_inputs(training, config)
    if config.bounded_degree is None:
        raise FocnError("learn_bounded needs config.bounded_degree")
    if config.degree is None:
        raise FocnError("learn_bounded needs config.degree (the structure's "
                        "Gaifman degree, supplied by the caller)")
    if config.degree > config.bounded_degree:
        raise FocnError(
            f"degree {config.degree} exceeds bound {config.bounded_degree}")
    before = structure.access_receipt()
    candidates = candidate_parameters(structure, training, config)
    if config.mode == MODE_MIN_ERROR:
        best = None
        best_score = -1
        for params in candidates:
            consistent, hypothesis = _score_min_error(
                structure, training, config, params)
            if consistent > best_score:
                best, best_score = hypothesis, consistent
        return LearnOutcome(best, len(candidates),
                            structure.access_receipt() - before)
    index, hypothesis = _first_match(
        lambda params: _probe_consistent(structure, training, config, params),
        candidates, jobs)
    examined = index + 1 if hypothesis is not None else len(candidates)
    return LearnOutcome(hypothesis, examined, structure.access_receipt() - before)


def evaluate_hypothesis(structure: Structure, hypothesis: Hypothesis,
                        entries: Sequence[int]) -> int:
    """Classify a tuple: 1 iff its sphere (with the hypothesis parameters
    appended as extra centers) has one of the positive types."""
    if len(entries) != hypothesis.arity:
        raise FocnError(
            f"tuple has {len(entries)} entries, hypothesis arity is "
            f"{hypothesis.arity}")
    sphere = extract_sphere(structure, tuple(entries) + hypothesis.parameters,
                            hypothesis.radius)
    return int(canonical_key(sphere) in hypothesis.keys)


def training_error(structure: Structure, hypothesis: Hypothesis,
                   training: TrainingSequence) -> Fraction:
    """Exact fraction of misclassified examples."""
    if not training.examples:
        raise FocnError("training error undefined for an empty sequence")
    wrong = sum(1 for entries, label in training.examples
                if evaluate_hypothesis(structure, hypothesis, entries) != label)
    return Fraction(wrong, len(training.examples))


# ---------------------------------------------------------------------------
# hypothesis files

def serialize_hypothesis(hypothesis: Hypothesis, structure: Structure) -> str:
    """Text form; parameters are stored by element name."""
    params = " ".join(structure.name(v) for v in hypothesis.parameters)
    lines = ["hypothesis",
             f"arity {hypothesis.arity}",
             f"radius {hypothesis.radius}",
             ("parameters " + params).rstrip(),
             f"types {len(hypothesis.positive_types)}"]
    for sphere in hypothesis.positive_types:
        lines.append(serialize_sphere(sphere).rstrip("\n"))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_hypothesis(text: str, structure: Structure) -> Hypothesis:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    pos = 0

    def take(expect: str) -> list[str]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"hypothesis block ended early, expected {expect!r}")
        parts = lines[pos].split()
        if parts[0] != expect:
            raise ParseError(f"expected {expect!r}, got {parts[0]!r}")
        pos += 1
        return parts[1:]

    take("hypothesis")
    arity = int(take("arity")[0])
    radius = int(take("radius")[0])
    parameters = tuple(structure.uid(n) for n in take("parameters"))
    count = int(take("types")[0])
    spheres = []
    for _ in range(count):
        if pos >= len(lines) or lines[pos].split()[0] != "sphere":
            raise ParseError("expected a sphere block")
        start = pos
        while pos < len(lines) and lines[pos] != "end":
            pos += 1
        if pos >= len(lines):
            raise ParseError("unterminated sphere block")
        pos += 1
        spheres.append(parse_sphere("\n".join(lines[start:pos])))
    take("end")
    return Hypothesis(arity, radius, parameters, tuple(spheres))
