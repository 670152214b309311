"""Finite-outcome distributions, marginal models, and entropy vectors.

Probabilities are exact rationals throughout; only entropy evaluation is
approximate, done in 80-bit mpmath floats (entropies are irrational in
general).  Every inequality check on entropy-valued vectors therefore takes a
tolerance, 1e-9 bits by default, while rational rank vectors are compared
exactly.  Variables are the 1-based ground-set indices of a scenario; outcome
alphabets are arbitrary finite label tuples.  Only finite alphabets are
supported (countable ones with convergent entropy are out of reach of an
exact table representation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

from .errors import DomainError, IncompatibleModelError
from .subsets import Scenario, all_subsets, is_subset, pack, sort_subsets, unpack

#: bits of working precision for entropy evaluation
ENTROPY_PRECISION = 80

#: default tolerance (in bits) for inequality checks on entropy-valued data
ENTROPY_TOL = 1e-9

#: total-variation threshold for marginal-compatibility checks; inputs are
#: exact rationals, so any nonzero deviation is a genuine violation
COMPAT_TOL = Fraction(0)


def is_exact(values: Iterable) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


class JointDistribution:
    """A distribution over the tuple of variables ``variables`` (ascending
    1-based ids), with an explicit finite alphabet per variable.

    ``probabilities`` maps full outcome tuples (aligned with ``variables``)
    to rationals; missing tuples have probability zero.
    """

    __slots__ = ("variables", "alphabets", "probabilities")

    def __init__(
        self,
        variables: Sequence[int],
        alphabets: Mapping[int, Sequence],
        probabilities: Mapping[tuple, Fraction],
    ):
        variables = tuple(variables)
        if list(variables) != sorted(set(variables)):
            raise DomainError("variables must be strictly increasing ids")
        alpha = {v: tuple(alphabets[v]) for v in variables}
        for v, a in alpha.items():
            if not a or len(set(a)) != len(a):
                raise DomainError(f"alphabet of variable {v} empty or repeating")
        index = {
            v: {o: k for k, o in enumerate(a)} for v, a in alpha.items()
        }
        probs: dict[tuple, Fraction] = {}
        for outcome, p in probabilities.items():
            outcome = tuple(outcome)
            if len(outcome) != len(variables):
                raise DomainError(f"outcome {outcome!r} has wrong arity")
            p = Fraction(p)
            if p < 0:
                raise DomainError(f"negative probability at {outcome!r}")
            for v, o in zip(variables, outcome):
                if o not in index[v]:
                    raise DomainError(f"outcome {o!r} not in alphabet of {v}")
            if p:
                probs[outcome] = probs.get(outcome, Fraction(0)) + p
        if sum(probs.values(), Fraction(0)) != 1:
            raise DomainError("probabilities must sum to 1 exactly")
        ordered = sorted(
            probs.items(),
            key=lambda op: tuple(index[v][o] for v, o in zip(variables, op[0])),
        )
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "alphabets", alpha)
        object.__setattr__(self, "probabilities", dict(ordered))

    def __setattr__(self, name, value):
        raise AttributeError("JointDistribution is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, JointDistribution)
            and self.variables == other.variables
            and self.alphabets == other.alphabets
            and self.probabilities == other.probabilities
        )

    def __hash__(self):
        return hash((self.variables, tuple(self.probabilities.items())))

    @property
    def mask(self) -> int:
        return pack(self.variables)

    def outcome_space(self) -> int:
        prod = 1
        for v in self.variables:
            prod *= len(self.alphabets[v])
        return prod

    def __repr__(self):
        return (
            f"JointDistribution(variables={self.variables}, "
            f"support={len(self.probabilities)})"
        )


def marginalize(dist: JointDistribution, target: int | Iterable[int]) -> JointDistribution:
    """Sum out the variables not in ``target`` (a mask or element iterable)."""
    tmask = target if isinstance(target, int) else pack(target)
    if not is_subset(tmask, dist.mask):
        raise DomainError(
            f"target {unpack(tmask)} is not a subset of variables {dist.variables}"
        )
    keep_pos = [i for i, v in enumerate(dist.variables) if (1 << (v - 1)) & tmask]
    acc: dict[tuple, Fraction] = {}
    for outcome, p in dist.probabilities.items():
        reduced = tuple(outcome[i] for i in keep_pos)
        acc[reduced] = acc.get(reduced, Fraction(0)) + p
    variables = tuple(dist.variables[i] for i in keep_pos)
    return JointDistribution(variables, dist.alphabets, acc)


def shannon_entropy(dist: JointDistribution):
    """Joint Shannon entropy in bits (an mpmath float)."""
    with mpmath.workprec(ENTROPY_PRECISION):
        total = mpmath.mpf(0)
        for p in dist.probabilities.values():
            x = mpmath.mpf(p.numerator) / p.denominator
            total -= x * mpmath.log(x, 2)
        return total


def subset_entropy(dist: JointDistribution, mask: int):
    return shannon_entropy(marginalize(dist, mask))


@dataclass(frozen=True)
class RankVector:
    """A value for every subset of [n]; the empty set is pinned to 0."""

    n: int
    values: Mapping[int, object]

    def __post_init__(self):
        vals = dict(self.values)
        missing = [m for m in all_subsets(self.n) if m not in vals]
        if missing:
            raise DomainError(f"rank vector missing {len(missing)} subsets")
        if vals[0] != 0:
            raise DomainError("rank vector must vanish on the empty set")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, mask: int):
        return self.values[mask]

    @property
    def exact(self) -> bool:
        return is_exact(self.values.values())

    def restrict(self, scenario: Scenario) -> "PartialRankVector":
        return PartialRankVector(
            scenario, {m: self.values[m] for m in scenario.members_sorted()}
        )


@dataclass(frozen=True)
class PartialRankVector:
    """A value for every member of a scenario; empty set pinned to 0."""

    scenario: Scenario
    values: Mapping[int, object]

    def __post_init__(self):
        vals = {0: 0}
        given = dict(self.values)
        for m in self.scenario.members_sorted():
            if m == 0:
                if given.pop(0, 0) != 0:
                    raise DomainError("partial vector must vanish on the empty set")
                continue
            if m not in given:
                raise DomainError(
                    f"partial vector missing member {self.scenario.member_label(m)}"
                )
            vals[m] = given.pop(m)
        if given:
            raise DomainError(f"values outside the scenario: {sorted(given)}")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, mask: int):
        return self.values[mask]

    @property
    def exact(self) -> bool:
        return is_exact(self.values.values())


def entropy_vector(dist: JointDistribution) -> RankVector:
    """The full entropy vector S -> H(A_S) of a joint distribution of all of
    [n]; always a polymatroid."""
    n = len(dist.variables)
    if dist.variables != tuple(range(1, n + 1)):
        raise DomainError("entropy_vector needs a distribution over all of [n]")
    values = {m: subset_entropy(dist, m) for m in all_subsets(n)}
    values[0] = 0
    return RankVector(n, values)


def mutual_information(
    dist: JointDistribution,
    s: int | Iterable[int],
    t: int | Iterable[int],
    r: int | Iterable[int] = 0,
):
    """I(A_S : A_T | A_R) = H(A_RS) + H(A_RT) - H(A_RST) - H(A_R), in bits."""
    smask = s if isinstance(s, int) else pack(s)
    tmask = t if isinstance(t, int) else pack(t)
    rmask = r if isinstance(r, int) else pack(r)
    if smask & tmask or smask & rmask or tmask & rmask:
        raise DomainError("mutual-information arguments must be pairwise disjoint")
    if not is_subset(smask | tmask | rmask, dist.mask):
        raise DomainError("arguments must be subsets of the distribution's variables")
    return (
        subset_entropy(dist, rmask | smask)
        + subset_entropy(dist, rmask | tmask)
        - subset_entropy(dist, rmask | smask | tmask)
        - subset_entropy(dist, rmask)
    )


class MarginalModel:
    """A table for every member of a scenario.

    Construction stores the tables as given (padding any missing non-maximal
    members by marginalizing the canonically first generator containing
    them); it does *not* cross-check overlaps, so that
    :func:`check_compatibility` has something meaningful to report.
    """

    __slots__ = ("scenario", "tables")

    def __init__(self, scenario: Scenario, tables: Mapping[int, JointDistribution]):
        tables = dict(tables)
        for mask, dist in tables.items():
            if mask not in scenario.members:
                raise DomainError(
                    f"table for non-member {unpack(mask)}"
                )
            if dist.mask != mask:
                raise DomainError(
                    f"table for {unpack(mask)} is over variables {dist.variables}"
                )
        for g in scenario.generators:
            if g not in tables:
                raise DomainError(
                    f"missing table for generator {scenario.member_label(g)}"
                )
        alphabets: dict[int, tuple] = {}
        for mask in sort_subsets(tables):
            for v, a in tables[mask].alphabets.items():
                if v in alphabets and alphabets[v] != tuple(a):
                    raise DomainError(f"conflicting alphabets for variable {v}")
                alphabets.setdefault(v, tuple(a))
        full = {}
        for m in scenario.members_sorted():
            if m in tables:
                full[m] = tables[m]
            else:
                src = next(g for g in scenario.generators if is_subset(m, g))
                full[m] = marginalize(tables[src], m)
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "tables", full)

    def __setattr__(self, name, value):
        raise AttributeError("MarginalModel is immutable")

    @classmethod
    def from_generator_tables(
        cls, scenario: Scenario, tables: Mapping[int, JointDistribution]
    ) -> "MarginalModel":
        return cls(scenario, {g: tables[g] for g in scenario.generators})

    def __repr__(self):
        gens = ", ".join(self.scenario.member_label(g) for g in self.scenario.generators)
        return f"MarginalModel(generators=[{gens}])"


@dataclass(frozen=True)
class CompatibilityReport:
    """Every nested member pair is checked; ``violations`` lists (S, T,
    total-variation deviation) triples for pairs whose marginals disagree."""

    violations: tuple[tuple[int, int, Fraction], ...]

    @property
    def compatible(self) -> bool:
        return not self.violations

    @property
    def max_deviation(self) -> Fraction:
        return max((d for _, _, d in self.violations), default=Fraction(0))


def check_compatibility(model: MarginalModel, tol: Fraction = COMPAT_TOL) -> CompatibilityReport:
    """Verify the overlap condition: for T subseteq S the T-marginal of the
    S-table equals the stored T-table."""
    members = model.scenario.members_sorted()
    violations = []
    for s in members:
        for t in members:
            if t == s or not is_subset(t, s):
                continue
            derived = marginalize(model.tables[s], t)
            stored = model.tables[t]
            outcomes = set(derived.probabilities) | set(stored.probabilities)
            dev = sum(
                (
                    abs(
                        derived.probabilities.get(o, Fraction(0))
                        - stored.probabilities.get(o, Fraction(0))
                    )
                    for o in outcomes
                ),
                Fraction(0),
            ) / 2
            if dev > tol:
                violations.append((s, t, dev))
    return CompatibilityReport(tuple(violations))


def marginal_entropy_vector(model: MarginalModel, tol: Fraction = COMPAT_TOL) -> PartialRankVector:
    """S -> H(A_S) over the scenario members; a partial polymatroid whenever
    the model is compatible, which is checked first."""
    report = check_compatibility(model, tol)
    if not report.compatible:
        s, t, dev = report.violations[0]
        raise IncompatibleModelError(
            f"incompatible marginals: {model.scenario.member_label(s)} vs "
            f"{model.scenario.member_label(t)} (total variation {dev})"
        )
    values = {
        m: (0 if m == 0 else shannon_entropy(model.tables[m]))
        for m in model.scenario.members_sorted()
    }
    return PartialRankVector(model.scenario, values)


# ---------------------------------------------------------------------------
# table builders used by fixtures and tests
# ---------------------------------------------------------------------------

def uniform_distribution(variables: Sequence[int], alphabets: Mapping[int, Sequence]) -> JointDistribution:
    variables = tuple(variables)
    spaces = [tuple(alphabets[v]) for v in variables]
    total = 1
    for s in spaces:
        total *= len(s)
    p = Fraction(1, total)
    probs = {outcome: p for outcome in itertools.product(*spaces)}
    return JointDistribution(variables, alphabets, probs)


def table_from_function(
    variables: Sequence[int],
    alphabets: Mapping[int, Sequence],
    seeds: Sequence[Sequence],
    seed_probs: Sequence[Fraction],
    f,
) -> JointDistribution:
    """Distribution of (f applied to a hidden seed): seeds occur with the
    given probabilities and f maps a seed to the outcome tuple."""
    probs: dict[tuple, Fraction] = {}
    for seed, p in zip(seeds, seed_probs):
        outcome = tuple(f(seed))
        probs[outcome] = probs.get(outcome, Fraction(0)) + Fraction(p)
    return JointDistribution(variables, alphabets, probs)
