"""The polymatroid cone, its conditional-independence faces, scenario
projections, and the Shannon-type derivability prover.

The cone of polymatroids on [n] is cut out by the elemental rows

    f([n]) - f([n] \\ {i})                          >= 0   for i in [n]
    f(R+{i}) + f(R+{j}) - f(R) - f(R+{i,j})         >= 0   for i<j, R disjoint
    f(empty)                                         = 0

(n + C(n,2) 2^(n-2) inequalities); every other nonnegativity, monotonicity or
submodularity instance is a nonnegative combination of these.  A conditional
independence requirement I(A_S:A_T|A_R) = 0 is the face obtained by adding
the equality f(RS) + f(RT) - f(RST) - f(R) = 0.

Whether a candidate inequality is derivable from the elemental rows (plus CI
equalities) is a single exact LP; projecting the cone onto a marginal
scenario is Fourier-Motzkin elimination.  Both certify their answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CoordinateMismatchError, DomainError
from .linear import EQ, GE, InequalitySystem, LinearInequality
from .polyhedra import (
    DEFAULT_FM_BUDGET,
    extension_feasible,
    implied_by,
    project,
)
from .subsets import (
    GROUND_SET_CAP,
    Scenario,
    all_subsets,
    is_subset,
    pack,
    sort_subsets,
    subset_key,
    unpack,
)


def _row(coeffs: Mapping[int, int], sense: str = GE) -> LinearInequality:
    """Build a row dropping any empty-set term: the f(empty) = 0 equality is
    carried separately, so generated rows never mention that coordinate."""
    return LinearInequality({m: c for m, c in coeffs.items() if m}, sense)


def elemental_system(n: int) -> InequalitySystem:
    """The minimal generating system of the polymatroid cone on [n]."""
    if not 1 <= n <= GROUND_SET_CAP:
        raise DomainError(f"ground-set size {n} outside [1, {GROUND_SET_CAP}]")
    full = (1 << n) - 1
    rows = [LinearInequality({0: 1}, EQ)]
    for i in range(1, n + 1):
        rows.append(_row({full: 1, full & ~(1 << (i - 1)): -1}))
    for i, j in itertools.combinations(range(1, n + 1), 2):
        bi, bj = 1 << (i - 1), 1 << (j - 1)
        rest = [e for e in range(1, n + 1) if e not in (i, j)]
        for k in range(len(rest) + 1):
            for combo in itertools.combinations(rest, k):
                r = pack(combo)
                rows.append(
                    _row({r | bi: 1, r | bj: 1, r: -1, r | bi | bj: -1})
                )
    return InequalitySystem(n, all_subsets(n), rows)


@dataclass(frozen=True)
class CIConstraint:
    """I(A_S : A_T | A_R) = 0 for pairwise disjoint subsets, R possibly empty.

    Stored canonically with S before T in the subset order, so the symmetric
    pair compares equal.
    """

    s: int
    t: int
    r: int = 0

    def __post_init__(self):
        if not self.s or not self.t:
            raise DomainError("independence needs nonempty S and T")
        if self.s & self.t or self.s & self.r or self.t & self.r:
            raise DomainError("S, T, R must be pairwise disjoint")
        if subset_key(self.t) < subset_key(self.s):
            s, t = self.t, self.s
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "t", t)

    def row(self) -> LinearInequality:
        return _row(
            {
                self.r | self.s: 1,
                self.r | self.t: 1,
                self.r | self.s | self.t: -1,
                self.r: -1,
            },
            EQ,
        )

    def format(self, labels: Sequence[str]) -> str:
        def part(mask):
            return ",".join(labels[e - 1] for e in unpack(mask))

        body = f"{part(self.s)}:{part(self.t)}"
        if self.r:
            body += f"|{part(self.r)}"
        return f"I({body})=0"


def ci_face(system: InequalitySystem, constraints: Iterable[CIConstraint]) -> InequalitySystem:
    """Intersect the system with the faces of the given CI equalities."""
    extra = []
    full = (1 << system.n) - 1
    for c in constraints:
        if not is_subset(c.s | c.t | c.r, full):
            raise DomainError(f"constraint {c} exceeds the ground set")
        extra.append(c.row())
    return system.with_rows(list(system.rows) + extra)


@dataclass(frozen=True)
class BayesNet:
    """An acyclic directed graph on vertices 1..n."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n) or u == v:
                raise DomainError(f"bad edge ({u}, {v})")
            if (u, v) in seen:
                raise DomainError(f"repeated edge ({u}, {v})")
            seen.add((u, v))
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        self._topological_order()  # raises on cycles

    def _topological_order(self) -> list[int]:
        indeg = {v: 0 for v in range(1, self.n + 1)}
        for _, v in self.edges:
            indeg[v] += 1
        queue = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while queue:
            v = queue.pop(0)
            order.append(v)
            for a, b in self.edges:
                if a == v:
                    indeg[b] -= 1
                    if indeg[b] == 0:
                        queue.append(b)
            queue.sort()
        if len(order) != self.n:
            raise DomainError("graph has a directed cycle")
        return order

    def parents(self, v: int) -> int:
        return pack(u for u, w in self.edges if w == v)

    def children(self, v: int) -> int:
        return pack(w for u, w in self.edges if u == v)

    def descendants(self, v: int) -> int:
        """All vertices reachable from v (transitive closure), as a mask."""
        out = 0
        stack = [w for u, w in self.edges if u == v]
        while stack:
            w = stack.pop()
            bit = 1 << (w - 1)
            if out & bit:
                continue
            out |= bit
            stack.extend(x for u, x in self.edges if u == w)
        return out


def local_markov_constraints(net: BayesNet) -> tuple[CIConstraint, ...]:
    """One constraint per vertex v: v independent of its non-descendants
    given its parents.  Vertices whose non-descendant set is empty contribute
    nothing (the constraint is vacuous)."""
    full = (1 << net.n) - 1
    out: list[CIConstraint] = []
    seen = set()
    for v in range(1, net.n + 1):
        bit = 1 << (v - 1)
        pa = net.parents(v)
        t = full & ~(net.descendants(v) | bit | pa)
        if not t:
            continue
        c = CIConstraint(bit, t, pa)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


def project_cone(
    n: int,
    scenario: Scenario,
    constraints: Iterable[CIConstraint] = (),
    redundancy: str = "pairwise",
    budget: int = DEFAULT_FM_BUDGET,
    threads: int = 1,
) -> InequalitySystem:
    """Facet description of the projection of the polymatroid cone (cut to
    the CI face) onto the scenario's nonempty members."""
    if scenario.n != n:
        raise DomainError(f"scenario is on [{scenario.n}], not [{n}]")
    system = ci_face(elemental_system(n), constraints)
    return project(
        system,
        scenario.nonempty_members(),
        redundancy=redundancy,
        budget=budget,
        threads=threads,
    )


# ---------------------------------------------------------------------------
# derivability prover
# ---------------------------------------------------------------------------

@dataclass
class ProofResult:
    """Shannon-type derivability verdict for one candidate row.

    ``provable``: the candidate is a nonnegative combination of elemental
    rows (sign-free on CI equalities); ``combination`` lists the nonzero
    multipliers.  Otherwise ``ray`` is a rational polymatroid satisfying all
    constraints with a strictly negative candidate value.
    """

    provable: bool
    candidate: LinearInequality
    n: int
    combination: tuple[tuple[LinearInequality, Fraction], ...] | None = None
    ray: dict[int, Fraction] | None = None
    constraints_rows: tuple[LinearInequality, ...] = ()

    def verify(self) -> bool:
        from .polyhedra import ImplicationResult

        rows = _prover_rows(self.n, self.constraints_rows)
        if self.provable:
            res = ImplicationResult(
                True, self.candidate, rows, multipliers=self.combination
            )
        else:
            witness = {m: v for m, v in self.ray.items() if m}
            res = ImplicationResult(False, self.candidate, rows, witness=witness)
        return res.verify()


def _prover_rows(n: int, ci_rows: Sequence[LinearInequality]):
    """Elemental + CI rows with the empty coordinate substituted away (no
    generated row mentions it, so only the f(empty)=0 equality drops)."""
    system = elemental_system(n)
    rows = [r for r in system.rows if r.support != (0,)]
    return tuple(rows) + tuple(ci_rows)


def prove_shannon(
    candidate: LinearInequality,
    n: int,
    constraints: Iterable[CIConstraint] = (),
) -> ProofResult:
    """Is ``candidate >= 0`` a Shannon-type inequality on [n] (given the CI
    constraints)?  Decided by one exact LP over the cone's nonempty
    coordinates; both answers carry a certificate."""
    if candidate.sense != GE:
        raise DomainError("candidates must be inequalities (>= 0)")
    if candidate.coefficient(0):
        raise DomainError("candidate has a nonzero empty-set coefficient")
    full = (1 << n) - 1
    for m in candidate.support:
        if not is_subset(m, full):
            raise DomainError(f"candidate coordinate {unpack(m)} exceeds [{n}]")

    ci_rows = tuple(c.row() for c in constraints)
    for row in ci_rows:
        if any(not is_subset(m, full) for m in row.support):
            raise DomainError("CI constraint exceeds the ground set")
    rows = _prover_rows(n, ci_rows)
    coords = [m for m in all_subsets(n) if m]
    res = implied_by(candidate, rows, coords)
    if res.implied:
        return ProofResult(
            True, candidate, n, combination=res.multipliers,
            constraints_rows=ci_rows,
        )
    ray = dict(res.witness)
    ray.setdefault(0, Fraction(0))
    return ProofResult(False, candidate, n, ray=ray, constraints_rows=ci_rows)


# ---------------------------------------------------------------------------
# extension feasibility for partial vectors
# ---------------------------------------------------------------------------

@dataclass
class ExtensionResult:
    feasible: bool
    extension: "object | None" = None  # RankVector when feasible
    #: infeasible case: a valid inequality over the scenario derived from the
    #: cone rows (nonnegative multipliers on >= rows) that the values violate
    combination: tuple[tuple[LinearInequality, Fraction], ...] | None = None
    derived: LinearInequality | None = None


def extend_partial(
    values: Mapping[int, Fraction | int],
    n: int,
    constraints: Iterable[CIConstraint] = (),
) -> ExtensionResult:
    """Can the given member values be completed to a full polymatroid on [n]
    (inside the CI face)?  Exact; values must be rational."""
    from .distributions import RankVector

    fixed = {}
    for m, v in values.items():
        if not is_subset(m, (1 << n) - 1):
            raise DomainError(f"value for {unpack(m)} exceeds [{n}]")
        v = Fraction(v)
        if m == 0:
            if v:
                raise DomainError("the empty set must carry value 0")
            continue
        fixed[m] = v

    ci_rows = tuple(c.row() for c in constraints)
    rows = _prover_rows(n, ci_rows)
    coords = [m for m in all_subsets(n) if m]
    system = InequalitySystem(n, coords, rows)
    res = extension_feasible(system, fixed)
    if res.feasible:
        full_values = {0: Fraction(0)}
        full_values.update(res.point)
        return ExtensionResult(True, extension=RankVector(n, full_values))
    return ExtensionResult(
        False, combination=res.combination, derived=res.derived
    )
