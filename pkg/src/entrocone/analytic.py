"""Closed-form inequality families and constructions.

* the n cyclic facet rows of the cycle scenario, and the verdict they give
  on partial polymatroids (non-contextual exactly when all n rows hold);
* the four-variable Zhang-Yeung inequality, the rational partial polymatroid
  that violates it while passing every Shannon-type facet of its scenario,
  and the marginal model realizing that vector entropically;
* the greedy submodular extension of a partial submodular function to the
  full power set (no monotonicity or nonnegativity assumed);
* the correlation-decay bound for stationary processes implied by the cycle
  inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping

from .distributions import (
    ENTROPY_TOL,
    JointDistribution,
    MarginalModel,
    PartialRankVector,
    RankVector,
)
from .errors import DomainError, NotSubmodularError
from .linear import GE, InequalitySystem, LinearInequality
from .subsets import (
    Scenario,
    all_subsets,
    cycle_scenario,
    is_subset,
    pack,
    sort_subsets,
    subset_key,
    unpack,
    zy_scenario,
)


# ---------------------------------------------------------------------------
# partial-polymatroid (local basic) systems
# ---------------------------------------------------------------------------

def partial_polymatroid_system(scenario: Scenario) -> InequalitySystem:
    """Every nonnegativity, monotonicity and submodularity instance that is
    expressible inside the scenario (unions staying in the scenario)."""
    members = scenario.members_sorted()
    rows = []
    for m in members:
        if m:
            rows.append(LinearInequality({m: 1}))
    for s in members:
        for t in members:
            if s and s != t and is_subset(s, t):
                rows.append(LinearInequality({t: 1, s: -1}))
    for s, t in combinations(members, 2):
        if (s | t) in scenario.members and not is_subset(s, t) and not is_subset(t, s):
            coeffs = {s: 1, t: 1}
            coeffs[s | t] = coeffs.get(s | t, 0) - 1
            if s & t:
                coeffs[s & t] = coeffs.get(s & t, 0) - 1
            rows.append(LinearInequality(coeffs))
    return InequalitySystem(
        scenario.n, scenario.nonempty_members(), (r for r in rows if not r.is_trivial())
    )


# ---------------------------------------------------------------------------
# cycle scenario facets
# ---------------------------------------------------------------------------

def _cycle_edge(i: int, n: int) -> int:
    return pack({(i - 1) % n + 1, i % n + 1})


def cycle_inequalities(n: int) -> InequalitySystem:
    """The n cyclic rows: for each edge {i,i+1},

        sum_{j != i} f({j,j+1}) - f({i,i+1}) - sum_{j != i,i+1} f({j}) >= 0.

    All rows are cyclic images of one another; together with the local basic
    inequalities they cut out exactly the projections of polymatroids.
    """
    if n < 3:
        raise DomainError(f"cycle inequalities need n >= 3, got {n}")
    scenario = cycle_scenario(n)
    rows = []
    for i in range(1, n + 1):
        coeffs: dict[int, int] = {}
        for j in range(1, n + 1):
            coeffs[_cycle_edge(j, n)] = 1 if j != i else -1
        for j in range(1, n + 1):
            if j != i and j != i % n + 1:
                coeffs[pack({j})] = -1
        rows.append(LinearInequality(coeffs))
    return InequalitySystem(n, scenario.nonempty_members(), rows)


@dataclass(frozen=True)
class CycleVerdict:
    contextual: bool
    #: violated cycle rows with their (negative) slack
    violations: tuple[tuple[LinearInequality, object], ...]


def check_cycle_contextuality(
    vector: PartialRankVector, tol: float = ENTROPY_TOL
) -> CycleVerdict:
    """Decide (non-)contextuality of a partial polymatroid on the cycle.

    The input must satisfy the local basic inequalities (that is what makes
    it a partial polymatroid); it is then non-contextual if and only if all n
    cycle rows hold.  Exact vectors are checked with zero tolerance.
    """
    scenario = vector.scenario
    n = scenario.n
    if scenario.members != cycle_scenario(n).members:
        raise DomainError("vector is not over the cycle scenario")
    eff_tol = 0 if vector.exact else tol
    local = partial_polymatroid_system(scenario)
    for row, lhs in local.violations(vector.values, eff_tol):
        raise DomainError(
            f"not a partial polymatroid: {row.format(scenario.labels)} "
            f"fails (lhs {lhs})"
        )
    bad = tuple(cycle_inequalities(n).violations(vector.values, eff_tol))
    return CycleVerdict(contextual=bool(bad), violations=bad)


# ---------------------------------------------------------------------------
# the Zhang-Yeung inequality and its witnesses
# ---------------------------------------------------------------------------

def zhang_yeung_inequality() -> LinearInequality:
    """The four-variable non-Shannon-type inequality, over the coordinates of
    the Zhang-Yeung scenario on {w,x,y,z}:

        -4 H(wyz) - H(xyz) - H(wx) + 3 H(wy) + 3 H(wz)
        + H(xy) + H(xz) + 3 H(yz) - H(w) - 2 H(y) - 2 H(z) >= 0.

    Valid for every entropy vector, but not for every polymatroid.
    """
    s = zy_scenario()
    c = s.mask_of
    return LinearInequality(
        {
            c("wyz"): -4,
            c("xyz"): -1,
            c("wx"): -1,
            c("wy"): 3,
            c("wz"): 3,
            c("xy"): 1,
            c("xz"): 1,
            c("yz"): 3,
            c("w"): -1,
            c("y"): -2,
            c("z"): -2,
        }
    )


def zy_partial_polymatroid() -> PartialRankVector:
    """The rational partial polymatroid on the Zhang-Yeung scenario with
    singletons 2, the glued edge {w,x} at 4, the other pairs at 3, and both
    triangles at 4.  It violates the Zhang-Yeung inequality (value -1) yet
    satisfies every Shannon-type facet of the scenario."""
    s = zy_scenario()
    values: dict[int, Fraction] = {}
    for m in s.nonempty_members():
        k = m.bit_count()
        if k == 1:
            values[m] = Fraction(2)
        elif k == 3:
            values[m] = Fraction(4)
        else:
            values[m] = Fraction(4 if m == s.mask_of("wx") else 3)
    return PartialRankVector(s, values)


def zy_marginal_model() -> MarginalModel:
    """A marginal model whose entropies realize :func:`zy_partial_polymatroid`.

    Take four independent fair bits (a_w, a_y, a_z, b) and set
    A_v = (a_v, b) for v in {w,y,z}; that is the {w,y,z} table.  The {x,y,z}
    table is the same construction with a_x in place of a_w (same b, a_y,
    a_z, so the {y,z} overlap agrees), and the {w,x} table is the product of
    the two singleton marginals.
    """
    s = zy_scenario()
    alphabet = tuple(f"{a}{b}" for a in "01" for b in "01")
    alphabets = {v: alphabet for v in (1, 2, 3, 4)}

    def glued_triple(vs):
        probs: dict[tuple, Fraction] = {}
        for a1, a2, a3, b in product("01", repeat=4):
            probs[(a1 + b, a2 + b, a3 + b)] = Fraction(1, 16)
        return JointDistribution(vs, alphabets, probs)

    def product_pair(vs):
        probs = {
            (o1, o2): Fraction(1, 16) for o1 in alphabet for o2 in alphabet
        }
        return JointDistribution(vs, alphabets, probs)

    tables = {
        s.mask_of("wyz"): glued_triple((1, 3, 4)),
        s.mask_of("xyz"): glued_triple((2, 3, 4)),
        s.mask_of("wx"): product_pair((1, 2)),
    }
    return MarginalModel.from_generator_tables(s, tables)


# ---------------------------------------------------------------------------
# submodular extension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubmodularPartial:
    """A function on a scenario with f(empty)=0 that satisfies submodularity
    wherever it is expressible; nonnegativity and monotonicity are *not*
    required (think differential entropies)."""

    scenario: Scenario
    values: Mapping[int, Fraction]

    def __post_init__(self):
        given = dict(self.values)
        if Fraction(given.pop(0, 0)) != 0:
            raise DomainError("submodular partial must vanish on the empty set")
        vals = {0: Fraction(0)}
        for m in self.scenario.members_sorted():
            if m:
                if m not in given:
                    raise DomainError(
                        f"missing value for member {self.scenario.member_label(m)}"
                    )
                vals[m] = Fraction(given.pop(m))
        if given:
            raise DomainError(f"values outside the scenario: {sorted(given)}")
        object.__setattr__(self, "values", vals)
        members = self.scenario.members_sorted()
        for s, t in combinations(members, 2):
            u = s | t
            if u in self.scenario.members and not is_subset(s, t) and not is_subset(t, s):
                lhs = vals[s] + vals[t] - vals[u] - vals[s & t]
                if lhs < 0:
                    labels = self.scenario.labels
                    raise NotSubmodularError(
                        "submodularity fails for "
                        f"S={unpack(s)}, T={unpack(t)} (slack {lhs})",
                        triple=(s, t, u),
                    )


def submodular_extend(partial: SubmodularPartial) -> RankVector:
    """Extend a partial submodular function to a submodular function on all
    of 2^[n].

    Repeatedly take the canonically smallest inclusion-minimal missing set V
    (all of whose proper subsets are then already defined) and give it the
    largest value keeping submodularity:

        f(V) = min over pairs S, T properly inside V with S | T = V of
               f(S) + f(T) - f(S & T).

    The result restricts exactly to the input.
    """
    n = partial.scenario.n
    values: dict[int, Fraction] = dict(partial.values)
    missing = [m for m in all_subsets(n) if m not in values]
    while missing:
        minimal = [
            m for m in missing
            if not any(o != m and is_subset(o, m) for o in missing)
        ]
        v = min(minimal, key=subset_key)
        elems = unpack(v)
        best = None
        for k in range(1, len(elems)):
            for combo in combinations(elems, k):
                s = pack(combo)
                t_candidates = _covering_partners(v, s)
                for t in t_candidates:
                    if subset_key(t) < subset_key(s):
                        continue  # unordered pairs once
                    cand = values[s] + values[t] - values[s & t]
                    if best is None or cand < best:
                        best = cand
        values[v] = best
        missing.remove(v)
    return RankVector(n, values)


def _covering_partners(v: int, s: int) -> list[int]:
    """Proper subsets T of v with s | T = v: T must contain v \\ s and may
    contain any part of s except all of it when s | T would equal... T != v."""
    rest = v & ~s
    out = []
    extra_elems = unpack(s)
    for k in range(len(extra_elems) + 1):
        for combo in combinations(extra_elems, k):
            t = rest | pack(combo)
            if t != v:
                out.append(t)
    return out


# ---------------------------------------------------------------------------
# correlation decay in stationary processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessBound:
    """Lower bound on I(A_1 : A_n) for a stationary process, from the cycle
    inequality: raw = H1 - (n-1) * Hcond, clipped at 0 (mutual information is
    nonnegative; the raw bound may be vacuous).  ``horizon`` is the largest n
    for which the bound is still positive, floor(H1 / Hcond)."""

    bound: object
    raw: object
    horizon: object


def process_bound(h1, hcond, n: int) -> ProcessBound:
    """Bound I(A_1:A_n) >= H(A_1) - (n-1) H(A_2|A_1) for stationary processes.

    ``h1`` is the single-step entropy, ``hcond`` the per-step noise entropy,
    both in bits.
    """
    if n < 2:
        raise DomainError(f"process bound needs n >= 2, got {n}")
    if h1 < 0 or hcond < 0:
        raise DomainError("entropies must be nonnegative")
    raw = h1 - (n - 1) * hcond
    bound = raw if raw > 0 else 0 * raw
    if hcond == 0:
        horizon = math.inf
    else:
        horizon = int((h1 / hcond) // 1)
    return ProcessBound(bound=bound, raw=raw, horizon=horizon)
