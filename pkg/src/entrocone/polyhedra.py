"""Exact cone polyhedra: Fourier-Motzkin projection, redundancy removal, and
linear programming over inequality systems.

All systems here are homogeneous (every row passes through the origin), which
turns every optimization question into one of two ray questions answered by
the feasibility core in :mod:`entrocone.simplex`:

* is a row a nonnegative combination of the others (implication / validity)?
* is there a point of the cone on which a linear form is negative (ray
  search / witness extraction)?

Fourier-Motzkin bookkeeping follows the classical recipe: equality rows are
consumed as Gaussian substitutions, inequality rows are combined pairwise,
each derived row remembers the set of original rows it came from (Chernikov
ancestor sets, used to discard rows whose ancestor set strictly contains
another's), and on request the exact nonnegative multipliers reproducing a
derived row are emitted.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BudgetExceededError, CoordinateMismatchError, DomainError
from .linear import EQ, GE, InequalitySystem, LinearInequality
from .simplex import solve_feasibility
from .subsets import sort_subsets, subset_key

#: default cap on rows derived by pairwise combination during one projection
DEFAULT_FM_BUDGET = 10_000_000


# ---------------------------------------------------------------------------
# implication / validity via the dual system
# ---------------------------------------------------------------------------

@dataclass
class ImplicationResult:
    """Outcome of asking whether ``target >= 0`` holds on a row system's cone.

    When implied, ``multipliers`` reproduces the target exactly: nonnegative
    on >= rows, sign-free on == rows.  Otherwise ``witness`` is a rational
    point of the cone with a strictly negative target value.
    """

    implied: bool
    target: LinearInequality
    rows: tuple[LinearInequality, ...]
    multipliers: tuple[tuple[LinearInequality, Fraction], ...] | None = None
    witness: dict[int, Fraction] | None = None

    def verify(self) -> bool:
        if self.implied:
            combo: dict[int, Fraction] = {}
            for row, lam in self.multipliers:
                if row.sense == GE and lam < 0:
                    return False
                for mask, c in row.coeffs.items():
                    combo[mask] = combo.get(mask, Fraction(0)) + lam * c
            target = {m: Fraction(c) for m, c in self.target.coeffs.items()}
            return {m: c for m, c in combo.items() if c} == target
        w = self.witness
        values = {m: w.get(m, Fraction(0)) for m in _support_union(self.rows, self.target)}
        for row in self.rows:
            if not row.satisfied_by(values):
                return False
        return self.target.evaluate(values) < 0


def _support_union(rows, *extra) -> set[int]:
    out: set[int] = set()
    for row in rows:
        out.update(row.support)
    for row in extra:
        out.update(row.support)
    return out


def implied_by(
    target: LinearInequality,
    rows: Sequence[LinearInequality],
    coordinates: Iterable[int] | None = None,
) -> ImplicationResult:
    """Decide whether ``target`` (as a >= 0 row) is a consequence of ``rows``.

    The question is dual feasibility: target = sum of nonnegative multiples
    of >= rows plus sign-free multiples of == rows, matched coordinatewise.
    """
    if coordinates is None:
        coords = sort_subsets(_support_union(rows, target))
    else:
        coords = sort_subsets(coordinates)
    coord_index = {m: k for k, m in enumerate(coords)}
    for m in target.support:
        if m not in coord_index:
            raise CoordinateMismatchError(f"target uses unknown coordinate {m}")

    columns: list[tuple[int, int]] = []  # (row index, sign)
    for i, row in enumerate(rows):
        columns.append((i, 1))
        if row.sense == EQ:
            columns.append((i, -1))

    eqs: list[dict[int, Fraction]] = [dict() for _ in coords]
    for j, (i, sign) in enumerate(columns):
        for mask, c in rows[i].coeffs.items():
            if mask not in coord_index:
                raise CoordinateMismatchError(f"row uses unknown coordinate {mask}")
            eqs[coord_index[mask]][j] = Fraction(sign * c)
    rhs = [Fraction(target.coefficient(m)) for m in coords]

    res = solve_feasibility(eqs, rhs, len(columns))
    if res.feasible:
        mults: dict[int, Fraction] = {}
        for j, (i, sign) in enumerate(columns):
            if res.x[j]:
                mults[i] = mults.get(i, Fraction(0)) + sign * res.x[j]
        pairs = tuple(
            (rows[i], lam) for i, lam in sorted(mults.items()) if lam
        )
        return ImplicationResult(True, target, tuple(rows), multipliers=pairs)
    witness = {m: -y for m, y in zip(coords, res.farkas) if y}
    return ImplicationResult(False, target, tuple(rows), witness=witness)


def _row_implied(row: LinearInequality, others: Sequence[LinearInequality],
                 coordinates=None) -> tuple[bool, set[LinearInequality]]:
    """Implication for either sense; equality rows need both directions.

    Returns (implied, rows carrying nonzero weight in the certificates).
    """
    first = implied_by(row, others, coordinates)
    if not first.implied:
        return False, set()
    support = {r for r, _ in first.multipliers}
    if row.sense == EQ:
        second = implied_by(row.negated(), others, coordinates)
        if not second.implied:
            return False, set()
        support.update(r for r, _ in second.multipliers)
    return True, support


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination
# ---------------------------------------------------------------------------

def _normalized_with_ratio(raw: dict[int, int], sense: str):
    """Build a normalized row from integer coefficients, returning also the
    scalar r with stored = r * raw (for multiplier bookkeeping)."""
    row = LinearInequality(raw, sense)
    if row.is_trivial():
        return row, Fraction(0)
    m0 = row.support[0]
    return row, Fraction(row.coeffs[m0], raw[m0])


def _combine(a: Mapping[int, int], ca: int, b: Mapping[int, int], cb: int) -> dict[int, int]:
    out = {m: ca * c for m, c in a.items()}
    for m, c in b.items():
        v = out.get(m, 0) + cb * c
        if v:
            out[m] = v
        elif m in out:
            del out[m]
    return out


def _eliminate_once(metarows, coord, counter=None):
    """One FM step over (row, ancestors, multipliers) triples.

    Ancestor sets are int bitmasks over the indices of some original system;
    multipliers map the *input* row positions of this step to Fractions.
    Returns the new triples (unsorted, deduplicated keep-smallest-ancestors).
    """
    eq_pivot = None
    for idx, (row, _, _) in enumerate(metarows):
        if row.sense == EQ and row.coefficient(coord):
            if eq_pivot is None or row.sort_key() < metarows[eq_pivot][0].sort_key():
                eq_pivot = idx

    produced: list[tuple[LinearInequality, int, dict[int, Fraction]]] = []

    if eq_pivot is not None:
        pivot_row, pivot_anc, _ = metarows[eq_pivot]
        sign = 1 if pivot_row.coefficient(coord) > 0 else -1
        piv = {m: sign * c for m, c in pivot_row.coeffs.items()}
        pc = piv[coord]
        for idx, (row, anc, _) in enumerate(metarows):
            if idx == eq_pivot:
                continue
            rc = row.coefficient(coord)
            if rc == 0:
                produced.append((row, anc, {idx: Fraction(1)}))
                continue
            raw = _combine(row.coeffs, pc, piv, -rc)
            new, ratio = _normalized_with_ratio(raw, row.sense)
            if new.is_trivial():
                continue
            mults = {idx: pc * ratio, eq_pivot: -rc * sign * ratio}
            produced.append((new, anc | pivot_anc, mults))
    else:
        pos, neg, zero = [], [], []
        for idx, (row, anc, _) in enumerate(metarows):
            c = row.coefficient(coord)
            if c > 0:
                pos.append(idx)
            elif c < 0:
                neg.append(idx)
            else:
                zero.append(idx)
        for idx in zero:
            row, anc, _ = metarows[idx]
            produced.append((row, anc, {idx: Fraction(1)}))
        if counter is not None:
            counter.charge(len(pos) * len(neg))
        for ip in pos:
            prow, panc, _ = metarows[ip]
            pc = prow.coefficient(coord)
            for im in neg:
                nrow, nanc, _ = metarows[im]
                nc = nrow.coefficient(coord)
                raw = _combine(prow.coeffs, -nc, nrow.coeffs, pc)
                new, ratio = _normalized_with_ratio(raw, GE)
                if new.is_trivial():
                    continue
                produced.append((new, panc | nanc, {ip: -nc * ratio, im: pc * ratio}))

    # deduplicate identical rows, preferring the smaller ancestor set
    by_row: dict[LinearInequality, int] = {}
    kept: list[tuple[LinearInequality, int, dict[int, Fraction]]] = []
    for row, anc, mults in produced:
        at = by_row.get(row)
        if at is None:
            by_row[row] = len(kept)
            kept.append((row, anc, mults))
        else:
            old_anc = kept[at][1]
            if anc != old_anc and anc | old_anc == old_anc:
                kept[at] = (row, anc, mults)
    return kept


class _Budget:
    def __init__(self, budget: int):
        self.budget = budget
        self.derived = 0

    def charge(self, k: int):
        self.derived += k
        if self.derived > self.budget:
            raise BudgetExceededError(self.budget, self.derived)


def fm_eliminate(system: InequalitySystem, coord: int) -> InequalitySystem:
    """Project the system's solution set along one coordinate."""
    return fm_eliminate_with_multipliers(system, coord)[0]


def fm_eliminate_with_multipliers(system: InequalitySystem, coord: int):
    """Like :func:`fm_eliminate`, also returning, per output row, the exact
    multipliers on input rows (by position) that reproduce it: nonnegative on
    >= rows, sign-free on == rows."""
    if coord not in system.coordinates:
        raise DomainError(f"coordinate {coord} not in system")
    metarows = [(row, 1 << i, None) for i, row in enumerate(system.rows)]
    kept = _eliminate_once(metarows, coord)
    kept.sort(key=lambda t: t[0].sort_key())
    out = InequalitySystem(
        system.n,
        (m for m in system.coordinates if m != coord),
        (row for row, _, _ in kept),
    )
    assert len(out.rows) == len(kept)
    return out, tuple(mults for _, _, mults in kept)


def _chernikov_filter(metarows):
    """Drop rows whose ancestor set strictly contains another row's."""
    ancs = [anc for _, anc, _ in metarows]
    kept = []
    for i, (row, anc, mults) in enumerate(metarows):
        dominated = False
        for j, other in enumerate(ancs):
            if other != anc and other & anc == other:
                dominated = True
                break
        if not dominated:
            kept.append((row, anc, mults))
    return kept


def _score(metarows, coord) -> int:
    pos = neg = 0
    for row, _, _ in metarows:
        c = row.coefficient(coord)
        if c > 0:
            pos += 1
        elif c < 0:
            neg += 1
    return pos * neg


def project(
    system: InequalitySystem,
    keep: Iterable[int],
    redundancy: str = "pairwise",
    budget: int = DEFAULT_FM_BUDGET,
    threads: int = 1,
) -> InequalitySystem:
    """Eliminate every coordinate outside ``keep``.

    ``redundancy`` is the per-step policy: "pairwise" (duplicate and
    Chernikov filtering only) or "exact" (full LP-certified removal after
    every step).  A final exact pass always runs, so the result is an
    irredundant description of the projected cone either way.

    Elimination order: at each step the coordinate minimizing
    (#rows entering positively) * (#rows entering negatively), ties broken
    by canonical subset order.
    """
    if redundancy not in ("pairwise", "exact"):
        raise DomainError(f"unknown redundancy policy {redundancy!r}")
    keep_set = set(keep)
    unknown = keep_set - set(system.coordinates)
    if unknown:
        raise CoordinateMismatchError(f"keep-coordinates not in system: {sorted(unknown)}")

    counter = _Budget(budget)
    metarows = [(row, 1 << i, None) for i, row in enumerate(system.rows)]
    remaining = [m for m in system.coordinates if m not in keep_set]

    while remaining:
        coord = min(remaining, key=lambda m: (_score(metarows, m), subset_key(m)))
        remaining.remove(coord)
        metarows = _eliminate_once(metarows, coord, counter)
        metarows = _chernikov_filter(metarows)
        metarows.sort(key=lambda t: t[0].sort_key())
        if redundancy == "exact":
            rows = _exact_removal([r for r, _, _ in metarows], threads)
            row_set = set(rows)
            metarows = [t for t in metarows if t[0] in row_set]

    result = InequalitySystem(system.n, keep_set, (r for r, _, _ in metarows))
    return result.with_rows(_exact_removal(list(result.rows), threads))


# ---------------------------------------------------------------------------
# redundancy removal
# ---------------------------------------------------------------------------

def _pairwise_removal(rows: Sequence[LinearInequality]) -> list[LinearInequality]:
    """Duplicates are gone after normalization; additionally drop >= rows that
    coincide with an == row or its negation (single-row domination)."""
    eq_faces = set()
    for row in rows:
        if row.sense == EQ:
            eq_faces.add(frozenset(row.coeffs.items()))
            eq_faces.add(frozenset(row.negated().coeffs.items()))
    out = []
    for row in rows:
        if row.sense == GE and frozenset(row.coeffs.items()) in eq_faces:
            continue
        out.append(row)
    return out


def _exact_removal(rows: list[LinearInequality], threads: int = 1) -> list[LinearInequality]:
    """Sequential irredundancy sweep in canonical order.

    A first (optionally parallel) wave checks each row against all others;
    rows not implied there are kept outright.  Flagged rows are then dropped
    one at a time, reusing a wave certificate when every row it depends on is
    still active and rechecking otherwise.
    """
    rows = _pairwise_removal(rows)
    if len(rows) <= 1:
        return rows

    def wave_check(i):
        others = rows[:i] + rows[i + 1:]
        return _row_implied(rows[i], others)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            wave = list(pool.map(wave_check, range(len(rows))))
    else:
        wave = [wave_check(i) for i in range(len(rows))]

    active = dict.fromkeys(rows)
    for i, row in enumerate(rows):
        implied, support = wave[i]
        if not implied:
            continue
        if support <= (active.keys() - {row}):
            del active[row]
            continue
        others = [r for r in active if r is not row]
        if _row_implied(row, others)[0]:
            del active[row]
    return list(active)


def remove_redundant(
    system: InequalitySystem, policy: str = "pairwise", threads: int = 1
) -> InequalitySystem:
    """Drop redundant rows.

    "pairwise": normalization-level duplicates and single-row domination.
    "exact": additionally remove every row implied by the remaining ones,
    yielding an irredundant description (each survivor has an LP witness
    point violating only it).
    """
    if policy == "pairwise":
        return system.with_rows(_pairwise_removal(system.rows))
    if policy == "exact":
        return system.with_rows(_exact_removal(list(system.rows), threads))
    raise DomainError(f"unknown redundancy policy {policy!r}")


# ---------------------------------------------------------------------------
# LP over a cone
# ---------------------------------------------------------------------------

@dataclass
class LPResult:
    """Exact LP outcome over a homogeneous system.

    A homogeneous cone always contains the origin, so a linear functional
    either has minimum 0 (it is valid; ``multipliers`` derive it from the
    rows) or is unbounded below (``ray`` is a cone point with negative
    value).  ``infeasible`` is reserved for inhomogeneous callers.
    """

    status: str
    optimum: Fraction | None = None
    multipliers: tuple[tuple[LinearInequality, Fraction], ...] | None = None
    ray: dict[int, Fraction] | None = None


def lp_solve(
    objective: Mapping[int, Fraction | int],
    constraints: InequalitySystem,
    direction: str = "min",
) -> LPResult:
    """Optimize a linear functional of the coordinates over the cone."""
    if direction not in ("min", "max"):
        raise DomainError(f"unknown direction {direction!r}")
    coord_set = set(constraints.coordinates)
    for m in objective:
        if m not in coord_set:
            raise DomainError(f"objective coordinate {m} not in system")
    sign = 1 if direction == "min" else -1
    target = LinearInequality({m: sign * Fraction(c) for m, c in objective.items()})
    if target.is_trivial():
        return LPResult("optimal", optimum=Fraction(0), multipliers=())
    res = implied_by(target, constraints.rows, constraints.coordinates)
    if res.implied:
        return LPResult("optimal", optimum=Fraction(0), multipliers=res.multipliers)
    return LPResult("unbounded", ray=res.witness)


# ---------------------------------------------------------------------------
# extension feasibility (projection's dual view)
# ---------------------------------------------------------------------------

@dataclass
class ExtensionFeasibility:
    feasible: bool
    point: dict[int, Fraction] | None = None
    #: infeasible case: nonnegative multipliers on >= rows (sign-free on ==)
    #: deriving a valid inequality that the fixed values violate
    combination: tuple[tuple[LinearInequality, Fraction], ...] | None = None
    derived: LinearInequality | None = None


def extension_feasible(
    system: InequalitySystem, fixed: Mapping[int, Fraction | int]
) -> ExtensionFeasibility:
    """Is there a point of the cone taking the given values on ``fixed``?"""
    coords = list(system.coordinates)
    coord_index = {m: k for k, m in enumerate(coords)}
    for m in fixed:
        if m not in coord_index:
            raise CoordinateMismatchError(f"fixed coordinate {m} not in system")

    ncoords = len(coords)
    ge_rows = [r for r in system.rows if r.sense == GE]
    # columns: u_m, v_m (free split), then one slack per >= row
    ncols = 2 * ncoords + len(ge_rows)
    eqs: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    row_of_eq: list[object] = []

    slack = 2 * ncoords
    for row in system.rows:
        eq: dict[int, Fraction] = {}
        for mask, c in row.coeffs.items():
            k = coord_index[mask]
            eq[k] = Fraction(c)
            eq[ncoords + k] = Fraction(-c)
        if row.sense == GE:
            eq[slack] = Fraction(-1)
            slack += 1
        eqs.append(eq)
        rhs.append(Fraction(0))
        row_of_eq.append(row)
    for mask in sort_subsets(fixed):
        k = coord_index[mask]
        eqs.append({k: Fraction(1), ncoords + k: Fraction(-1)})
        rhs.append(Fraction(fixed[mask]))
        row_of_eq.append(("value", mask))

    res = solve_feasibility(eqs, rhs, ncols)
    if res.feasible:
        point = {
            m: res.x[k] - res.x[ncoords + k] for k, m in enumerate(coords)
        }
        return ExtensionFeasibility(True, point=point)

    combo: list[tuple[LinearInequality, Fraction]] = []
    derived: dict[int, Fraction] = {}
    for y, label in zip(res.farkas, row_of_eq):
        if y and isinstance(label, LinearInequality):
            combo.append((label, y))
            for mask, c in label.coeffs.items():
                derived[mask] = derived.get(mask, Fraction(0)) + y * c
    return ExtensionFeasibility(
        False,
        combination=tuple(combo),
        derived=LinearInequality(derived),
    )
