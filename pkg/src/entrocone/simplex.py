"""Exact-rational feasibility core.

Solves  find x >= 0 with A x = b  exactly, returning either a feasible point
or a Farkas certificate y (y A <= 0 componentwise, y b > 0).  Everything the
package decides — redundancy, derivability, extendability, marginal
feasibility — reduces to this one question, so no other LP machinery exists.

The tableau uses fraction-free integer pivoting (one global denominator, the
previous pivot element), so the inner loop is pure bigint arithmetic.  The
default pivot rule is Dantzig's, switching permanently to Bland's rule if the
phase-1 objective stalls, which keeps the run deterministic and cycle-free.
Results are verified by substitution against the caller's rows before being
returned; a failed verification is a bug, not an input error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

#: consecutive pivots without phase-1 objective progress before Bland's rule
#: takes over for good
STALL_LIMIT = 40

#: hard cap on pivots; hitting it means a cycling bug, not a big problem
ITERATION_CAP = 2_000_000


@dataclass
class FeasibilityResult:
    feasible: bool
    x: list[Fraction] | None = None
    farkas: list[Fraction] | None = None
    pivots: int = 0


def _scale_row(coeffs: Mapping[int, Fraction | int], rhs) -> tuple[dict[int, int], int, Fraction]:
    """Clear denominators; flip sign so the rhs is nonnegative.

    Returns (integer coeffs, integer rhs, t) with scaled = t * original.
    """
    rhs = Fraction(rhs)
    lcm = rhs.denominator
    for c in coeffs.values():
        cf = Fraction(c)
        lcm = lcm * cf.denominator // gcd(lcm, cf.denominator)
    t = Fraction(lcm)
    if rhs < 0:
        t = -t
    ints = {j: int(Fraction(c) * t) for j, c in coeffs.items() if c}
    return ints, int(rhs * t), t


def solve_feasibility(
    rows: Sequence[Mapping[int, Fraction | int]],
    rhs: Sequence[Fraction | int],
    ncols: int,
    pivot_rule: str = "auto",
) -> FeasibilityResult:
    """Decide whether {x >= 0 : rows . x = rhs} is non-empty, exactly.

    ``rows`` are sparse maps column-index -> coefficient.  ``pivot_rule`` is
    "auto" (Dantzig with Bland fallback) or "bland".
    """
    m = len(rows)
    if m != len(rhs):
        raise ValueError("rows and rhs length mismatch")

    scaled: list[dict[int, int]] = []
    scaled_rhs: list[int] = []
    t_mult: list[Fraction] = []
    for row, r in zip(rows, rhs):
        ints, ri, t = _scale_row(row, r)
        scaled.append(ints)
        scaled_rhs.append(ri)
        t_mult.append(t)

    # Tableau: m constraint rows + phase-1 objective row; columns are the
    # structural variables, one artificial per row, then the rhs.
    width = ncols + m + 1
    rhs_col = width - 1
    tableau: list[list[int]] = []
    for i in range(m):
        row = [0] * width
        for j, c in scaled[i].items():
            row[j] = c
        row[ncols + i] = 1
        row[rhs_col] = scaled_rhs[i]
        tableau.append(row)
    wrow = [0] * width
    for j in range(ncols):
        wrow[j] = -sum(tableau[i][j] for i in range(m))
    wrow[rhs_col] = -sum(scaled_rhs)
    tableau.append(wrow)

    basis = list(range(ncols, ncols + m))
    den = 1
    bland = pivot_rule == "bland"
    stall = 0
    last_obj = Fraction(-wrow[rhs_col])
    pivots = 0

    while True:
        wrow = tableau[m]
        col = -1
        if bland:
            for j in range(ncols):
                if wrow[j] < 0:
                    col = j
                    break
        else:
            best = 0
            for j in range(ncols):
                wj = wrow[j]
                if wj < best:
                    best = wj
                    col = j
        if col < 0:
            break

        # ratio test: min rhs_i / T[i][col] over T[i][col] > 0, ties broken
        # towards the smallest basis variable (Bland-compatible)
        r = -1
        rnum = rden = 0
        for i in range(m):
            tic = tableau[i][col]
            if tic > 0:
                bi = tableau[i][rhs_col]
                if r < 0 or bi * rden < rnum * tic or (
                    bi * rden == rnum * tic and basis[i] < basis[r]
                ):
                    r, rnum, rden = i, bi, tic
        if r < 0:
            raise RuntimeError("phase-1 objective unbounded; scaling bug")

        pivots += 1
        if pivots > ITERATION_CAP:
            raise RuntimeError("simplex iteration cap exceeded")

        prow = tableau[r]
        p = prow[col]
        for i in range(m + 1):
            if i == r:
                continue
            ti = tableau[i]
            f = ti[col]
            if f:
                tableau[i] = [(p * a - f * b) // den for a, b in zip(ti, prow)]
            elif p != den:
                tableau[i] = [p * a // den for a in ti]
        den = p
        basis[r] = col

        if not bland and pivot_rule == "auto":
            obj = Fraction(-tableau[m][rhs_col], den)
            if obj == last_obj:
                stall += 1
                if stall >= STALL_LIMIT:
                    bland = True
            else:
                stall = 0
                last_obj = obj

    wval = Fraction(-tableau[m][rhs_col], den)
    if wval == 0:
        x = [Fraction(0)] * ncols
        for i, bv in enumerate(basis):
            if bv < ncols:
                x[bv] = Fraction(tableau[i][rhs_col], den)
        _verify_point(rows, rhs, x)
        return FeasibilityResult(True, x=x, pivots=pivots)

    wrow = tableau[m]
    y = [
        (1 - Fraction(wrow[ncols + i], den)) * t_mult[i]
        for i in range(m)
    ]
    _verify_farkas(rows, rhs, y, ncols)
    return FeasibilityResult(False, farkas=y, pivots=pivots)


def _verify_point(rows, rhs, x):
    for xi in x:
        if xi < 0:
            raise RuntimeError("feasibility certificate has negative entry")
    for row, r in zip(rows, rhs):
        if sum(Fraction(c) * x[j] for j, c in row.items()) != Fraction(r):
            raise RuntimeError("feasible point fails an equation; pivot bug")


def _verify_farkas(rows, rhs, y, ncols):
    col_sums: dict[int, Fraction] = {}
    for yi, row in zip(y, rows):
        if yi:
            for j, c in row.items():
                col_sums[j] = col_sums.get(j, Fraction(0)) + yi * Fraction(c)
    if any(s > 0 for s in col_sums.values()):
        raise RuntimeError("Farkas certificate fails a column; pivot bug")
    if sum(yi * Fraction(r) for yi, r in zip(y, rhs)) <= 0:
        raise RuntimeError("Farkas certificate does not separate; pivot bug")
