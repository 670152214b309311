"""Exact linear inequalities over subset coordinates.

A row represents  sum_S c[S] * f(S)  (>= 0  or  == 0)  with integer
coefficients.  Rows are normalized on construction: coefficients divided by
their gcd, zero entries dropped, and equality rows sign-fixed so that the
coefficient of the canonically smallest subset in the support is positive.
Two rows describing the same halfspace/hyperplane therefore compare equal.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import CoordinateMismatchError, DomainError
from .subsets import sort_subsets, subset_key, subset_label

GE = "ge"
EQ = "eq"

_SENSE_RANK = {EQ: 0, GE: 1}
_SENSE_SYMBOL = {GE: ">=", EQ: "=="}


class LinearInequality:
    """One normalized row.  Immutable and hashable."""

    __slots__ = ("coeffs", "sense", "_items", "_hash")

    def __init__(self, coeffs: Mapping[int, int | Fraction], sense: str = GE):
        if sense not in (GE, EQ):
            raise DomainError(f"unknown sense {sense!r}")
        sparse = {m: Fraction(c) for m, c in coeffs.items() if c}
        if sparse:
            denom_lcm = 1
            for c in sparse.values():
                denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
            ints = {m: int(c * denom_lcm) for m, c in sparse.items()}
            g = 0
            for c in ints.values():
                g = gcd(g, c)
            ints = {m: c // g for m, c in ints.items()}
            if sense == EQ:
                first = min(ints, key=subset_key)
                if ints[first] < 0:
                    ints = {m: -c for m, c in ints.items()}
        else:
            ints = {}
        items = tuple(sorted(ints.items(), key=lambda mc: subset_key(mc[0])))
        object.__setattr__(self, "coeffs", dict(items))
        object.__setattr__(self, "sense", sense)
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_hash", hash((sense, items)))

    def __setattr__(self, name, value):
        raise AttributeError("LinearInequality is immutable")

    # -- value semantics ----------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, LinearInequality)
            and self.sense == other.sense
            and self._items == other._items
        )

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (_SENSE_RANK[self.sense], tuple((subset_key(m), c) for m, c in self._items))

    # -- queries ------------------------------------------------------------

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self._items)

    def is_trivial(self) -> bool:
        """True for the vacuous rows 0 >= 0 / 0 == 0."""
        return not self._items

    def coefficient(self, mask: int) -> int:
        return self.coeffs.get(mask, 0)

    def evaluate(self, values: Mapping[int, object]):
        """Left-hand side at a coordinate assignment (any number type)."""
        total = 0
        try:
            for m, c in self._items:
                total += c * values[m]
        except KeyError as exc:
            raise CoordinateMismatchError(
                f"vector lacks coordinate {exc.args[0]}"
            ) from None
        return total

    def satisfied_by(self, values: Mapping[int, object], tol=0) -> bool:
        lhs = self.evaluate(values)
        if self.sense == EQ:
            return -tol <= lhs <= tol
        return lhs >= -tol

    def negated(self) -> "LinearInequality":
        """The row with all coefficients negated (flips a >= row's meaning)."""
        return LinearInequality({m: -c for m, c in self._items}, self.sense)

    # -- formatting ----------------------------------------------------------

    def format(self, labels: Sequence[str]) -> str:
        if not self._items:
            return f"0 {_SENSE_SYMBOL[self.sense]} 0"
        parts = []
        for m, c in self._items:
            term = f"{abs(c)}*H({subset_label(m, labels)})"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts) + f" {_SENSE_SYMBOL[self.sense]} 0"

    def __repr__(self):
        body = " ".join(f"{c:+d}*f({m:#x})" for m, c in self._items) or "0"
        return f"<{body} {_SENSE_SYMBOL[self.sense]} 0>"


class InequalitySystem:
    """A finite system of rows over an explicit coordinate list.

    Rows are stored deduplicated and canonically sorted (equalities first);
    the coordinate list is in canonical subset order.  Instances are treated
    as immutable values.
    """

    __slots__ = ("n", "coordinates", "rows")

    def __init__(
        self,
        n: int,
        coordinates: Iterable[int],
        rows: Iterable[LinearInequality],
    ):
        coords = sort_subsets(set(coordinates))
        coord_set = set(coords)
        seen: dict[LinearInequality, None] = {}
        for row in rows:
            if row.is_trivial():
                continue
            for m in row.support:
                if m not in coord_set:
                    raise CoordinateMismatchError(
                        f"row {row!r} uses coordinate {m} outside the system"
                    )
            seen.setdefault(row)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(
            self, "rows", tuple(sorted(seen, key=LinearInequality.sort_key))
        )

    def __setattr__(self, name, value):
        raise AttributeError("InequalitySystem is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, InequalitySystem)
            and self.n == other.n
            and self.coordinates == other.coordinates
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.n, self.coordinates, self.rows))

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def equalities(self) -> tuple[LinearInequality, ...]:
        return tuple(r for r in self.rows if r.sense == EQ)

    @property
    def inequalities(self) -> tuple[LinearInequality, ...]:
        return tuple(r for r in self.rows if r.sense == GE)

    def with_rows(self, rows: Iterable[LinearInequality]) -> "InequalitySystem":
        return InequalitySystem(self.n, self.coordinates, rows)

    def satisfied_by(self, values: Mapping[int, object], tol=0) -> bool:
        return all(r.satisfied_by(values, tol) for r in self.rows)

    def violations(self, values: Mapping[int, object], tol=0):
        """(row, lhs) pairs for every violated row."""
        out = []
        for r in self.rows:
            lhs = r.evaluate(values)
            if r.sense == EQ:
                if not (-tol <= lhs <= tol):
                    out.append((r, lhs))
            elif lhs < -tol:
                out.append((r, lhs))
        return out

    def __repr__(self):
        return (
            f"InequalitySystem(n={self.n}, dim={len(self.coordinates)}, "
            f"rows={len(self.rows)})"
        )
