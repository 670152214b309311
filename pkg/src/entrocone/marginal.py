"""The marginal problem as an exact linear program over joint outcomes.

A compatible family of marginal tables is non-contextual exactly when some
joint distribution reproduces every table.  With finite alphabets that is a
feasibility question for the vector of joint outcome probabilities: one
nonnegative variable per point of the product outcome space, one equation
per (maximal member, outcome) pair, plus total mass one.  Infeasibility
comes back with a Farkas certificate; feasibility with an explicit joint.

The number of variables is the product of the alphabet sizes, so a cap
(default 10^6) refuses runs that could not finish anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .distributions import JointDistribution, MarginalModel, check_compatibility
from .errors import CapExceededError, IncompatibleModelError
from .simplex import solve_feasibility
from .subsets import unpack

DEFAULT_OUTCOME_CAP = 10**6


@dataclass(frozen=True)
class MarginalLPResult:
    contextual: bool
    joint: JointDistribution | None = None
    #: Farkas certificate: one multiplier per constraint row, labelled
    #: (member mask, outcome tuple) or ("mass",); any joint reproducing the
    #: tables would contradict it
    certificate: tuple[tuple[object, Fraction], ...] | None = None


def marginal_lp(model: MarginalModel, cap: int = DEFAULT_OUTCOME_CAP) -> MarginalLPResult:
    """Decide contextuality of a compatible marginal model exactly.

    Raises :class:`IncompatibleModelError` if the tables are not a marginal
    model at all, and :class:`CapExceededError` if the joint outcome space
    exceeds ``cap``.
    """
    report = check_compatibility(model)
    if not report.compatible:
        s, t, dev = report.violations[0]
        raise IncompatibleModelError(
            f"tables for {model.scenario.member_label(s)} and "
            f"{model.scenario.member_label(t)} disagree (total variation {dev})"
        )

    scenario = model.scenario
    variables = sorted(
        {v for g in scenario.generators for v in unpack(g)}
    )
    alphabets = {}
    for g in scenario.generators:
        for v, a in model.tables[g].alphabets.items():
            alphabets[v] = tuple(a)
    size = 1
    for v in variables:
        size *= len(alphabets[v])
    if size > cap:
        raise CapExceededError(
            f"joint outcome space has {size} points, above the cap {cap}"
        )

    spaces = [alphabets[v] for v in variables]
    joints = list(product(*spaces))
    index_of = {t: k for k, t in enumerate(joints)}
    pos_of = {v: i for i, v in enumerate(variables)}

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    labels: list[object] = []
    for g in scenario.generators:
        table = model.tables[g]
        positions = [pos_of[v] for v in table.variables]
        buckets: dict[tuple, list[int]] = {}
        for t in joints:
            buckets.setdefault(tuple(t[p] for p in positions), []).append(index_of[t])
        for outcome in sorted(
            buckets, key=lambda o: tuple(alphabets[v].index(x)
                                         for v, x in zip(table.variables, o))
        ):
            rows.append({k: Fraction(1) for k in buckets[outcome]})
            rhs.append(table.probabilities.get(outcome, Fraction(0)))
            labels.append((g, outcome))
    rows.append({k: Fraction(1) for k in range(len(joints))})
    rhs.append(Fraction(1))
    labels.append(("mass",))

    res = solve_feasibility(rows, rhs, len(joints))
    if res.feasible:
        probs = {
            joints[k]: p for k, p in enumerate(res.x) if p
        }
        joint = JointDistribution(tuple(variables), alphabets, probs)
        return MarginalLPResult(False, joint=joint)
    cert = tuple(
        (label, y) for label, y in zip(labels, res.farkas) if y
    )
    return MarginalLPResult(True, certificate=cert)
