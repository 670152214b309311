"""Named reference objects: the three-coins models, their cycle
generalizations, the common-ancestor causal network, and the inequalities
derived for it.  All are addressable by name from the command line for
regression pinning.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .analytic import zy_marginal_model, zy_partial_polymatroid, zhang_yeung_inequality
from .cones import BayesNet
from .distributions import JointDistribution, MarginalModel
from .errors import DomainError
from .linear import LinearInequality
from .subsets import Scenario, cycle_scenario, pack, zy_scenario

COIN = ("heads", "tails")


def _pair_table(u: int, v: int, kind: str) -> JointDistribution:
    """Two fair coins u < v: perfectly 'correlated', 'anticorrelated', or
    'independent'."""
    alphabets = {u: COIN, v: COIN}
    probs = {}
    for a, b in product(COIN, repeat=2):
        if kind == "correlated":
            p = Fraction(1, 2) if a == b else Fraction(0)
        elif kind == "anticorrelated":
            p = Fraction(0) if a == b else Fraction(1, 2)
        elif kind == "independent":
            p = Fraction(1, 4)
        else:
            raise DomainError(f"unknown pair kind {kind!r}")
        if p:
            probs[(a, b)] = p
    return JointDistribution((u, v), alphabets, probs)


def _cycle_model(n: int, last_edge: str) -> MarginalModel:
    scenario = cycle_scenario(n)
    tables = {}
    for i in range(1, n + 1):
        u, v = sorted(((i - 1) % n + 1, i % n + 1))
        kind = "correlated" if i < n else last_edge
        tables[pack({u, v})] = _pair_table(u, v, kind)
    return MarginalModel.from_generator_tables(scenario, tables)


def three_coins_anticorrelated() -> MarginalModel:
    """Three fair coins, each adjacent pair perfectly correlated except
    {1,3}, which is perfectly anticorrelated.  Contextual (transitivity of
    perfect correlation), yet its entropies satisfy every cycle facet."""
    return _cycle_model(3, "anticorrelated")


def three_coins_uncorrelated() -> MarginalModel:
    """Like :func:`three_coins_anticorrelated` but with the pair {1,3}
    independent; its entropies violate the triangle facet by one bit."""
    return _cycle_model(3, "independent")


def three_coins_correlated() -> MarginalModel:
    """All three pairs perfectly correlated; non-contextual (the global
    coin)."""
    return _cycle_model(3, "correlated")


def cycle_contextual_model(n: int) -> MarginalModel:
    """The n-cycle generalization of :func:`three_coins_uncorrelated`:
    perfect correlation along edges {i,i+1}, i < n, and an independent pair
    on {n,1}.  Its entropy vector violates exactly the cycle row of the
    independent edge, by one bit."""
    return _cycle_model(n, "independent")


def shared_bit_cycle_model(n: int, active: int) -> MarginalModel:
    """Cycle model in which the variables of ``active`` (a mask) output one
    shared fair coin and all others are deterministic.  Entropy is the
    indicator of meeting ``active``: H(A_S) = 1 if S intersects it, else 0."""
    scenario = cycle_scenario(n)
    tables = {}
    for i in range(1, n + 1):
        u, v = sorted(((i - 1) % n + 1, i % n + 1))
        ubit = bool(active & (1 << (u - 1)))
        vbit = bool(active & (1 << (v - 1)))
        alphabets = {u: COIN, v: COIN}
        probs: dict[tuple, Fraction] = {}
        for c in COIN:
            outcome = (c if ubit else COIN[0], c if vbit else COIN[0])
            probs[outcome] = probs.get(outcome, Fraction(0)) + Fraction(1, 2)
        tables[pack({u, v})] = JointDistribution((u, v), alphabets, probs)
    return MarginalModel.from_generator_tables(scenario, tables)


def common_ancestor_net() -> tuple[BayesNet, int]:
    """Six variables: observed 1, 3, 5; hidden 2, 4, 6, each hidden one a
    common parent of two cyclically adjacent observed ones.  Returns the net
    and the observed-set mask."""
    net = BayesNet(6, ((2, 1), (2, 3), (4, 3), (4, 5), (6, 5), (6, 1)))
    return net, pack({1, 3, 5})


def common_ancestor_pair_bound() -> LinearInequality:
    """H(A1 A3) + H(A3 A5) >= H(A1) + H(A3) + H(A5): valid whenever no single
    hidden cause influences all three observed variables."""
    return LinearInequality(
        {
            pack({1, 3}): 1,
            pack({3, 5}): 1,
            pack({1}): -1,
            pack({3}): -1,
            pack({5}): -1,
        }
    )


def common_ancestor_triple_bound() -> LinearInequality:
    """2 H(A1 A3 A5) >= H(A1) + H(A3) + H(A5), the weaker common-ancestor
    witness implied by :func:`common_ancestor_pair_bound`."""
    return LinearInequality(
        {
            pack({1, 3, 5}): 2,
            pack({1}): -1,
            pack({3}): -1,
            pack({5}): -1,
        }
    )


# registry used by the CLI `fixture` subcommand; values are (kind, producer)
# with kind one of scenario / model / vector / inequality / bayesnet
FIXTURES = {
    "three-coins-anticorrelated": ("model", three_coins_anticorrelated),
    "three-coins-uncorrelated": ("model", three_coins_uncorrelated),
    "three-coins-correlated": ("model", three_coins_correlated),
    "zy-partial": ("vector", zy_partial_polymatroid),
    "zy-model": ("model", zy_marginal_model),
    "zy-scenario": ("scenario", zy_scenario),
    "zhang-yeung": ("inequality", lambda: (4, zy_scenario().labels, [zhang_yeung_inequality()])),
    "common-ancestor-net": ("bayesnet", common_ancestor_net),
    "common-ancestor-pair-bound": ("inequality", lambda: (6, None, [common_ancestor_pair_bound()])),
    "common-ancestor-triple-bound": ("inequality", lambda: (6, None, [common_ancestor_triple_bound()])),
}


def fixture_names() -> list[str]:
    names = sorted(FIXTURES)
    names.extend(["cycle-scenario-<n>", "cycle-contextual-<n>"])
    return names


def get_fixture(name: str):
    """Resolve a fixture name, including the parametrized cycle families."""
    if name in FIXTURES:
        kind, producer = FIXTURES[name]
        return kind, producer()
    for prefix, kind, producer in (
        ("cycle-scenario-", "scenario", cycle_scenario),
        ("cycle-contextual-", "model", cycle_contextual_model),
    ):
        if name.startswith(prefix):
            try:
                n = int(name[len(prefix):])
            except ValueError:
                raise DomainError(f"bad fixture name {name!r}") from None
            return kind, producer(n)
    raise DomainError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
