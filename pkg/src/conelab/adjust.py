"""Adjusted bid-ask process: make a pair frictionless where the reverse trade is attainable.

On a finite tree A is a finite sum of polyhedral cones, hence closed, so the
closure of A is A itself and every test below is a plain membership LP.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .attain import GlobalCone, assemble_A, cone_included, member_A
from .market import BidAskMatrix, BidAskProcess, pairs
from .price import ArbitrageWitness, check_arbitrage
from .tree import AdaptedVector


@dataclass
class BSetTable:
    """``sets[(i, j, t)]`` is the set of atoms at t where -z^{ij}_t 1_u is attainable."""

    sets: dict

    def __getitem__(self, key) -> frozenset:
        return self.sets[key]

    def contains(self, i: int, j: int, u: str, t: int) -> bool:
        return u in self.sets[(i, j, t)]


def reverse_trade_claim(market: BidAskProcess, i: int, j: int, u: str) -> AdaptedVector:
    """-z^{ij}(u) = pi^{ij} e_i - e_j on the leaves under u, zero elsewhere."""
    tree = market.tree
    d = market.d
    v = [Fraction(0)] * d
    v[i] += market[u][i, j]
    v[j] -= 1
    under = set(tree.leaves_under(u))
    zero = (Fraction(0),) * d
    return AdaptedVector(tree.horizon, {l: tuple(v) if l in under else zero for l in tree.leaves})


def compute_B_sets(market: BidAskProcess, cone: GlobalCone | None = None) -> BSetTable:
    cone = cone or assemble_A(market)
    tree = market.tree
    sets = {}
    for t in range(tree.horizon + 1):
        for i, j in pairs(market.d):
            sets[(i, j, t)] = frozenset(u for u in tree.nodes_at(t)
                                        if member_A(cone, reverse_trade_claim(market, i, j, u)).member)
    return BSetTable(sets)


@dataclass
class AdjustedMarket:
    original: BidAskProcess
    bsets: BSetTable
    process: BidAskProcess


def adjust_matrices(market: BidAskProcess, bsets: BSetTable) -> BidAskProcess:
    tree = market.tree
    mats = {}
    for u in tree.node_ids():
        t = tree.time(u)
        P = market[u].entries
        Q = [list(r) for r in P]
        for i, j in pairs(market.d):
            if u in bsets[(i, j, t)]:
                Q[j][i] = 1 / P[i][j]
        mats[u] = BidAskMatrix(Q, triangle_required=False)
    return BidAskProcess(tree, mats)


def adjusted_market(market: BidAskProcess) -> AdjustedMarket:
    bsets = compute_B_sets(market)
    return AdjustedMarket(market, bsets, adjust_matrices(market, bsets))


@dataclass
class T2Report:
    A_in_adjusted: bool
    adjusted_arbitrage: ArbitrageWitness | None
    adjusted_equals_A: bool | None
    adjusted: AdjustedMarket

    @property
    def adjusted_arbitrage_free(self) -> bool:
        return self.adjusted_arbitrage is None

    def as_dict(self) -> dict:
        return {"A_subset_of_adjusted": self.A_in_adjusted,
                "adjusted_arbitrage_free": self.adjusted_arbitrage_free,
                "adjusted_equals_A": self.adjusted_equals_A}


def verify_t2(market: BidAskProcess, adjusted: AdjustedMarket | None = None) -> T2Report:
    """A inside the adjusted cone; and equality whenever the adjusted cone is arbitrage-free."""
    adjusted = adjusted or adjusted_market(market)
    A = assemble_A(market)
    At = assemble_A(adjusted.process)
    inside = bool(cone_included(A, At))
    arb = check_arbitrage(adjusted.process, At)
    equal = None
    if arb is None:
        equal = inside and bool(cone_included(At, A))
    return T2Report(inside, arb, equal, adjusted)


def entrywise_le(a: BidAskProcess, b: BidAskProcess) -> bool:
    return all(x <= y for u in a.tree.node_ids()
               for ra, rb in zip(a[u].entries, b[u].entries) for x, y in zip(ra, rb))
