"""Seeded random desk-scale trees, markets and claims for property sweeps.

Bid-ask entries are ``S^j / S^i * spread`` with random mid prices S per node
and spread factors in [1, 4], then chain-tightened so the triangle condition
holds. Moving mid prices make arbitrage possible; frictionless pairs
(spread 1 both ways) appear with positive probability.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .market import BidAskMatrix, BidAskProcess, chain_tighten
from .tree import AdaptedVector, ScenarioTree


@dataclass(frozen=True)
class MarketConfig:
    dims: tuple = (2, 2, 3)
    horizons: tuple = (1, 1, 2, 2, 0)
    max_leaves: int = 6
    max_branching: int = 3
    spreads: tuple = (Fraction(1), Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2),
                      Fraction(3), Fraction(4))
    prices: tuple = (Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(1), Fraction(3, 2),
                     Fraction(2), Fraction(3))
    frictionless_pair: float = 0.2


DEFAULT = MarketConfig()


def random_tree(rng: random.Random, T: int | None = None, max_leaves: int | None = None,
                config: MarketConfig = DEFAULT) -> ScenarioTree:
    T = rng.choice(config.horizons) if T is None else T
    max_leaves = max_leaves or config.max_leaves
    nodes = [("0", 0, None)]
    frontier = ["0"]
    for t in range(1, T + 1):
        nxt = []
        for k, u in enumerate(frontier):
            # leave room for one child under each remaining frontier node
            room = max_leaves - len(nxt) - (len(frontier) - k - 1)
            for c in range(rng.randint(1, max(1, min(config.max_branching, room)))):
                cid = f"{u}.{c}" if u != "0" else str(c + 1)
                nodes.append((cid, t, u))
                nxt.append(cid)
        frontier = nxt
    weights = [Fraction(rng.randint(1, 4)) for _ in frontier]
    total = sum(weights)
    return ScenarioTree(T, nodes, {u: w / total for u, w in zip(frontier, weights)})


def random_matrix(rng: random.Random, d: int, config: MarketConfig = DEFAULT) -> BidAskMatrix:
    S = [Fraction(1)] + [rng.choice(config.prices) for _ in range(d - 1)]
    P = [[Fraction(1)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            if rng.random() < config.frictionless_pair:
                a = b = Fraction(1)
            else:
                a, b = rng.choice(config.spreads), rng.choice(config.spreads)
            P[i][j] = S[j] / S[i] * a
            P[j][i] = S[i] / S[j] * b
    return chain_tighten(BidAskMatrix(P))


def random_market(rng: random.Random, d: int | None = None, T: int | None = None,
                  max_leaves: int | None = None, config: MarketConfig = DEFAULT) -> BidAskProcess:
    d = d or rng.choice(config.dims)
    tree = random_tree(rng, T, max_leaves, config)
    return BidAskProcess(tree, {u: random_matrix(rng, d, config) for u in tree.node_ids()})


def random_vector(rng: random.Random, d: int, lo: int = -3, hi: int = 3) -> tuple:
    return tuple(Fraction(rng.randint(lo, hi), rng.choice([1, 1, 2, 3])) for _ in range(d))


def random_claim(rng: random.Random, market: BidAskProcess, t: int | None = None) -> AdaptedVector:
    tree = market.tree
    t = tree.horizon if t is None else t
    return AdaptedVector(t, {u: random_vector(rng, market.d) for u in tree.nodes_at(t)})


def random_reweighting(rng: random.Random, tree: ScenarioTree) -> ScenarioTree:
    w = {l: Fraction(rng.randint(1, 9)) for l in tree.leaves}
    total = sum(w.values())
    return tree.reweighted({l: v / total for l, v in w.items()})
