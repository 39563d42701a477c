"""Built-in example markets (finite truncations of countable examples).

Countable sample spaces {1, 2, ...} with P(n) = 2^-n are truncated to
{1, ..., N} and renormalized by 1 / (1 - 2^-N). Leaf ids are the atom
labels "1".."N"; the root is "0".
"""
from __future__ import annotations

from fractions import Fraction

from .market import BidAskMatrix, BidAskProcess, chain_tighten, complete_by_chains
from .tree import ScenarioTree

NAMES = ("eg1", "eg3", "eg32", "eg41")


def truncated_geometric(N: int) -> dict[str, Fraction]:
    norm = 1 - Fraction(1, 2 ** N)
    return {str(n): Fraction(1, 2 ** n) / norm for n in range(1, N + 1)}


def one_period_tree(probs: dict[str, Fraction]) -> ScenarioTree:
    nodes = [("0", 0, None)] + [(k, 1, "0") for k in probs]
    return ScenarioTree(1, nodes, probs)


def _two_asset(a12, a21) -> BidAskMatrix:
    return BidAskMatrix([[1, a12], [a21, 1]])


def _off_diagonal(d: int, default, special: dict) -> BidAskMatrix:
    """0-based ``special`` entries, ``default`` elsewhere off the diagonal."""
    return BidAskMatrix([[1 if i == j else special.get((i, j), default) for j in range(d)]
                         for i in range(d)])


def _check_N(N: int) -> None:
    if N < 2:
        raise ValueError(f"truncation level N must be >= 2, got {N}")


def eg1(N: int) -> BidAskProcess:
    """Cheap asset 2 at t=0 (rates 1 and 2), frictionless at t=1."""
    _check_N(N)
    tree = one_period_tree(truncated_geometric(N))
    mats = {"0": _two_asset(1, 2)}
    mats.update({l: _two_asset(1, 1) for l in tree.leaves})
    return BidAskProcess(tree, mats)


def eg3(N: int) -> BidAskProcess:
    """Frictionless at t=0, rates 1 and 2 at t=1."""
    _check_N(N)
    tree = one_period_tree(truncated_geometric(N))
    mats = {"0": _two_asset(1, 1)}
    mats.update({l: _two_asset(1, 2) for l in tree.leaves})
    return BidAskProcess(tree, mats)


def eg32(N: int) -> BidAskProcess:
    """Four assets; at t=1 rates depend on the atom w through w and 1/w."""
    _check_N(N)
    tree = one_period_tree(truncated_geometric(N))
    mats = {"0": _off_diagonal(4, 3, {(1, 0): 1, (3, 2): 1})}
    for l in tree.leaves:
        w = Fraction(int(l))
        mats[l] = complete_by_chains(4, {(0, 3): w, (3, 0): 1 / w, (1, 2): w, (2, 1): 1 / w,
                                         (3, 2): 1, (2, 3): 3})
    return BidAskProcess(tree, mats)


def eg41(N: int | None = None) -> BidAskProcess:
    """Four assets, two atoms; the quoted rates are chain-tightened so the
    time-1 matrices satisfy the triangle condition (trading cones unchanged)."""
    tree = one_period_tree({"1": Fraction(1, 2), "2": Fraction(1, 2)})
    mats = {"0": _off_diagonal(4, 4, {(3, 2): 1, (3, 1): 1})}
    q, r = Fraction(4, 3), Fraction(2, 3)
    mats["1"] = chain_tighten(_off_diagonal(4, 4, {(1, 0): q, (2, 0): r}))
    mats["2"] = chain_tighten(_off_diagonal(4, 4, {(1, 0): r, (2, 0): q}))
    return BidAskProcess(tree, mats)


def build(name: str, N: int | None = None) -> BidAskProcess:
    if name == "eg41":
        return eg41()
    if name not in NAMES:
        raise ValueError(f"unknown example {name!r}; choose from {', '.join(NAMES)}")
    if N is None:
        raise ValueError(f"example {name} needs a truncation level N >= 2")
    return {"eg1": eg1, "eg3": eg3, "eg32": eg32}[name](N)
