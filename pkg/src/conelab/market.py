"""Bid-ask matrices, bid-ask processes and their solvency/trading cones.

Entry ``pi[i][j]`` is the number of units of asset ``i`` paid for one unit of
asset ``j``. Assets are 0-based internally and printed 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ratlp import StructuralError, frac
from .tree import ScenarioTree


@dataclass(frozen=True)
class BidAskMatrix:
    entries: tuple
    triangle_required: bool = True

    def __post_init__(self):
        rows = tuple(tuple(frac(a) for a in r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        d = len(rows)
        if d < 2 or any(len(r) != d for r in rows):
            raise StructuralError("bid-ask matrix must be square with d >= 2")

    @property
    def d(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def relaxed(self) -> "BidAskMatrix":
        return BidAskMatrix(self.entries, triangle_required=False)

    @classmethod
    def frictionless(cls, d: int) -> "BidAskMatrix":
        return cls([[1] * d for _ in range(d)])


def validate(matrix: BidAskMatrix) -> list[str]:
    """Every violated bid-ask condition, as readable strings (1-based)."""
    P, d = matrix.entries, matrix.d
    out = []
    for i in range(d):
        for j in range(d):
            if P[i][j] <= 0:
                out.append(f"positivity: pi[{i+1},{j+1}] = {P[i][j]} is not > 0")
        if P[i][i] != 1:
            out.append(f"diagonal: pi[{i+1},{i+1}] = {P[i][i]} is not 1")
    positive = all(P[i][j] > 0 for i in range(d) for j in range(d))
    if matrix.triangle_required and positive:
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    if P[i][j] * P[j][k] < P[i][k]:
                        out.append(f"triangle: pi[{i+1},{j+1}]*pi[{j+1},{k+1}] = "
                                   f"{P[i][j] * P[j][k]} < pi[{i+1},{k+1}] = {P[i][k]}")
    return out


def chain_tighten(matrix: BidAskMatrix) -> BidAskMatrix:
    """Min-product closure over chains i -> ... -> j (Floyd-Warshall)."""
    d = matrix.d
    P = [list(r) for r in matrix.entries]
    for k in range(d):
        for i in range(d):
            pik = P[i][k]
            for j in range(d):
                if pik * P[k][j] < P[i][j]:
                    P[i][j] = pik * P[k][j]
    return BidAskMatrix(P, matrix.triangle_required)


def complete_by_chains(d: int, listed: Mapping[tuple, Fraction]) -> BidAskMatrix:
    """Bid-ask matrix from a partial list of entries, others via cheapest chain.

    ``listed`` maps 0-based ``(i, j)`` to the quoted rate; unlisted off-diagonal
    pairs are filled with the minimum product along chains of listed entries.
    """
    inf = None
    P = [[Fraction(1) if i == j else inf for j in range(d)] for i in range(d)]
    for (i, j), v in listed.items():
        P[i][j] = frac(v)
    for k in range(d):
        for i in range(d):
            if P[i][k] is None:
                continue
            for j in range(d):
                if P[k][j] is None:
                    continue
                c = P[i][k] * P[k][j]
                if P[i][j] is None or c < P[i][j]:
                    P[i][j] = c
    if any(v is None for r in P for v in r):
        raise StructuralError("listed entries do not connect every pair of assets")
    if any(P[i][i] != 1 for i in range(d)):
        raise StructuralError("listed entries contain a chain cycle with product < 1")
    return BidAskMatrix(P)


def generator_labels(d: int) -> list[str]:
    labels = [f"-e{i+1}" for i in range(d)]
    labels += [f"z{i+1},{j+1}" for i in range(d) for j in range(d) if i != j]
    return labels


def pairs(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(d) for j in range(d) if i != j]


@dataclass(frozen=True)
class NodeCone:
    """Trading cone -K(Pi) at one node: generators and polar halfspaces.

    ``generators`` are -e_i then z^{ij} = e_j - Pi^{ij} e_i over ``pairs(d)``.
    ``polar`` rows r describe K* = {w : r.w >= 0}.
    """

    generators: tuple
    polar: tuple
    labels: tuple


def unit(d: int, i: int, scale=1) -> tuple:
    return tuple(Fraction(scale) if k == i else Fraction(0) for k in range(d))


def node_cone(matrix: BidAskMatrix) -> NodeCone:
    d, P = matrix.d, matrix.entries
    gens = [unit(d, i, -1) for i in range(d)]
    polar = [unit(d, i) for i in range(d)]
    for i, j in pairs(d):
        z = [Fraction(0)] * d
        z[j] += 1
        z[i] -= P[i][j]
        gens.append(tuple(z))
        row = [Fraction(0)] * d
        row[i] += P[i][j]
        row[j] -= 1
        polar.append(tuple(row))
    return NodeCone(tuple(gens), tuple(polar), tuple(generator_labels(d)))


def in_polar(matrix: BidAskMatrix, w: Sequence) -> bool:
    return all(sum(a * b for a, b in zip(r, w)) >= 0 for r in node_cone(matrix).polar)


@dataclass(frozen=True, eq=False)
class BidAskProcess:
    """A bid-ask matrix at every node of a scenario tree."""

    tree: ScenarioTree
    matrices: Mapping[str, BidAskMatrix]
    _cones: dict = field(init=False, repr=False, default=None)
    _memo: dict = field(init=False, repr=False, default=None)

    def __post_init__(self):
        ids = set(self.tree.node_ids())
        if set(self.matrices) != ids:
            missing = sorted(ids - set(self.matrices))
            extra = sorted(set(self.matrices) - ids)
            raise StructuralError(f"matrices must cover every node (missing {missing}, extra {extra})")
        dims = {m.d for m in self.matrices.values()}
        if len(dims) != 1:
            raise StructuralError(f"bid-ask matrices have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "_cones", {})
        object.__setattr__(self, "_memo", {})

    @property
    def d(self) -> int:
        return next(iter(self.matrices.values())).d

    def __getitem__(self, u: str) -> BidAskMatrix:
        return self.matrices[u]

    def cone(self, u: str) -> NodeCone:
        c = self._cones.get(u)
        if c is None:
            c = self._cones[u] = node_cone(self.matrices[u])
        return c

    def violations(self) -> dict[str, list[str]]:
        return {u: v for u in self.tree.node_ids() if (v := validate(self.matrices[u]))}

    def with_tree(self, tree: ScenarioTree) -> "BidAskProcess":
        return BidAskProcess(tree, self.matrices)
