"""Finite filtered probability spaces as event trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ratlp import StructuralError, frac


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    id: str
    time: int
    parent: str | None


@dataclass(frozen=True, eq=False)
class ScenarioTree:
    """Event tree whose leaves (all at the horizon) carry the atoms of P.

    Nodes at time t are the atoms of F_t. Node order is the order given at
    construction and is used as the canonical order everywhere.
    """

    horizon: int
    nodes: tuple
    leaf_probabilities: Mapping[str, Fraction]
    _index: dict = field(init=False, repr=False)
    _children: dict = field(init=False, repr=False)
    _by_time: tuple = field(init=False, repr=False)
    _leaves_under: dict = field(init=False, repr=False)

    def __post_init__(self):
        nodes = tuple(n if isinstance(n, Node) else Node(*n) for n in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        probs = {k: frac(v) for k, v in self.leaf_probabilities.items()}
        object.__setattr__(self, "leaf_probabilities", probs)
        index = {}
        for n in nodes:
            if n.id in index:
                raise TreeError(f"duplicate node id {n.id!r}")
            index[n.id] = n
        roots = [n for n in nodes if n.parent is None]
        if len(roots) != 1 or roots[0].time != 0:
            raise TreeError("tree needs exactly one root, at time 0")
        children = {n.id: [] for n in nodes}
        for n in nodes:
            if n.parent is None:
                continue
            if n.parent not in index:
                raise TreeError(f"node {n.id!r}: unknown parent {n.parent!r}")
            if index[n.parent].time != n.time - 1:
                raise TreeError(f"node {n.id!r} at time {n.time} has parent at time {index[n.parent].time}")
            children[n.parent].append(n.id)
        if self.horizon < 0:
            raise TreeError("horizon must be >= 0")
        by_time = [[] for _ in range(self.horizon + 1)]
        for n in nodes:
            if not 0 <= n.time <= self.horizon:
                raise TreeError(f"node {n.id!r} has time {n.time} outside 0..{self.horizon}")
            by_time[n.time].append(n.id)
            if n.time < self.horizon and not children[n.id]:
                raise TreeError(f"node {n.id!r} at time {n.time} < T has no children")
        leaves = by_time[self.horizon]
        if set(probs) != set(leaves):
            raise TreeError("leaf probabilities must be given for exactly the nodes at time T")
        for k, p in probs.items():
            if p <= 0:
                raise TreeError(f"leaf {k!r} has non-positive probability {p}")
        if sum(probs.values()) != 1:
            raise TreeError(f"leaf probabilities sum to {sum(probs.values())}, not 1")
        leaves_under = {}
        for t in range(self.horizon, -1, -1):
            for u in by_time[t]:
                if t == self.horizon:
                    leaves_under[u] = (u,)
                else:
                    leaves_under[u] = tuple(l for c in children[u] for l in leaves_under[c])
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})
        object.__setattr__(self, "_by_time", tuple(tuple(b) for b in by_time))
        object.__setattr__(self, "_leaves_under", leaves_under)

    @property
    def root(self) -> str:
        return self._by_time[0][0]

    @property
    def leaves(self) -> tuple:
        return self._by_time[self.horizon]

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def nodes_at(self, t: int) -> tuple:
        return self._by_time[t]

    def node(self, u: str) -> Node:
        try:
            return self._index[u]
        except KeyError:
            raise TreeError(f"unknown node {u!r}") from None

    def time(self, u: str) -> int:
        return self.node(u).time

    def children(self, u: str) -> tuple:
        self.node(u)
        return self._children[u]

    def leaves_under(self, u: str) -> tuple:
        self.node(u)
        return self._leaves_under[u]

    def ancestor_at(self, u: str, t: int) -> str:
        n = self.node(u)
        if t > n.time:
            raise TreeError(f"no ancestor of {u!r} at later time {t}")
        while n.time > t:
            n = self._index[n.parent]
        return n.id

    def descendants_at(self, u: str, s: int) -> list[str]:
        out = [u]
        for _ in range(self.time(u), s):
            out = [c for v in out for c in self._children[v]]
        return out

    def reweighted(self, probabilities: Mapping[str, Fraction]) -> "ScenarioTree":
        return ScenarioTree(self.horizon, self.nodes, probabilities)


def node_probability(tree: ScenarioTree, u: str) -> Fraction:
    return sum((tree.leaf_probabilities[l] for l in tree.leaves_under(u)), Fraction(0))


@dataclass(frozen=True)
class AdaptedVector:
    """A d-vector per node at one time level (an element of L^0_t)."""

    time: int
    values: Mapping[str, tuple]

    def __post_init__(self):
        vals = {k: tuple(frac(a) for a in v) for k, v in self.values.items()}
        object.__setattr__(self, "values", vals)

    def __getitem__(self, u: str) -> tuple:
        return self.values[u]

    @property
    def dim(self) -> int:
        return len(next(iter(self.values.values())))

    def check(self, tree: ScenarioTree, dim: int | None = None) -> None:
        if set(self.values) != set(tree.nodes_at(self.time)):
            raise StructuralError(f"adapted vector at t={self.time} must cover exactly the nodes at that time")
        dims = {len(v) for v in self.values.values()}
        if len(dims) != 1 or (dim is not None and dims != {dim}):
            raise StructuralError("adapted vector has inconsistent dimensions")

    @classmethod
    def constant(cls, tree: ScenarioTree, t: int, vec: Sequence) -> "AdaptedVector":
        return cls(t, {u: tuple(vec) for u in tree.nodes_at(t)})

    def __add__(self, other: "AdaptedVector") -> "AdaptedVector":
        return AdaptedVector(self.time, {u: tuple(a + b for a, b in zip(v, other.values[u]))
                                         for u, v in self.values.items()})

    def __neg__(self) -> "AdaptedVector":
        return AdaptedVector(self.time, {u: tuple(-a for a in v) for u, v in self.values.items()})

    def __sub__(self, other: "AdaptedVector") -> "AdaptedVector":
        return self + (-other)


AdaptedProcess = Sequence[AdaptedVector]


def lift(tree: ScenarioTree, X: AdaptedVector, s: int) -> AdaptedVector:
    """View an F_t-measurable vector as F_s-measurable, s >= t."""
    if s < X.time:
        raise TreeError(f"cannot lift from time {X.time} down to {s}")
    return AdaptedVector(s, {v: X.values[tree.ancestor_at(v, X.time)] for v in tree.nodes_at(s)})


def conditional_expectation(tree: ScenarioTree, X: AdaptedVector, t: int) -> AdaptedVector:
    s = X.time
    if t > s:
        raise TreeError(f"conditional expectation onto t={t} of a time-{s} vector")
    if t == s:
        return X
    d = X.dim
    out = {}
    for u in tree.nodes_at(t):
        acc = [Fraction(0)] * d
        mass = Fraction(0)
        for v in tree.descendants_at(u, s):
            p = node_probability(tree, v)
            mass += p
            for k, a in enumerate(X.values[v]):
                acc[k] += p * a
        out[u] = tuple(a / mass for a in acc)
    return AdaptedVector(t, out)


def is_martingale(tree: ScenarioTree, Z: AdaptedProcess) -> bool:
    if len(Z) != tree.horizon + 1:
        return False
    for t in range(tree.horizon):
        if conditional_expectation(tree, Z[t + 1], t).values != Z[t].values:
            return False
    return True


def expectation(tree: ScenarioTree, X: AdaptedVector) -> tuple:
    return conditional_expectation(tree, X, 0).values[tree.root]
