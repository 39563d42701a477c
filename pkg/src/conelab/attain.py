"""The cone A of claims attainable from zero endowment, and the cones C_t.

Claims live in terminal-wealth coordinates: one d-vector per leaf, flattened
leaf-major in the tree's canonical leaf order. A trade g at node u is embedded
as g on every leaf under u and zero elsewhere.

On a finite tree, ``X in C_t`` reduces to one test per atom u at time t:
``X(u) 1_u in A``. Indicators of atoms generate the bounded nonnegative
F_t-measurable variables as a cone, and A is a convex cone, so nothing else
needs checking.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import ratlp
from .market import BidAskProcess
from .ratlp import LinearSystem, Status, StructuralError, dot, solve
from .tree import AdaptedVector, lift


@dataclass(frozen=True, eq=False)
class GlobalCone:
    """Sum of the embedded node trading cones over a set of nodes."""

    market: BidAskProcess
    nodes: tuple
    generators: tuple = field(repr=False)
    tags: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return self.market.d * len(self.market.tree.leaves)


def _leaf_slots(market: BidAskProcess) -> dict[str, int]:
    return {l: k for k, l in enumerate(market.tree.leaves)}


def embed(market: BidAskProcess, u: str, vec: Sequence) -> tuple:
    """``vec`` on every leaf under node ``u``, zero elsewhere."""
    d = market.d
    out = [Fraction(0)] * (d * len(market.tree.leaves))
    slots = _leaf_slots(market)
    for l in market.tree.leaves_under(u):
        base = slots[l] * d
        for k, a in enumerate(vec):
            out[base + k] = Fraction(a)
    return tuple(out)


def flatten(market: BidAskProcess, claim: AdaptedVector) -> tuple:
    tree = market.tree
    if claim.time != tree.horizon:
        claim = lift(tree, claim, tree.horizon)
    claim.check(tree, market.d)
    return tuple(a for l in tree.leaves for a in claim.values[l])


def unflatten(market: BidAskProcess, vec: Sequence) -> AdaptedVector:
    d = market.d
    return AdaptedVector(market.tree.horizon,
                         {l: tuple(vec[k * d:(k + 1) * d]) for k, l in enumerate(market.tree.leaves)})


def assemble_A(market: BidAskProcess, nodes: Iterable[str] | None = None) -> GlobalCone:
    tree = market.tree
    wanted = None if nodes is None else set(nodes)
    chosen = tuple(u for u in tree.node_ids() if wanted is None or u in wanted)
    if wanted is not None and len(chosen) != len(wanted):
        raise StructuralError(f"node filter names unknown nodes {sorted(wanted - set(chosen))}")
    gens, tags = [], []
    for u in chosen:
        for k, g in enumerate(market.cone(u).generators):
            gens.append(embed(market, u, g))
            tags.append((u, k))
    return GlobalCone(market, chosen, tuple(gens), tuple(tags))


@dataclass
class Strategy:
    """Nonnegative coefficients over the local generators at each node."""

    market: BidAskProcess
    coefficients: dict

    def trade(self, u: str) -> tuple:
        """The portfolio change xi(u) executed at node u."""
        d = self.market.d
        out = [Fraction(0)] * d
        for c, g in zip(self.coefficients.get(u, ()), self.market.cone(u).generators):
            if c:
                for k in range(d):
                    out[k] += c * g[k]
        return tuple(out)

    def trades_at(self, t: int) -> AdaptedVector:
        return AdaptedVector(t, {u: self.trade(u) for u in self.market.tree.nodes_at(t)})

    def realized(self) -> AdaptedVector:
        tree = self.market.tree
        total = None
        for t in range(tree.horizon + 1):
            x = lift(tree, self.trades_at(t), tree.horizon)
            total = x if total is None else total + x
        return total

    def is_admissible(self) -> bool:
        return all(c >= 0 for cs in self.coefficients.values() for c in cs)

    @classmethod
    def zero(cls, market: BidAskProcess) -> "Strategy":
        n = len(market.cone(market.tree.root).generators)
        return cls(market, {u: [Fraction(0)] * n for u in market.tree.node_ids()})


@dataclass
class MembershipA:
    member: bool
    strategy: Strategy | None = None
    certificate: AdaptedVector | None = None

    def __bool__(self) -> bool:
        return self.member


def _strategy_from(cone: GlobalCone, lam: Sequence[Fraction]) -> Strategy:
    st = Strategy.zero(cone.market)
    for (u, k), c in zip(cone.tags, lam):
        st.coefficients[u][k] = c
    return st


def member_A(cone: GlobalCone, claim: AdaptedVector) -> MembershipA:
    """Is the claim attainable? Returns a realizing strategy or a separator.

    The separator ``w`` (an adapted vector at T) satisfies ``w.g <= 0`` for
    every generator and ``w.claim > 0``; it is verified before returning.
    """
    market = cone.market
    if claim.dim != market.d:
        raise StructuralError(f"claim has dimension {claim.dim}, market has {market.d}")
    target = flatten(market, claim)
    res = ratlp.cone_member(cone.generators, target)
    if res.member:
        st = _strategy_from(cone, res.coefficients)
        if flatten(market, st.realized()) != target:
            raise AssertionError("internal error: strategy does not realize the claim")
        return MembershipA(True, strategy=st)
    w = res.certificate
    if not ratlp.is_separating(w, cone.generators, target):
        raise AssertionError("internal error: certificate does not separate")
    return MembershipA(False, certificate=unflatten(market, w))


@dataclass
class CtMembershipReport:
    time: int
    verdicts: dict

    @property
    def member(self) -> bool:
        return all(v.member for v in self.verdicts.values())

    def __bool__(self) -> bool:
        return self.member


def member_Ct(market: BidAskProcess, X: AdaptedVector, cone: GlobalCone | None = None) -> CtMembershipReport:
    """Per-atom test of X in C_t: each X(u) 1_u must lie in A."""
    cone = cone or assemble_A(market)
    tree = market.tree
    t = X.time
    X.check(tree, market.d)
    zero = (Fraction(0),) * market.d
    verdicts = {}
    for u in tree.nodes_at(t):
        under = set(tree.leaves_under(u))
        claim = AdaptedVector(tree.horizon, {l: X.values[u] if l in under else zero for l in tree.leaves})
        verdicts[u] = member_A(cone, claim)
    return CtMembershipReport(t, verdicts)


@dataclass
class StagedDecomposition:
    member: bool
    components: list | None = None
    certificate: list | None = None


def member_staged(market: BidAskProcess, X: AdaptedVector,
                  cone: GlobalCone | None = None) -> StagedDecomposition:
    """Decide ``X in C_0 + ... + C_t`` for X adapted at t, with one joint LP.

    Variables: a component c_s(u) (free) per node u at time s <= t, and per
    such node a nonnegative strategy certifying ``c_s(u) 1_u in A``. The
    components along each path must sum to X. Feasibility is exactly
    membership in the staged sum, independent of a direct test of X in A.
    """
    cone = cone or assemble_A(market)
    tree = market.tree
    d, t = market.d, X.time
    X.check(tree, d)
    nodes = [u for s in range(t + 1) for u in tree.nodes_at(s)]
    ng = len(cone.generators)
    dim = cone.dim
    block = d + ng
    nvars = block * len(nodes)
    free = set()
    eq, rhs = [], []
    slots = _leaf_slots(market)
    for b, u in enumerate(nodes):
        off = b * block
        free.update(range(off, off + d))
        under = tree.leaves_under(u)
        for coord in range(dim):
            row = [0] * nvars
            for k, g in enumerate(cone.generators):
                if g[coord]:
                    row[off + d + k] = g[coord]
            leaf, comp = divmod(coord, d)
            if tree.leaves[leaf] in under:
                row[off + comp] = -1
            eq.append(row)
            rhs.append(0)
    pos = {u: b for b, u in enumerate(nodes)}
    for v in tree.nodes_at(t):
        chain = [tree.ancestor_at(v, s) for s in range(t + 1)]
        for comp in range(d):
            row = [0] * nvars
            for a in chain:
                row[pos[a] * block + comp] = 1
            eq.append(row)
            rhs.append(X.values[v][comp])
    out = solve(LinearSystem(nvars, eq=eq, eq_rhs=rhs, free=free))
    if out.status is Status.INFEASIBLE:
        return StagedDecomposition(False, certificate=out.certificate)
    x = out.witness
    comps = []
    for s in range(t + 1):
        comps.append(AdaptedVector(s, {u: tuple(x[pos[u] * block: pos[u] * block + d])
                                       for u in tree.nodes_at(s)}))
    return StagedDecomposition(True, components=comps)


@dataclass
class NullCone:
    """Standard-form cone {lam >= 0 : M lam = 0} over strategy coefficients."""

    matrix: list
    tags: tuple
    num_vars: int

    def contains(self, lam: Sequence) -> bool:
        return (len(lam) == self.num_vars and all(x >= 0 for x in lam)
                and all(dot(r, lam) == 0 for r in self.matrix))


def null_strategy_cone(market: BidAskProcess) -> NullCone:
    cone = assemble_A(market)
    gens = cone.generators
    M = [[g[c] for g in gens] for c in range(cone.dim)]
    return NullCone(M, cone.tags, len(gens))


@dataclass
class NullSpaceReport:
    linear: bool
    ray: tuple | None = None
    time: int | None = None
    node: str | None = None
    rays_checked: int = 0

    def __bool__(self) -> bool:
        return self.linear


def is_null_space_linear(market: BidAskProcess, limit: int = ratlp.DESK_SCALE_LIMIT) -> NullSpaceReport:
    """Check that the null strategies form a vector space.

    Each extreme ray of the null cone is a null strategy; the space is linear
    iff reversing every per-node trade of every extreme ray stays inside the
    node trading cones. On failure the offending ray, time and node are
    reported.
    """
    nc = null_strategy_cone(market)
    cone = assemble_A(market)
    rays = ratlp.extreme_rays(nc.matrix, nc.num_vars, limit=limit)
    tree = market.tree
    for ray in rays:
        st = _strategy_from(cone, ray)
        for u in tree.node_ids():
            xi = st.trade(u)
            if not ratlp.cone_member(market.cone(u).generators, [-a for a in xi]).member:
                return NullSpaceReport(False, ray=ray, time=tree.time(u), node=u, rays_checked=len(rays))
    return NullSpaceReport(True, rays_checked=len(rays))


@dataclass
class Inclusion:
    included: bool
    generator: tuple | None = None
    certificate: list | None = None

    def __bool__(self) -> bool:
        return self.included


def cone_included(a: GlobalCone, b: GlobalCone) -> Inclusion:
    """Is every generator of ``a`` a member of ``b``?"""
    if a.dim != b.dim:
        raise StructuralError(f"cones live in dimensions {a.dim} and {b.dim}")
    own = set(b.generators)
    for tag, g in zip(a.tags, a.generators):
        if g in own or all(x == 0 for x in g):
            continue
        res = ratlp.cone_member(b.generators, g)
        if not res.member:
            return Inclusion(False, generator=tag, certificate=res.certificate)
    return Inclusion(True)


def cone_equal(a: GlobalCone, b: GlobalCone) -> bool:
    return bool(cone_included(a, b)) and bool(cone_included(b, a))
