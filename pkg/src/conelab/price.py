"""Consistent price processes, (robust) no-arbitrage, superhedging and duality.

A price process Z assigns a d-vector to every node. All LPs here use the
variables Z_t^i(u), laid out node-major in canonical node order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import attain
from .attain import GlobalCone, Strategy, assemble_A, flatten, member_Ct
from .market import BidAskProcess, pairs
from .ratlp import LinearSystem, Status, dot, solve
from .tree import (AdaptedVector, conditional_expectation, is_martingale, lift,
                   node_probability)


class ArbitragePresent(ValueError):
    """The market admits an arbitrage; the requested analysis is ill-posed."""

    def __init__(self, witness: "ArbitrageWitness"):
        super().__init__("market admits an arbitrage")
        self.witness = witness


@dataclass
class ConsistentPriceProcess:
    Z: list
    strict: bool = False
    margin: Fraction | None = None
    epsilon: Fraction | None = None


@dataclass
class FindResult:
    found: bool
    process: ConsistentPriceProcess | None
    margin: Fraction
    certificate: list | None = None

    def __bool__(self) -> bool:
        return self.found


@dataclass
class ArbitrageWitness:
    claim: AdaptedVector
    strategy: Strategy


class _ZLayout:
    def __init__(self, market: BidAskProcess, extra: int = 0):
        self.market = market
        self.d = market.d
        self.nodes = market.tree.node_ids()
        self.pos = {u: k for k, u in enumerate(self.nodes)}
        self.nz = self.d * len(self.nodes)
        self.n = self.nz + extra

    def var(self, u: str, i: int) -> int:
        return self.pos[u] * self.d + i

    def row(self) -> list:
        return [0] * self.n

    def martingale_rows(self):
        tree = self.market.tree
        for u in self.nodes:
            kids = tree.children(u)
            if not kids:
                continue
            pu = node_probability(tree, u)
            for i in range(self.d):
                r = self.row()
                r[self.var(u, i)] = pu
                for c in kids:
                    r[self.var(c, i)] = -node_probability(tree, c)
                yield r

    def polar_rows(self, u: str):
        P = self.market[u].entries
        for i in range(self.d):
            r = self.row()
            r[self.var(u, i)] = 1
            yield (None, r)
        for i, j in pairs(self.d):
            r = self.row()
            r[self.var(u, i)] = P[i][j]
            r[self.var(u, j)] = -1
            yield ((i, j), r)

    def process(self, x: Sequence[Fraction]) -> list:
        tree = self.market.tree
        return [AdaptedVector(t, {u: tuple(x[self.var(u, 0): self.var(u, 0) + self.d])
                                  for u in tree.nodes_at(t)})
                for t in range(tree.horizon + 1)]


def _frictional(P, i, j) -> bool:
    return P[i][j] * P[j][i] > 1


def is_consistent(market: BidAskProcess, Z: Sequence[AdaptedVector], terminal_positive: bool = True) -> bool:
    """Martingale selection of the polar cones minus the origin.

    With ``terminal_positive`` the leaves must also be strictly positive.
    """
    tree = market.tree
    if not is_martingale(tree, Z):
        return False
    for t in range(tree.horizon + 1):
        for u in tree.nodes_at(t):
            z = Z[t].values[u]
            if all(a == 0 for a in z):
                return False
            P = market[u].entries
            if any(a < 0 for a in z):
                return False
            if any(P[i][j] * z[i] - z[j] < 0 for i, j in pairs(market.d)):
                return False
    if terminal_positive:
        return all(a > 0 for l in tree.leaves for a in Z[tree.horizon].values[l])
    return True


def strictness(market: BidAskProcess, Z: Sequence[AdaptedVector]) -> Fraction | None:
    """min over nodes and frictional pairs of (pi^ij Z^i - Z^j) / (Z^i + Z^j).

    Frictionless pairs must hold with equality; otherwise returns 0. None
    when the market has no frictional pair (strictness is then vacuous).
    """
    tree = market.tree
    eps = None
    for t in range(tree.horizon + 1):
        for u in tree.nodes_at(t):
            z, P = Z[t].values[u], market[u].entries
            for i, j in pairs(market.d):
                gap = P[i][j] * z[i] - z[j]
                if not _frictional(P, i, j):
                    if gap != 0:
                        return Fraction(0)
                    continue
                if z[i] + z[j] == 0:
                    return Fraction(0)
                e = gap / (z[i] + z[j])
                eps = e if eps is None else min(eps, e)
    return None if eps is None else max(eps, Fraction(0))


def _consistency_system(market: BidAskProcess, strict: bool, normalized: bool) -> LinearSystem:
    """Z-LP with a margin variable ``m`` (last).

    Leaves need Z^i >= m; in strict mode every frictional polar row needs
    ``pi^ij Z^i - Z^j >= m`` too. Normalized: sum_i Z_0^i = 1 and maximize
    m. Otherwise: m fixed to 1 by an equality, pure feasibility.
    """
    lay = _ZLayout(market, extra=1)
    m = lay.nz
    tree = market.tree
    eq, eq_rhs, ge = [], [], []
    for r in lay.martingale_rows():
        eq.append(r)
        eq_rhs.append(0)
    leaves = set(tree.leaves)
    for u in lay.nodes:
        P = market[u].entries
        for kind, r in lay.polar_rows(u):
            if kind is None:
                if u in leaves:
                    r[m] = -1
            elif strict and _frictional(P, *kind):
                r[m] = -1
            ge.append(r)
    r = lay.row()
    if normalized:
        for i in range(lay.d):
            r[lay.var(tree.root, i)] = 1
    else:
        r[m] = 1
    eq.append(r)
    eq_rhs.append(1)
    objective = None
    if normalized:
        objective = [0] * lay.n
        objective[m] = 1
    return LinearSystem(lay.n, eq=eq, eq_rhs=eq_rhs, ge=ge, objective=objective)


def find_consistent(market: BidAskProcess, strict: bool = False) -> FindResult:
    """Search for a (strictly) consistent price process.

    Non-strict: maximize the least terminal component under sum_i Z_0^i = 1.
    Strict: maximize a common additive margin on terminal components and on
    every frictional polar row; frictionless pairs keep equality. Success iff
    the optimal margin is positive. On failure the certificate is a Farkas
    vector for the homogeneous system with margin 1.
    """
    lay = _ZLayout(market, extra=1)
    out = solve(_consistency_system(market, strict, normalized=True))
    margin = out.value if out.status is Status.OPTIMAL else Fraction(0)
    if out.status is Status.OPTIMAL and margin > 0:
        Z = lay.process(out.witness)
        cp = ConsistentPriceProcess(Z, strict=strict, margin=margin)
        if strict:
            cp.epsilon = strictness(market, Z)
        if not is_consistent(market, Z):
            raise AssertionError("internal error: LP price process is not consistent")
        return FindResult(True, cp, margin)
    cert = solve(_consistency_system(market, strict, normalized=False))
    if cert.status is not Status.INFEASIBLE:
        raise AssertionError("internal error: homogeneous system should be infeasible")
    return FindResult(False, None, Fraction(0), certificate=cert.certificate)


def check_arbitrage(market: BidAskProcess, cone: GlobalCone | None = None) -> ArbitrageWitness | None:
    """Maximize total terminal wealth over claims in A with 0 <= X <= 1.

    The verdict is cached on the (immutable) market.
    """
    full = cone is None or (cone.market is market and len(cone.nodes) == len(market.tree.nodes))
    if full and "arbitrage" in market._memo:
        return market._memo["arbitrage"]
    cone = cone or assemble_A(market)
    gens = cone.generators
    n = len(gens)
    ge, ge_rhs = [], []
    for c in range(cone.dim):
        row = [g[c] for g in gens]
        ge.append(row)
        ge_rhs.append(0)
        ge.append([-a for a in row])
        ge_rhs.append(-1)
    objective = [sum(g) for g in gens]
    out = solve(LinearSystem(n, ge=ge, ge_rhs=ge_rhs, objective=objective))
    if out.status is not Status.OPTIMAL:
        raise AssertionError(f"internal error: arbitrage LP returned {out.status}")
    witness = None
    if out.value > 0:
        st = attain._strategy_from(cone, out.witness)
        claim = st.realized()
        flat = flatten(market, claim)
        if any(a < 0 for a in flat) or not any(flat):
            raise AssertionError("internal error: arbitrage witness is not a nonnegative nonzero claim")
        witness = ArbitrageWitness(claim, st)
    if full:
        market._memo["arbitrage"] = witness
    return witness


def _dual_value_system(market: BidAskProcess, claim: AdaptedVector, numeraire: int | None,
                       fix_value: Fraction | None = None) -> tuple[LinearSystem, _ZLayout]:
    """max E[Z_T . claim] over martingale selections of the polar cones.

    Normalized by Z_0^numeraire = 1, or by sum_i Z_0^i = 1 when numeraire is
    None. With ``fix_value`` the objective becomes a constraint and the
    least terminal component is maximized instead.
    """
    extra = 1 if fix_value is not None else 0
    lay = _ZLayout(market, extra=extra)
    tree = market.tree
    T = tree.horizon
    theta = claim if claim.time == T else lift(tree, claim, T)
    obj = lay.row()
    for l in tree.leaves:
        p = tree.leaf_probabilities[l]
        for i, a in enumerate(theta.values[l]):
            obj[lay.var(l, i)] = p * a
    eq, eq_rhs, ge = [], [], []
    for r in lay.martingale_rows():
        eq.append(r)
        eq_rhs.append(0)
    leaves = set(tree.leaves)
    for u in lay.nodes:
        for kind, r in lay.polar_rows(u):
            if kind is None and extra and u in leaves:
                r[lay.nz] = -1
            ge.append(r)
    r = lay.row()
    if numeraire is None:
        for i in range(lay.d):
            r[lay.var(tree.root, i)] = 1
    else:
        r[lay.var(tree.root, numeraire)] = 1
    eq.append(r)
    eq_rhs.append(1)
    if fix_value is None:
        return LinearSystem(lay.n, eq=eq, eq_rhs=eq_rhs, ge=ge, objective=obj), lay
    eq.append(obj)
    eq_rhs.append(fix_value)
    objective = [0] * lay.n
    objective[lay.nz] = 1
    return LinearSystem(lay.n, eq=eq, eq_rhs=eq_rhs, ge=ge, objective=objective), lay


@dataclass
class DualSolution:
    value: Fraction
    Z: list
    terminal_positive: bool


def dual_value(market: BidAskProcess, claim: AdaptedVector, numeraire: int | None = None,
               prefer_positive: bool = True) -> DualSolution:
    """Optimal dual price process; prefers one with positive leaves if any is optimal."""
    system, lay = _dual_value_system(market, claim, numeraire)
    out = solve(system)
    if out.status is not Status.OPTIMAL:
        raise AssertionError(f"internal error: dual LP returned {out.status}")
    value = out.value
    Z = lay.process(out.witness)
    if not prefer_positive:
        return DualSolution(value, Z, all(a > 0 for l in market.tree.leaves for a in Z[-1].values[l]))
    system2, lay2 = _dual_value_system(market, claim, numeraire, fix_value=value)
    out2 = solve(system2)
    if out2.status is Status.OPTIMAL and out2.value > 0:
        return DualSolution(value, lay2.process(out2.witness[:lay2.nz]), True)
    return DualSolution(value, Z, False)


@dataclass
class SuperhedgeResult:
    price: Fraction
    strategy: Strategy
    dual: DualSolution
    numeraire: int


def superhedge_price(market: BidAskProcess, claim: AdaptedVector, numeraire: int = 0,
                     cone: GlobalCone | None = None) -> SuperhedgeResult:
    """Least x such that claim - x e_numeraire is attainable, with its dual.

    The primal and the dual are solved as two separate LPs and must agree.
    """
    cone = cone or assemble_A(market)
    arb = check_arbitrage(market, cone)
    if arb is not None:
        raise ArbitragePresent(arb)
    gens = cone.generators
    d = market.d
    target = flatten(market, claim)
    n = len(gens) + 1
    x = n - 1
    eq = []
    for c in range(cone.dim):
        row = [g[c] for g in gens] + [1 if c % d == numeraire else 0]
        eq.append(row)
    objective = [0] * n
    objective[x] = -1
    out = solve(LinearSystem(n, eq=eq, eq_rhs=target, objective=objective, free={x}))
    if out.status is not Status.OPTIMAL:
        raise AssertionError(f"internal error: superhedging LP returned {out.status}")
    price = out.witness[x]
    st = attain._strategy_from(cone, out.witness[:-1])
    dual = dual_value(market, claim, numeraire)
    if dual.value != price:
        raise AssertionError(f"duality gap: primal {price} != dual {dual.value}")
    if not _in_polar_closure(market, dual.Z):
        raise AssertionError("internal error: dual optimizer is not in the polar cones")
    return SuperhedgeResult(price, st, dual, numeraire)


def _in_polar_closure(market: BidAskProcess, Z: Sequence[AdaptedVector]) -> bool:
    tree = market.tree
    if not is_martingale(tree, Z):
        return False
    for t in range(tree.horizon + 1):
        for u in tree.nodes_at(t):
            z, P = Z[t].values[u], market[u].entries
            if any(a < 0 for a in z) or any(P[i][j] * z[i] - z[j] < 0 for i, j in pairs(market.d)):
                return False
    return True


def member_dual(market: BidAskProcess, claim: AdaptedVector) -> bool:
    """claim in A iff max E[Z_T . claim] <= 0 over normalized polar selections."""
    arb = check_arbitrage(market)
    if arb is not None:
        raise ArbitragePresent(arb)
    return dual_value(market, claim, None, prefer_positive=False).value <= 0


@dataclass
class RepresentationReport:
    increments: list
    verdicts: dict
    supermartingale_violations: list = field(default_factory=list)
    Z: list | None = None

    @property
    def all_members(self) -> bool:
        return all(self.verdicts.values())


def verify_representation(market: BidAskProcess, theta: AdaptedVector,
                          eta: Sequence[AdaptedVector]) -> RepresentationReport:
    """Per-time check that eta_t - eta_{t-1} lies in C_t, plus the
    supermartingale necessary condition for one consistent Z."""
    tree = market.tree
    T = tree.horizon
    if len(eta) != T + 1:
        raise ValueError(f"eta must have {T + 1} components")
    theta_T = theta if theta.time == T else lift(tree, theta, T)
    if eta[T].values != theta_T.values:
        raise ValueError("eta_T must equal theta")
    cone = assemble_A(market)
    incs, verdicts = [], {}
    for t in range(T + 1):
        xi = eta[t] if t == 0 else eta[t] - lift(tree, eta[t - 1], t)
        incs.append(xi)
        verdicts[t] = member_Ct(market, xi, cone).member
    violations = []
    found = find_consistent(market)
    Z = None
    if found:
        Z = found.process.Z
        d = market.d
        zero = tuple(Fraction(0) for _ in range(d))

        def M(t):
            prev = (AdaptedVector(0, {tree.root: zero}) if t == 0 else lift(tree, eta[t - 1], t))
            return AdaptedVector(t, {u: (dot(prev.values[u], Z[t].values[u]),) for u in tree.nodes_at(t)})

        for t in range(T):
            ce = conditional_expectation(tree, M(t + 1), t)
            mt = M(t)
            for u in tree.nodes_at(t):
                if ce.values[u][0] > mt.values[u][0]:
                    violations.append(f"t={t} node {u}: E[M_{t+1}|F_{t}] = {ce.values[u][0]} > M_{t} = {mt.values[u][0]}")
        mT = M(T)
        for l in tree.leaves:
            tz = dot(theta_T.values[l], Z[T].values[l])
            if mT.values[l][0] < tz:
                violations.append(f"leaf {l}: M_T = {mT.values[l][0]} < theta.Z_T = {tz}")
    return RepresentationReport(incs, verdicts, violations, Z)
