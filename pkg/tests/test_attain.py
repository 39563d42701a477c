import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conelab.adjust import adjusted_market
from conelab.attain import (assemble_A, cone_equal, cone_included, flatten, is_null_space_linear,
                            member_A, member_Ct, member_staged, null_strategy_cone)
from conelab.builtin import eg1, eg3, eg41, one_period_tree
from conelab.market import BidAskMatrix, BidAskProcess
from conelab.price import check_arbitrage, is_consistent
from conelab.ratlp import StructuralError, cone_member, dot
from conelab.sampling import random_claim, random_market, random_reweighting
from conelab.tree import AdaptedVector, ScenarioTree
from oracles import extreme_rays_oracle

half = F(1, 2)


def single_node(P):
    return BidAskProcess(ScenarioTree(0, [("0", 0, None)], {"0": 1}), {"0": BidAskMatrix(P)})


def terminal(market, vec):
    return AdaptedVector.constant(market.tree, market.tree.horizon, vec)


def test_assemble_counts():
    c = assemble_A(single_node([[1, 1], [1, 1]]))
    assert len(c.generators) == 4 and c.dim == 2
    c = assemble_A(eg1(2))
    assert len(c.generators) == 12 and c.dim == 4
    c = assemble_A(eg41())
    assert len(c.generators) == 3 * (4 + 12) and c.dim == 8


def test_zero_claim():
    m = eg1(3)
    res = member_A(assemble_A(m), terminal(m, (0, 0)))
    assert res.member and all(c == 0 for cs in res.strategy.coefficients.values() for c in cs)


def test_eg41_strategy():
    m = eg41()
    claim = terminal(m, (1, 0, 0, -1))
    res = member_A(assemble_A(m), claim)
    assert res.member
    assert res.strategy.is_admissible()
    assert flatten(m, res.strategy.realized()) == flatten(m, claim)
    # the hand strategy: xi_0 = (e3 + e2)/2 - e4, xi_1 = e1 - (e3 + e2)/2, trade by trade
    xi0 = (0, half, half, -1)
    xi1 = (1, -half, -half, 0)
    assert cone_member(m.cone("0").generators, xi0).member
    for leaf in m.tree.leaves:
        assert cone_member(m.cone(leaf).generators, xi1).member
    assert tuple(a + b for a, b in zip(xi0, xi1)) == (1, 0, 0, -1)


def test_eg1_candidate_arbitrage():
    m = eg1(2)
    claim = terminal(m, (1, 0))
    res = member_A(assemble_A(m), claim)
    assert not res.member
    # oracle: Z = (1,1) is consistent and prices the claim at 1 > 0
    Z = [AdaptedVector.constant(m.tree, t, (1, 1)) for t in range(2)]
    assert is_consistent(m, Z)
    assert sum(m.tree.leaf_probabilities[l] * dot(Z[1][l], claim[l]) for l in m.tree.leaves) == 1
    w = res.certificate
    assert dot(flatten(m, w), flatten(m, claim)) > 0


def test_member_A_dimension_error():
    m = eg1(2)
    with pytest.raises(StructuralError):
        member_A(assemble_A(m), terminal(m, (1, 0, 0)))


def test_member_Ct_examples():
    m = eg41()
    X = AdaptedVector(0, {"0": (1, 0, 0, -1)})
    assert member_Ct(m, X).member
    assert not cone_member(m.cone("0").generators, (1, 0, 0, -1)).member
    m = eg3(4)
    X = AdaptedVector.constant(m.tree, 1, (1, -1))
    rep = member_Ct(m, X)
    assert rep.member and set(rep.verdicts) == set(m.tree.leaves)
    assert member_A(assemble_A(m), X).member
    # ...realized by the frictionless time-0 trade z^{21} = e1 - e2
    assert m.cone("0").generators[m.cone("0").labels.index("z2,1")] == (1, -1)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25)
def test_trading_cone_inside_Ct(seed):
    rng = random.Random(seed)
    m = random_market(rng)
    t = rng.randint(0, m.tree.horizon)
    vals = {}
    for u in m.tree.nodes_at(t):
        gens = m.cone(u).generators
        lam = [F(rng.randint(0, 2)) for _ in gens]
        vals[u] = tuple(sum(c * g[k] for c, g in zip(lam, gens)) for k in range(m.d))
    assert member_Ct(m, AdaptedVector(t, vals)).member


def test_null_cone_examples():
    tree = one_period_tree({"a": half, "b": half})
    ident = BidAskMatrix([[1, 1], [1, 1]])
    m = BidAskProcess(tree, {u: ident for u in tree.node_ids()})
    nc = null_strategy_cone(m)
    labels = m.cone("0").labels
    lam = [F(0)] * nc.num_vars
    for k, (u, g) in enumerate(nc.tags):
        if (u == "0" and labels[g] == "z2,1") or (u != "0" and labels[g] == "z1,2"):
            lam[k] = F(1)
    assert nc.contains(lam)
    m = eg1(3)
    nc = null_strategy_cone(m)
    burn = [F(1) if tag == ("0", 0) else F(0) for tag in nc.tags]
    assert not nc.contains(burn)


def test_null_space_linearity():
    # both dates charge a spread on both pairs, so -K_0 and K_1 meet only at 0
    P = BidAskMatrix([[1, 2], [3, 1]])
    tree = one_period_tree({"a": half, "b": half})
    m = BidAskProcess(tree, {u: P for u in tree.node_ids()})
    nc = null_strategy_cone(m)
    assert extreme_rays_oracle(nc.matrix, nc.num_vars) == []
    assert is_null_space_linear(m).linear
    # eg3: xi_0 = e1 - e2, xi_1 = e2 - e1 is null; its reverse at t = 1 costs 2, so the space is not linear
    rep = is_null_space_linear(eg3(2))
    assert not rep.linear and rep.time == 1
    # after adjustment the t = 1 pair is frictionless and the same strategy is reversible
    assert is_null_space_linear(adjusted_market(eg3(2)).process).linear
    rep = is_null_space_linear(eg1(2))
    assert not rep.linear and rep.time == 0


def test_cone_equal_examples():
    m = eg41()
    A = assemble_A(m)
    assert cone_equal(A, A)
    K0 = assemble_A(m, nodes=["0"])
    inc = cone_included(A, K0)
    assert not inc.included
    assert cone_included(K0, A)
    m = eg3(3)
    assert cone_equal(assemble_A(m), assemble_A(adjusted_market(m).process))


def test_staged_decomposition_components():
    m = eg41()
    X = AdaptedVector.constant(m.tree, 1, (1, 0, 0, -1))
    dec = member_staged(m, X)
    assert dec.member
    total = {l: tuple(a + b for a, b in zip(dec.components[0]["0"], dec.components[1][l])) for l in m.tree.leaves}
    assert total == X.values
    for c in dec.components:
        assert member_Ct(m, c).member


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30)
def test_decomposition_and_probability_invariance(seed):
    rng = random.Random(seed)
    m = random_market(rng)
    cone = assemble_A(m)
    t = rng.randint(0, m.tree.horizon)
    X = random_claim(rng, m, t)
    verdict = member_A(cone, X).member
    assert member_staged(m, X, cone).member == verdict
    m2 = m.with_tree(random_reweighting(rng, m.tree))
    assert member_A(assemble_A(m2), X).member == verdict
    if verdict:
        st_ = member_A(cone, X).strategy
        for s in range(m.tree.horizon + 1):
            assert member_Ct(m, st_.trades_at(s), cone).member


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30)
def test_A_is_free_of_arbitrage_iff_no_nonnegative_claim(seed):
    rng = random.Random(seed)
    m = random_market(rng)
    arb = check_arbitrage(m)
    if arb is not None:
        flat = flatten(m, arb.claim)
        assert all(a >= 0 for a in flat) and any(flat)
        assert member_A(assemble_A(m), arb.claim).member
