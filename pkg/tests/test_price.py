import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conelab.attain import assemble_A, flatten, member_A
from conelab.builtin import eg1, eg41, one_period_tree
from conelab.market import BidAskMatrix, BidAskProcess
from conelab.price import (ArbitragePresent, check_arbitrage, dual_value, find_consistent, is_consistent,
                           member_dual, strictness, superhedge_price, verify_representation)
from conelab.ratlp import dot
from conelab.sampling import random_claim, random_market
from conelab.tree import AdaptedVector, is_martingale

half = F(1, 2)


def uniform(m0, m1, leaves=("a", "b")):
    tree = one_period_tree({l: F(1, len(leaves)) for l in leaves})
    mats = {"0": m0}
    mats.update({l: m1 for l in leaves})
    return BidAskProcess(tree, mats)


IDENT = BidAskMatrix([[1, 1], [1, 1]])


def terminal(market, vec):
    return AdaptedVector.constant(market.tree, market.tree.horizon, vec)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_eg1_consistent_not_strict(N):
    m = eg1(N)
    found = find_consistent(m)
    assert found.found and is_consistent(m, found.process.Z)
    assert is_consistent(m, [AdaptedVector.constant(m.tree, t, (1, 1)) for t in range(2)])
    strict = find_consistent(m, strict=True)
    assert not strict.found and strict.margin == 0 and strict.certificate is not None


def test_frictionless_symmetric():
    m = uniform(IDENT, IDENT)
    found = find_consistent(m)
    assert found.found
    Z = found.process.Z
    assert Z[0]["0"] == (half, half)
    assert all(Z[1][l][0] == Z[1][l][1] for l in m.tree.leaves)


def test_disjoint_polars_give_arbitrage():
    # t = 0 forces Z^1 = Z^2; t = 1 forces Z^2 >= 2 Z^1 on every atom
    m = uniform(IDENT, BidAskMatrix([[1, 4], [half, 1]]))
    assert not find_consistent(m).found
    arb = check_arbitrage(m)
    assert arb is not None
    flat = flatten(m, arb.claim)
    assert all(a >= 0 for a in flat) and any(flat)
    assert flatten(m, arb.strategy.realized()) == flat and arb.strategy.is_admissible()


def test_no_arbitrage_examples():
    assert check_arbitrage(eg1(4)) is None
    assert check_arbitrage(uniform(IDENT, IDENT)) is None


def test_sub_unit_round_trip_arbitrage():
    # eg3 with pi_0^{12} = 1/2 and pi_1^{21} = 1: buy asset 2 at half price, sell it back at par
    bad0 = BidAskMatrix([[1, half], [1, 1]], triangle_required=False)
    m = uniform(bad0, IDENT)
    arb = check_arbitrage(m)
    assert arb is not None
    flat = flatten(m, arb.claim)
    assert all(a >= 0 for a in flat) and any(flat)


def test_superhedge_examples():
    m = eg1(2)
    assert superhedge_price(m, terminal(m, (0, 0))).price == 0
    f = uniform(IDENT, IDENT)
    assert superhedge_price(f, terminal(f, (1, 0)), 0).price == 1
    assert superhedge_price(f, terminal(f, (0, 1)), 1).price == 1
    res = superhedge_price(m, terminal(m, (0, 1)), 0)
    assert res.price == 1
    assert dual_value(m, terminal(m, (0, 1)), 0).value == 1
    Z = [AdaptedVector.constant(m.tree, t, (1, 1)) for t in range(2)]
    assert sum(m.tree.leaf_probabilities[l] * dot(Z[1][l], (0, 1)) for l in m.tree.leaves) == 1
    assert flatten(m, res.strategy.realized()) == flatten(m, terminal(m, (-1, 1)))


def test_superhedge_refuses_arbitrage():
    m = uniform(IDENT, BidAskMatrix([[1, 4], [half, 1]]))
    with pytest.raises(ArbitragePresent) as exc:
        superhedge_price(m, terminal(m, (1, 0)))
    assert exc.value.witness is not None


def test_member_dual_examples():
    m = eg41()
    assert member_dual(m, terminal(m, (0, 0, 0, 0)))
    assert member_dual(m, terminal(m, (1, 0, 0, -1)))
    assert member_A(assemble_A(m), terminal(m, (1, 0, 0, -1))).member
    m = eg1(3)
    assert not member_dual(m, terminal(m, (1, 0)))
    assert dual_value(m, terminal(m, (1, 0))).value > 0


def test_verify_representation_examples():
    m = eg41()
    tree = m.tree
    zero = (0, 0, 0, 0)
    theta = terminal(m, zero)
    rep = verify_representation(m, theta, [AdaptedVector.constant(tree, 0, zero), theta])
    assert rep.all_members and rep.supermartingale_violations == []
    theta = terminal(m, (1, 0, 0, -1))
    eta0 = AdaptedVector.constant(tree, 0, (0, half, half, -1))
    rep = verify_representation(m, theta, [eta0, theta])
    assert rep.verdicts == {0: True, 1: True}
    # claiming the whole trade at t = 0: the residual at t = 1 is zero and the
    # t = 0 component e1 - e4 is still in C_0 (it is attainable from later trading)
    eta0 = AdaptedVector.constant(tree, 0, (1, 0, 0, -1))
    rep = verify_representation(m, theta, [eta0, theta])
    assert rep.verdicts == {0: True, 1: True}
    assert member_A(assemble_A(m), theta - theta).member


def test_verify_representation_rejects_non_member():
    m = eg1(2)
    theta = terminal(m, (1, 0))
    rep = verify_representation(m, theta, [AdaptedVector.constant(m.tree, 0, (0, 0)), theta])
    assert rep.verdicts[0] and not rep.verdicts[1]
    assert rep.supermartingale_violations


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25)
def test_duality_and_numeraire_bound(seed):
    rng = random.Random(seed)
    m = random_market(rng)
    if check_arbitrage(m) is not None:
        return
    cone = assemble_A(m)
    claim = random_claim(rng, m)
    prices = {}
    for i in range(m.d):
        res = superhedge_price(m, claim, i, cone)
        assert res.dual.value == res.price
        assert is_martingale(m.tree, res.dual.Z)
        if res.dual.terminal_positive:
            assert is_consistent(m, res.dual.Z)
        prices[i] = res
    root = m[m.tree.root]
    for i in range(m.d):
        for j in range(m.d):
            if i == j:
                continue
            pj = prices[j].price
            # fund p_j units of asset j out of asset i with one time-0 trade
            x = root[i, j] * pj if pj >= 0 else pj / root[j, i]
            target = claim - AdaptedVector.constant(m.tree, m.tree.horizon,
                                                    [x if k == i else 0 for k in range(m.d)])
            assert member_A(cone, target).member
            assert prices[i].price <= x


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25)
def test_strict_implies_non_strict(seed):
    m = random_market(random.Random(seed))
    strict = find_consistent(m, strict=True)
    plain = find_consistent(m)
    if strict.found:
        assert plain.found
        eps = strictness(m, strict.process.Z)
        assert eps is None or eps > 0
    assert plain.found == (check_arbitrage(m) is None)
