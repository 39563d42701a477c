import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conelab.adjust import (adjusted_market, compute_B_sets, entrywise_le, reverse_trade_claim, verify_t2)
from conelab.attain import assemble_A, cone_equal, flatten, member_A
from conelab.builtin import eg1, eg3, eg41, one_period_tree
from conelab.market import BidAskMatrix, BidAskProcess, pairs
from conelab.price import check_arbitrage
from conelab.ratlp import dot
from conelab.sampling import random_market


def test_frictionless_every_B_set_full():
    tree = one_period_tree({"a": F(1, 3), "b": F(2, 3)})
    ident = BidAskMatrix.frictionless(3)
    m = BidAskProcess(tree, {u: ident for u in tree.node_ids()})
    B = compute_B_sets(m)
    for i, j in pairs(3):
        for t in range(2):
            assert B[(i, j, t)] == frozenset(tree.nodes_at(t))


@pytest.mark.parametrize("N", [2, 4])
def test_eg3_B_sets(N):
    m = eg3(N)
    B = compute_B_sets(m)
    assert B[(0, 1, 1)] == frozenset(m.tree.leaves)
    assert B[(1, 0, 1)] == frozenset()
    adj = adjusted_market(m).process
    assert all(a == 1 for u in m.tree.node_ids() for r in adj[u].entries for a in r)


def test_eg1_reverse_of_costly_trade_unattainable():
    m = eg1(3)
    B = compute_B_sets(m)
    assert B[(1, 0, 0)] == frozenset()
    claim = reverse_trade_claim(m, 1, 0, "0")
    assert flatten(m, claim)[:2] == (-1, 2)
    res = member_A(assemble_A(m), claim)
    assert not res.member
    # Z = (1,1) prices the reverse trade 2e2 - e1 at 1 > 0
    assert sum(m.tree.leaf_probabilities[l] * dot((1, 1), claim[l]) for l in m.tree.leaves) == 1


def test_eg41_unadjusted():
    m = eg41()
    adj = adjusted_market(m).process
    assert all(adj[u].entries == m[u].entries for u in m.tree.node_ids())
    rep = verify_t2(m)
    assert rep.A_in_adjusted and rep.adjusted_arbitrage_free and rep.adjusted_equals_A


def test_eg3_t2():
    rep = verify_t2(eg3(3))
    assert rep.as_dict() == {"A_subset_of_adjusted": True, "adjusted_arbitrage_free": True,
                             "adjusted_equals_A": True}


def test_adjusted_matrices_skip_triangle():
    adj = adjusted_market(eg1(2)).process
    assert all(not adj[u].triangle_required for u in adj.tree.node_ids())


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20)
def test_adjustment_invariants(seed):
    rng = random.Random(seed)
    m = random_market(rng, T=rng.choice([1, 2]), max_leaves=4)
    am = adjusted_market(m)
    adj = am.process
    assert entrywise_le(adj, m)
    free = check_arbitrage(m) is None
    for (i, j, t), atoms in am.bsets.sets.items():
        for u in atoms:
            if free:
                assert adj[u][i, j] * adj[u][j, i] == 1
            elif u in am.bsets[(j, i, t)]:
                # both reverse trades attainable: (pi^{ij} pi^{ji} - 1) e_i is in A
                assert adj[u][i, j] * adj[u][j, i] == 1 / (m[u][i, j] * m[u][j, i])
    if free:
        A, At = assemble_A(m), assemble_A(adj)
        assert check_arbitrage(adj, At) is None
        assert cone_equal(A, At)
        # a second pass never loses an adjusted pair
        again = compute_B_sets(adj, At)
        for key, atoms in am.bsets.sets.items():
            assert atoms <= again[key]
