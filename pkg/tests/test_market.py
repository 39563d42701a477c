import random
from fractions import Fraction as F

from hypothesis import assume, given, strategies as st

from conelab.market import (BidAskMatrix, chain_tighten, complete_by_chains, in_polar, node_cone, validate)
from conelab.ratlp import cone_member, dot, extreme_rays
from conelab.sampling import random_matrix, random_vector
from oracles import chain_min

EG1 = BidAskMatrix([[1, 1], [2, 1]])


def test_validate_examples():
    assert validate(BidAskMatrix.frictionless(2)) == []
    assert validate(EG1) == []
    bad = validate(BidAskMatrix([[1, F(1, 2)], [1, 1]]))
    assert any(v.startswith("triangle: pi[1,2]*pi[2,1] = 1/2 < pi[1,1] = 1") for v in bad)
    assert validate(BidAskMatrix([[1, F(1, 2)], [1, 1]], triangle_required=False)) == []
    assert any(v.startswith("diagonal") for v in validate(BidAskMatrix([[2, 1], [1, 1]])))
    assert any(v.startswith("positivity") for v in validate(BidAskMatrix([[1, 0], [1, 1]])))


def test_chain_tighten_examples():
    assert chain_tighten(EG1) == EG1
    P = BidAskMatrix([[1, 2, 10], [100, 1, 3], [100, 100, 1]])
    Q = chain_tighten(P)
    assert Q[0, 2] == 6
    assert [list(r) for r in Q.entries] == chain_min(P.entries)


def test_complete_by_chains_eg32_time1():
    for n in range(1, 7):
        w = F(n)
        listed = {(0, 3): w, (3, 0): 1 / w, (1, 2): w, (2, 1): 1 / w, (3, 2): 1, (2, 3): 3}
        P = complete_by_chains(4, listed)
        assert P[0, 2] == w  # 1 -> 4 -> 3
        assert P[0, 1] == 1  # 1 -> 4 -> 3 -> 2 at w * 1 * (1/w)
        assert validate(P) == []
        big = [[F(1) if i == j else listed.get((i, j), F(10 ** 6)) for j in range(4)] for i in range(4)]
        assert [list(r) for r in P.entries] == chain_min(big)


def test_node_cone_examples():
    c = node_cone(BidAskMatrix.frictionless(2))
    assert set(c.generators) == {(-1, 0), (0, -1), (-1, 1), (1, -1)}
    assert set(c.polar) == {(1, 0), (0, 1), (1, -1), (-1, 1)}
    c = node_cone(EG1)
    assert set(c.polar) == {(1, 0), (0, 1), (1, -1), (-1, 2)}
    assert c.labels == ("-e1", "-e2", "z1,2", "z2,1")
    assert in_polar(EG1, (1, 1)) and not in_polar(EG1, (3, 1))


def test_eg1_trading_cone_halfspaces():
    # the generator description of -K_0 coincides with {x + y <= 0, 2x + y <= 0}
    gens = node_cone(EG1).generators
    for a, b in [(1, 1), (2, 1)]:
        assert all(a * x + b * y <= 0 for x, y in gens)
    grid = [(F(x, 2), F(y, 2)) for x in range(-6, 7) for y in range(-6, 7)]
    for v in grid:
        halfspaces = v[0] + v[1] <= 0 and 2 * v[0] + v[1] <= 0
        assert cone_member(gens, v).member == halfspaces


def polar_rays(matrix):
    """Generators of K* = {w : rows.w >= 0} via slack variables and extreme_rays."""
    rows = node_cone(matrix).polar
    d = matrix.d
    n = len(rows)
    M = [list(r) + [-1 if k == m else 0 for k in range(n)] for m, r in enumerate(rows)]
    return sorted({tuple(r[:d]) for r in extreme_rays(M, d + n) if any(r[:d])})


@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_strong_duality(seed, d):
    rng = random.Random(seed)
    P = random_matrix(rng, d)
    cone = node_cone(P)
    W = polar_rays(P)
    assert all(in_polar(P, w) for w in W)
    for _ in range(10):
        v = random_vector(rng, d)
        assert cone_member(cone.generators, v).member == all(dot(w, v) <= 0 for w in W)


@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_weak_duality(seed, d):
    rng = random.Random(seed)
    P = random_matrix(rng, d)
    cone = node_cone(P)
    W = polar_rays(P)
    for _ in range(10):
        v = random_vector(rng, d)
        weights = [F(rng.randint(0, 3)) for _ in W]
        w = [sum(c * r[k] for c, r in zip(weights, W)) for k in range(d)]
        assert in_polar(P, w)
        assert not (cone_member(cone.generators, v).member and dot(w, v) > 0)


@given(st.lists(st.lists(st.fractions(min_value=F(1, 2), max_value=5, max_denominator=4),
                         min_size=3, max_size=3), min_size=3, max_size=3))
def test_chain_tighten_idempotent_and_minimal(rows):
    for i in range(3):
        rows[i][i] = F(1)
    P = BidAskMatrix(rows)
    Q = chain_tighten(P)
    # a chain cycle with product < 1 has no bid-ask closure
    assume(all(Q[i, i] == 1 for i in range(3)))
    assert chain_tighten(Q) == Q
    assert validate(Q) == []
    assert [list(r) for r in Q.entries] == chain_min(P.entries)
