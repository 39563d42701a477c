"""Report documents: JSON-ready witnesses and their re-verification."""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .attain import Strategy, assemble_A, flatten
from .market import BidAskProcess
from .marketfile import parse_rational, rat
from .price import _in_polar_closure, is_consistent
from .ratlp import dot
from .tree import AdaptedVector, lift

_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*e(\d+)\s*")


class ClaimError(ValueError):
    pass


def vec(v) -> list[str]:
    return [rat(a) for a in v]


def adapted_json(X: AdaptedVector) -> dict:
    return {"time": X.time, "values": {u: vec(v) for u, v in X.values.items()}}


def adapted_from_json(obj: dict) -> AdaptedVector:
    return AdaptedVector(obj["time"], {u: tuple(parse_rational(a, f"values[{u}]") for a in v)
                                       for u, v in obj["values"].items()})


def process_json(Z) -> list:
    return [adapted_json(z) for z in Z]


def process_from_json(obj: list) -> list:
    return [adapted_from_json(z) for z in obj]


def strategy_json(st: Strategy) -> dict:
    labels = st.market.cone(st.market.tree.root).labels
    out = {}
    for u, cs in st.coefficients.items():
        nz = {labels[k]: rat(c) for k, c in enumerate(cs) if c}
        if nz:
            out[u] = nz
    return out


def strategy_from_json(market: BidAskProcess, obj: dict) -> Strategy:
    st = Strategy.zero(market)
    labels = list(market.cone(market.tree.root).labels)
    for u, cs in obj.items():
        if u not in st.coefficients:
            raise ClaimError(f"strategy names unknown node {u!r}")
        for label, c in cs.items():
            st.coefficients[u][labels.index(label)] = parse_rational(c, f"strategy[{u}][{label}]")
    return st


def parse_vector(text: str, d: int) -> tuple:
    """``"e1-e4"``, ``"2e1 - 1/2 e3"`` or ``"1,0,0,-1"``."""
    text = text.strip()
    if "e" in text:
        out = [Fraction(0)] * d
        pos = 0
        first = True
        while pos < len(text):
            m = _TERM.match(text, pos)
            if not m or m.end() == pos or (not first and not m.group(1)):
                raise ClaimError(f"cannot parse vector {text!r} near position {pos}")
            sign = -1 if m.group(1) == "-" else 1
            coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            k = int(m.group(3))
            if not 1 <= k <= d:
                raise ClaimError(f"asset e{k} out of range 1..{d}")
            out[k - 1] += sign * coef
            pos = m.end()
            first = False
        return tuple(out)
    parts = [p for p in text.split(",")]
    if len(parts) != d:
        raise ClaimError(f"vector {text!r} has {len(parts)} entries, expected {d}")
    return tuple(parse_rational(p.strip(), f"vector entry {k}") for k, p in enumerate(parts))


def parse_claim(market: BidAskProcess, text: str) -> AdaptedVector:
    """A terminal claim: a constant vector, or ``@file.json`` mapping leaf ids to vectors."""
    tree = market.tree
    if text.startswith("@"):
        obj = json.loads(Path(text[1:]).read_text())
        if "values" in obj:
            X = adapted_from_json(obj)
        else:
            X = AdaptedVector(tree.horizon, {u: tuple(parse_rational(a, u) for a in v) for u, v in obj.items()})
        X.check(tree, market.d)
        return X if X.time == tree.horizon else lift(tree, X, tree.horizon)
    return AdaptedVector.constant(tree, tree.horizon, parse_vector(text, market.d))


def parse_eta(market: BidAskProcess, path) -> list:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict) and "eta" in obj:
        obj = obj["eta"]
    eta = []
    for t, item in enumerate(obj):
        if "values" in item:
            X = adapted_from_json(item)
        else:
            X = AdaptedVector(t, {u: (parse_vector(v, market.d) if isinstance(v, str)
                                      else tuple(parse_rational(a, u) for a in v)) for u, v in item.items()})
        X.check(market.tree, market.d)
        eta.append(X)
    return eta


def verify(market: BidAskProcess, report: dict) -> list[str]:
    """Re-check every witness in a (JSON round-tripped) report by substitution."""
    report = json.loads(json.dumps(report))
    problems = []
    cone = assemble_A(market)
    gens = cone.generators

    def check_strategy(obj, target, what):
        st = strategy_from_json(market, obj)
        if not st.is_admissible():
            problems.append(f"{what}: negative coefficient")
        if flatten(market, st.realized()) != flatten(market, target):
            problems.append(f"{what}: realized claim differs from the stated claim")

    def check_certificate(obj, claim, what):
        w = flatten(market, adapted_from_json(obj))
        if any(dot(w, g) > 0 for g in gens):
            problems.append(f"{what}: certificate is positive on a generator")
        if dot(w, flatten(market, claim)) <= 0:
            problems.append(f"{what}: certificate does not separate the claim")

    def check_process(obj, what, positive):
        Z = process_from_json(obj)
        ok = is_consistent(market, Z) if positive else _in_polar_closure(market, Z)
        if not ok:
            problems.append(f"{what}: price process fails consistency")

    for key, w in report.get("witnesses", {}).items():
        kind = w["kind"]
        if kind == "arbitrage":
            claim = adapted_from_json(w["claim"])
            flat = flatten(market, claim)
            if any(a < 0 for a in flat) or not any(flat):
                problems.append(f"{key}: arbitrage claim is not nonnegative and nonzero")
            check_strategy(w["strategy"], claim, key)
        elif kind == "strategy":
            claim = adapted_from_json(w["claim"])
            check_strategy(w["strategy"], claim, key)
        elif kind == "certificate":
            check_certificate(w["certificate"], adapted_from_json(w["claim"]), key)
        elif kind == "price_process":
            check_process(w["Z"], key, w.get("terminal_positive", True))
        elif kind == "superhedge":
            claim = adapted_from_json(w["claim"])
            price = parse_rational(w["price"], "price")
            i = w["numeraire"] - 1
            shift = tuple(price if k == i else Fraction(0) for k in range(market.d))
            residual = claim - AdaptedVector.constant(market.tree, claim.time, shift)
            check_strategy(w["strategy"], residual, key)
            Z = process_from_json(w["Z"])
            check_process(w["Z"], key, w.get("terminal_positive", False))
            T = market.tree.horizon
            if Z[0].values[market.tree.root][i] != 1:
                problems.append(f"{key}: dual process not normalized in the numeraire")
            value = sum((market.tree.leaf_probabilities[l] * dot(Z[T].values[l], claim.values[l])
                         for l in market.tree.leaves), Fraction(0))
            if value != price:
                problems.append(f"{key}: dual value {value} differs from price {price}")
        else:
            problems.append(f"{key}: unknown witness kind {kind!r}")
    return problems
