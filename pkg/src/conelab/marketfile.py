"""Market file format: JSON with exact rational strings.

Layout (keys always emitted in this order, one node per line)::

    {
      "format": "conelab-market/1",
      "d": 2,
      "T": 1,
      "triangle_required": true,
      "nodes": [
        {"id": "0", "time": 0, "parent": null, "matrix": [["1", "1"], ["2", "1"]]},
        {"id": "1", "time": 1, "parent": "0", "probability": "4/7", "matrix": [...]}
      ]
    }

Rationals are strings "p/q" or "p" (lowest terms on output). Floats are
rejected.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .market import BidAskMatrix, BidAskProcess
from .ratlp import StructuralError
from .tree import ScenarioTree, TreeError

FORMAT = "conelab-market/1"
_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


class MarketFileError(ValueError):
    """Parse failure with the JSON path of the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def rat(s: Fraction) -> str:
    return str(Fraction(s))


def parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise MarketFileError(where, f"expected a rational string like \"3/4\", got {json.dumps(value)}")
    if isinstance(value, int):
        return Fraction(value)
    if not _RATIONAL.match(value):
        raise MarketFileError(where, f"malformed rational {value!r} (use \"p/q\")")
    try:
        return Fraction(value.replace(" ", ""))
    except ZeroDivisionError:
        raise MarketFileError(where, f"zero denominator in {value!r}") from None


def _field(obj: dict, key: str, where: str, kind):
    if key not in obj:
        raise MarketFileError(where, f"missing field {key!r}")
    v = obj[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool) and kind is int):
        raise MarketFileError(f"{where}.{key}", f"expected {kind.__name__}, got {json.dumps(v)}")
    return v


def loads(text: str) -> BidAskProcess:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MarketFileError(f"line {e.lineno} column {e.colno}", e.msg) from None
    if not isinstance(doc, dict):
        raise MarketFileError("$", "top level must be an object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise MarketFileError("$.format", f"unsupported format {fmt!r}")
    d = _field(doc, "d", "$", int)
    T = _field(doc, "T", "$", int)
    if d < 2:
        raise MarketFileError("$.d", "need at least 2 assets")
    tri = doc.get("triangle_required", True)
    if not isinstance(tri, bool):
        raise MarketFileError("$.triangle_required", "expected true or false")
    nodes = _field(doc, "nodes", "$", list)
    tree_nodes, probs, mats = [], {}, {}
    for k, n in enumerate(nodes):
        where = f"$.nodes[{k}]"
        if not isinstance(n, dict):
            raise MarketFileError(where, "node must be an object")
        nid = _field(n, "id", where, str)
        time = _field(n, "time", where, int)
        parent = n.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise MarketFileError(f"{where}.parent", "expected a node id string or null")
        tree_nodes.append((nid, time, parent))
        if "probability" in n:
            p = parse_rational(n["probability"], f"{where}.probability")
            if p <= 0:
                raise MarketFileError(f"{where}.probability", f"probability {p} must be > 0")
            probs[nid] = p
        elif time == T:
            raise MarketFileError(where, "leaf node needs a probability")
        rows = _field(n, "matrix", where, list)
        if len(rows) != d:
            raise MarketFileError(f"{where}.matrix", f"expected {d} rows, got {len(rows)}")
        entries = []
        for i, r in enumerate(rows):
            if not isinstance(r, list) or len(r) != d:
                raise MarketFileError(f"{where}.matrix[{i}]", f"expected a row of {d} entries")
            entries.append([parse_rational(v, f"{where}.matrix[{i}][{j}]") for j, v in enumerate(r)])
        mats[nid] = BidAskMatrix(entries, triangle_required=tri)
    try:
        tree = ScenarioTree(T, tree_nodes, probs)
        return BidAskProcess(tree, mats)
    except (TreeError, StructuralError) as e:
        raise MarketFileError("$.nodes", str(e)) from None


def load(path) -> BidAskProcess:
    return loads(Path(path).read_text())


def dumps(market: BidAskProcess) -> str:
    tree = market.tree
    tri = all(m.triangle_required for m in market.matrices.values())
    head = (f'{{\n  "format": "{FORMAT}",\n  "d": {market.d},\n  "T": {tree.horizon},\n'
            f'  "triangle_required": {json.dumps(tri)},\n  "nodes": [\n')
    lines = []
    for n in tree.nodes:
        obj = {"id": n.id, "time": n.time, "parent": n.parent}
        if n.time == tree.horizon:
            obj["probability"] = rat(tree.leaf_probabilities[n.id])
        obj["matrix"] = [[rat(a) for a in r] for r in market[n.id].entries]
        lines.append("    " + json.dumps(obj))
    return head + ",\n".join(lines) + "\n  ]\n}\n"


def dump(market: BidAskProcess, path) -> None:
    Path(path).write_text(dumps(market))
