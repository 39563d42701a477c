"""``conelab`` command line.

Exit codes: 0 analysis ran (verdicts live in the report), 1 validation found
violations, 2 usage or input error, 3 superhedging refused because the market
admits an arbitrage, 4 ``--verify`` found a discrepancy.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import builtin, marketfile
from .adjust import adjusted_market, verify_t2
from .attain import assemble_A, is_null_space_linear, member_A, member_staged
from .market import BidAskProcess
from .marketfile import MarketFileError, rat
from .price import (ArbitragePresent, check_arbitrage, find_consistent, member_dual,
                    superhedge_price, verify_representation)
from .ratlp import DeskScaleExceeded
from .report import (ClaimError, adapted_json, parse_claim, parse_eta, process_json,
                     strategy_json, verify)
from .tree import AdaptedVector

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_ARBITRAGE, EXIT_VERIFY = 0, 1, 2, 3, 4
KINDS = ("arbitrage", "rna", "adjust", "superhedge", "member", "represent", "t2",
         "nullspace", "conjecture")


class UsageError(ValueError):
    pass


def cmd_validate(path) -> dict:
    market = marketfile.load(path)
    violations = {u: v for u, v in market.violations().items()}
    return {"command": "validate", "file": str(path), "valid": not violations,
            "violations": violations, "d": market.d, "T": market.tree.horizon,
            "nodes": len(market.tree.nodes)}


def cmd_example(name: str, N: int | None) -> str:
    return marketfile.dumps(builtin.build(name, N))


def _need(value, flag: str, kind: str):
    if value is None:
        raise UsageError(f"analysis {kind!r} needs {flag}")
    return value


def _consistent_witness(found) -> dict:
    return {"kind": "price_process", "Z": process_json(found.process.Z), "terminal_positive": True}


def analyze_arbitrage(market: BidAskProcess) -> dict:
    arb = check_arbitrage(market)
    found = find_consistent(market)
    rep = {"verdicts": {"no_arbitrage": arb is None, "consistent_price_process": found.found},
           "witnesses": {}}
    if arb is not None:
        rep["witnesses"]["arbitrage"] = {"kind": "arbitrage", "claim": adapted_json(arb.claim),
                                         "strategy": strategy_json(arb.strategy)}
    if found:
        rep["witnesses"]["consistent"] = _consistent_witness(found)
    return rep


def _epsilon(strict) -> str:
    if not strict:
        return "0"
    eps = strict.process.epsilon
    return "n/a (no frictional pair)" if eps is None else rat(eps)


def analyze_rna(market: BidAskProcess) -> dict:
    strict = find_consistent(market, strict=True)
    loose = find_consistent(market)
    na = "NA holds" if loose else "NA fails"
    rna = "RNA holds" if strict else "RNA fails"
    rep = {"verdicts": {"summary": f"{rna}, {na}", "robust_no_arbitrage": strict.found,
                        "no_arbitrage": loose.found, "strict_margin": rat(strict.margin),
                        "strict_epsilon": _epsilon(strict)},
           "witnesses": {}}
    if loose:
        rep["witnesses"]["consistent"] = _consistent_witness(loose)
    if strict:
        rep["witnesses"]["strictly_consistent"] = _consistent_witness(strict)
    return rep


def analyze_adjust(market: BidAskProcess) -> dict:
    adj = adjusted_market(market)
    bsets = {f"B[{i+1},{j+1}]_t{t}": sorted(nodes) for (i, j, t), nodes in adj.bsets.sets.items()}
    return {"verdicts": {"unchanged": all(adj.process[u].entries == market[u].entries
                                          for u in market.tree.node_ids())},
            "B_sets": bsets, "adjusted_market": marketfile.dumps(adj.process), "witnesses": {}}


def _claim_witness(claim, res) -> dict:
    if res.member:
        return {"kind": "strategy", "claim": adapted_json(claim), "strategy": strategy_json(res.strategy)}
    return {"kind": "certificate", "claim": adapted_json(claim), "certificate": adapted_json(res.certificate)}


def analyze_member(market: BidAskProcess, claim: AdaptedVector) -> dict:
    res = member_A(assemble_A(market), claim)
    rep = {"verdicts": {"member": res.member}, "witnesses": {"membership": _claim_witness(claim, res)}}
    if check_arbitrage(market) is None:
        rep["verdicts"]["member_dual"] = member_dual(market, claim)
    return rep


def analyze_superhedge(market: BidAskProcess, claim: AdaptedVector, numeraire: int) -> dict:
    if not 1 <= numeraire <= market.d:
        raise UsageError(f"numeraire must be in 1..{market.d}")
    res = superhedge_price(market, claim, numeraire - 1)
    return {"verdicts": {"price": rat(res.price), "numeraire": numeraire,
                         "dual_terminal_positive": res.dual.terminal_positive},
            "witnesses": {"superhedge": {"kind": "superhedge", "claim": adapted_json(claim),
                                         "price": rat(res.price), "numeraire": numeraire,
                                         "strategy": strategy_json(res.strategy),
                                         "Z": process_json(res.dual.Z),
                                         "terminal_positive": res.dual.terminal_positive}}}


def analyze_represent(market: BidAskProcess, claim: AdaptedVector, eta: list) -> dict:
    rep = verify_representation(market, claim, eta)
    out = {"verdicts": {f"xi_{t}_in_C_{t}": v for t, v in rep.verdicts.items()},
           "supermartingale_violations": rep.supermartingale_violations,
           "increments": [adapted_json(x) for x in rep.increments], "witnesses": {}}
    out["verdicts"]["all"] = rep.all_members
    if rep.Z is not None:
        out["witnesses"]["consistent"] = {"kind": "price_process", "Z": process_json(rep.Z),
                                          "terminal_positive": True}
    return out


def analyze_t2(market: BidAskProcess) -> dict:
    r = verify_t2(market)
    rep = {"verdicts": r.as_dict(), "witnesses": {}}
    if r.adjusted_arbitrage is not None:
        rep["adjusted_arbitrage_claim"] = adapted_json(r.adjusted_arbitrage.claim)
    return rep


def analyze_nullspace(market: BidAskProcess) -> dict:
    r = is_null_space_linear(market)
    return {"verdicts": {"null_space_linear": r.linear, "extreme_rays": r.rays_checked,
                         "failing_time": r.time, "failing_node": r.node,
                         "failing_ray": None if r.ray is None else [rat(a) for a in r.ray]},
            "witnesses": {}}


def analyze_conjecture(market: BidAskProcess) -> dict:
    """Experimental: every generator of A decomposes through C_0 + ... + C_T."""
    cone = assemble_A(market)
    tree = market.tree
    d = market.d
    failures = []
    for (u, k), g in zip(cone.tags, cone.generators):
        X = AdaptedVector(tree.horizon, {l: tuple(g[i * d:(i + 1) * d]) for i, l in enumerate(tree.leaves)})
        if not member_staged(market, X, cone).member:
            failures.append(f"{u}:{market.cone(u).labels[k]}")
    return {"verdicts": {"A_equals_sum_of_C_t": not failures, "failures": failures,
                         "note": "experimental; on a finite tree every integrability weight is trivial"},
            "witnesses": {}}


def cmd_analyze(path, kind: str, claim: str | None = None, numeraire: int = 1,
                eta: str | None = None) -> dict:
    if kind not in KINDS:
        raise UsageError(f"unknown analysis {kind!r}; choose from {', '.join(KINDS)}")
    market = marketfile.load(path)
    start = time.perf_counter()
    if kind in ("superhedge", "member", "represent"):
        theta = parse_claim(market, _need(claim, "--claim", kind))
    if kind == "arbitrage":
        rep = analyze_arbitrage(market)
    elif kind == "rna":
        rep = analyze_rna(market)
    elif kind == "adjust":
        rep = analyze_adjust(market)
    elif kind == "superhedge":
        rep = analyze_superhedge(market, theta, numeraire)
    elif kind == "member":
        rep = analyze_member(market, theta)
    elif kind == "represent":
        rep = analyze_represent(market, theta, parse_eta(market, _need(eta, "--eta", kind)))
    elif kind == "t2":
        rep = analyze_t2(market)
    elif kind == "nullspace":
        rep = analyze_nullspace(market)
    else:
        rep = analyze_conjecture(market)
    rep = {"command": "analyze", "analysis": kind, "file": str(path), **rep}
    rep["timing_seconds"] = round(time.perf_counter() - start, 4)
    return rep


def _print_human(rep: dict, out) -> None:
    head = rep["command"] + (f" {rep['analysis']}" if "analysis" in rep else "")
    print(f"{head}: {rep.get('file', '')}", file=out)
    if rep["command"] == "validate":
        print("  valid" if rep["valid"] else "  INVALID", file=out)
        for u, vs in rep["violations"].items():
            for v in vs:
                print(f"  node {u}: {v}", file=out)
        return
    for k, v in rep.get("verdicts", {}).items():
        print(f"  {k}: {v}", file=out)
    for k in rep.get("witnesses", {}):
        print(f"  witness attached: {k}", file=out)
    if "B_sets" in rep:
        for k, v in rep["B_sets"].items():
            print(f"  {k} = {{{', '.join(v)}}}", file=out)
    for v in rep.get("supermartingale_violations", []):
        print(f"  supermartingale violation: {v}", file=out)
    if "verification" in rep:
        print(f"  verification: {rep['verification']}", file=out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conelab", description="Exact analysis of finite markets "
                                "with proportional transaction costs.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="parse a market file and check the bid-ask conditions")
    v.add_argument("file")
    v.add_argument("--json", action="store_true")
    e = sub.add_parser("example", help="emit a built-in example market")
    e.add_argument("name", choices=builtin.NAMES)
    e.add_argument("--n", type=int, default=None, help="truncation level N (ignored for eg41)")
    e.add_argument("-o", "--output")
    a = sub.add_parser("analyze", help="run an analysis on a market file")
    a.add_argument("file")
    a.add_argument("kind", choices=KINDS)
    a.add_argument("--claim", help='terminal claim: "e1-e4", "1,0,-1" or @file.json')
    a.add_argument("--numeraire", type=int, default=1, help="1-based numeraire asset")
    a.add_argument("--eta", help="JSON file with the process eta_0..eta_T")
    a.add_argument("--verify", action="store_true", help="re-check every witness by substitution")
    a.add_argument("--json", action="store_true", help="machine-readable output")
    a.add_argument("-o", "--output", help="for 'adjust': write the adjusted market file here")
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "example":
            text = cmd_example(args.name, args.n)
            if args.output:
                Path(args.output).write_text(text)
            else:
                out.write(text)
            return EXIT_OK
        if args.command == "validate":
            try:
                rep = cmd_validate(args.file)
            except MarketFileError as exc:
                rep = {"command": "validate", "file": args.file, "valid": False,
                       "parse_error": str(exc), "violations": {}}
                _emit(rep, args.json, out)
                if not args.json:
                    print(f"  parse error: {exc}", file=out)
                return EXIT_USAGE
            _emit(rep, args.json, out)
            return EXIT_OK if rep["valid"] else EXIT_INVALID
        try:
            rep = cmd_analyze(args.file, args.kind, args.claim, args.numeraire, args.eta)
        except ArbitragePresent as exc:
            rep = {"command": "analyze", "analysis": args.kind, "file": args.file,
                   "verdicts": {"refused": "market admits an arbitrage"},
                   "witnesses": {"arbitrage": {"kind": "arbitrage", "claim": adapted_json(exc.witness.claim),
                                               "strategy": strategy_json(exc.witness.strategy)}}}
            _emit(rep, args.json, out)
            return EXIT_ARBITRAGE
        code = EXIT_OK
        if args.verify:
            problems = verify(marketfile.load(args.file), rep)
            rep["verification"] = "ok" if not problems else problems
            if problems:
                code = EXIT_VERIFY
        if args.kind == "adjust" and args.output:
            Path(args.output).write_text(rep["adjusted_market"])
        _emit(rep, args.json, out)
        return code
    except (MarketFileError, UsageError, ClaimError, DeskScaleExceeded, ValueError, OSError) as exc:
        print(f"conelab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _emit(rep: dict, as_json: bool, out) -> None:
    if as_json:
        out.write(json.dumps(rep, indent=2) + "\n")
    else:
        _print_human(rep, out)


if __name__ == "__main__":
    sys.exit(main())
