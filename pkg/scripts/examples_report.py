"""Reproduce the worked examples: verdicts and adjusted tables."""
import argparse
from dataclasses import dataclass

from conelab.adjust import adjusted_market, verify_t2
from conelab.attain import assemble_A, member_A
from conelab.builtin import eg1, eg3, eg32, eg41
from conelab.price import check_arbitrage, find_consistent, superhedge_price
from conelab.tree import AdaptedVector


@dataclass
class ReportConfig:
    N: int = 4


def show_matrix(P, indent="    "):
    for r in P.entries:
        print(indent + "  ".join(f"{str(a):>5}" for a in r))


def main(cfg: ReportConfig) -> None:
    N = cfg.N
    m = eg1(N)
    strict = find_consistent(m, strict=True)
    print(f"eg1(N={N}): no arbitrage {check_arbitrage(m) is None}, consistent {find_consistent(m).found}, "
          f"strictly consistent {strict.found} (margin {strict.margin})")
    m = eg3(N)
    print(f"eg3(N={N}): adjusted rates all 1: "
          f"{all(a == 1 for u in m.tree.node_ids() for r in adjusted_market(m).process[u].entries for a in r)}; "
          f"t2 {verify_t2(m).as_dict()}")
    m = eg32(N)
    adj = adjusted_market(m).process
    print(f"eg32(N={N}) adjusted matrices:")
    for u in m.tree.node_ids():
        print(f"  node {u}:")
        show_matrix(adj[u])
    m = eg41()
    claim = AdaptedVector.constant(m.tree, 1, (1, 0, 0, -1))
    res = member_A(assemble_A(m), claim)
    print(f"eg41: e1-e4 attainable {res.member}")
    for u in m.tree.node_ids():
        print(f"  trade at {u}: {[str(a) for a in res.strategy.trade(u)]}")
    for i in range(4):
        e = tuple(1 if k == 0 else 0 for k in range(4))
        price = superhedge_price(m, AdaptedVector.constant(m.tree, 1, e), i).price
        print(f"  superhedging price of e1 in asset {i + 1}: {price}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=ReportConfig.N)
    main(ReportConfig(p.parse_args().n))
