"""FTAP and duality sweep over random markets.

For each market: arbitrage LP vs consistent-price LP, strict vs non-strict,
and on arbitrage-free markets primal/dual superhedging prices for a few
claims. Prints one CSV row per market and a summary line.

    python scripts/ftap_sweep.py --markets 500 --seed 3
"""
import argparse
import csv
import random
import sys
import time
from dataclasses import dataclass

from conelab.attain import assemble_A, member_A
from conelab.price import check_arbitrage, find_consistent, member_dual, superhedge_price
from conelab.sampling import random_claim, random_market


@dataclass
class SweepConfig:
    markets: int = 200
    seed: int = 0
    claims: int = 3


def main(cfg: SweepConfig) -> int:
    rng = random.Random(cfg.seed)
    out = csv.writer(sys.stdout)
    out.writerow(["market", "d", "T", "leaves", "no_arbitrage", "consistent", "strict", "claims", "gaps", "dual_mismatch"])
    bad = 0
    start = time.perf_counter()
    for k in range(cfg.markets):
        m = random_market(rng)
        na = check_arbitrage(m) is None
        cons = find_consistent(m).found
        strict = find_consistent(m, strict=True).found
        gaps = mismatch = 0
        if na:
            cone = assemble_A(m)
            for _ in range(cfg.claims):
                claim = random_claim(rng, m)
                res = superhedge_price(m, claim, rng.randrange(m.d), cone)
                gaps += res.price != res.dual.value
                mismatch += member_dual(m, claim) != member_A(cone, claim).member
        bad += (na != cons) + (strict and not cons) + gaps + mismatch
        out.writerow([k, m.d, m.tree.horizon, len(m.tree.leaves), na, cons, strict,
                      cfg.claims if na else 0, gaps, mismatch])
    print(f"# {cfg.markets} markets, {bad} discrepancies, {time.perf_counter() - start:.1f}s", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--markets", type=int, default=SweepConfig.markets)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--claims", type=int, default=SweepConfig.claims)
    a = p.parse_args()
    sys.exit(main(SweepConfig(a.markets, a.seed, a.claims)))
