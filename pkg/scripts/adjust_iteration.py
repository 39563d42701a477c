"""How does the adjustment behave when iterated?

The adjusted process is defined by a single pass. This script re-applies it
to its own output until nothing changes and counts the passes that changed
some entry; a count above 1 would mean the single pass is not idempotent.
Markets with an arbitrage are skipped (their B sets overlap).

    python scripts/adjust_iteration.py --markets 100
"""
import argparse
import random
import sys
from collections import Counter
from dataclasses import dataclass

from conelab.adjust import adjusted_market
from conelab.builtin import eg1, eg3, eg32, eg41
from conelab.price import check_arbitrage
from conelab.sampling import random_market


@dataclass
class IterationConfig:
    markets: int = 100
    seed: int = 1
    max_passes: int = 5


def changing_passes(m, limit):
    """Number of passes that changed some entry before a pass changed nothing."""
    for k in range(limit):
        nxt = adjusted_market(m).process
        if all(nxt[u].entries == m[u].entries for u in m.tree.node_ids()):
            return k
        m = nxt
    return None


def main(cfg: IterationConfig) -> int:
    named = {"eg1(3)": eg1(3), "eg3(3)": eg3(3), "eg32(3)": eg32(3), "eg41": eg41()}
    for name, m in named.items():
        print(f"{name}: {changing_passes(m, cfg.max_passes)} changing pass(es)")
    rng = random.Random(cfg.seed)
    counts = Counter()
    for _ in range(cfg.markets):
        m = random_market(rng, T=rng.choice([1, 2]), max_leaves=4)
        if check_arbitrage(m) is not None:
            counts["skipped (arbitrage)"] += 1
            continue
        counts[changing_passes(m, cfg.max_passes)] += 1
    for k, v in sorted(counts.items(), key=str):
        print(f"changing passes {k}: {v} markets")
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--markets", type=int, default=IterationConfig.markets)
    p.add_argument("--seed", type=int, default=IterationConfig.seed)
    a = p.parse_args()
    sys.exit(main(IterationConfig(a.markets, a.seed)))
