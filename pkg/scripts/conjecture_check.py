"""Experimental check that A equals C_0 + ... + C_T on finite trees.

Every generator of A is pushed through the staged decomposition LP, and
random attainable claims are decomposed too. On a finite tree the identity
holds for structural reasons (each time-t generator already lies in C_t), so
this exercises the code rather than the open infinite-dimensional question.
"""
import argparse
import random
import sys
from dataclasses import dataclass

from conelab.attain import assemble_A, member_A, member_staged
from conelab.builtin import eg1, eg3, eg32, eg41
from conelab.cli import analyze_conjecture
from conelab.sampling import random_claim, random_market


@dataclass
class ConjectureConfig:
    markets: int = 10
    seed: int = 4


def main(cfg: ConjectureConfig) -> int:
    failures = 0
    for name, m in {"eg1(3)": eg1(3), "eg3(3)": eg3(3), "eg32(2)": eg32(2), "eg41": eg41()}.items():
        v = analyze_conjecture(m)["verdicts"]
        print(f"{name}: generators decompose {v['A_equals_sum_of_C_t']}")
        failures += not v["A_equals_sum_of_C_t"]
    rng = random.Random(cfg.seed)
    claims = 0
    for _ in range(cfg.markets):
        m = random_market(rng)
        failures += bool(analyze_conjecture(m)["verdicts"]["failures"])
        cone = assemble_A(m)
        X = random_claim(rng, m)
        res = member_A(cone, X)
        if res.member:
            claims += 1
            failures += not member_staged(m, X, cone).member
    print(f"{cfg.markets} random markets, {claims} attainable claims decomposed, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--markets", type=int, default=ConjectureConfig.markets)
    p.add_argument("--seed", type=int, default=ConjectureConfig.seed)
    a = p.parse_args()
    sys.exit(main(ConjectureConfig(a.markets, a.seed)))
