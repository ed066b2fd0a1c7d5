"""How much of the candidate-space family a time-bounded sweep gets through.

    python3 scripts/family_coverage.py --limit 100000 --deadline 10
"""

import argparse
from dataclasses import dataclass

from cqi.verify import candidate_family_size, conditions_sweep, fiber_sum_sweep


@dataclass(frozen=True)
class CoverageConfig:
    limit: int = 10**5
    deadline: float = 10.0
    primes: tuple[int, ...] = (2, 3, 5)


def main(cfg: CoverageConfig) -> None:
    sigs, cands = candidate_family_size(cfg.limit)
    print(f"family: {sigs} signatures, {cands} profile candidates (candidate space <= {cfg.limit})")
    single = sum(m + 1 for m in range(1, cfg.limit))
    print(f"single-block signatures alone: {cfg.limit - 1} groups, {single} candidates")
    for lim in (10**3, 10**4):
        s, c = candidate_family_size(lim)
        print(f"  limit {lim}: {s} signatures, {c} candidates")
    cov = conditions_sweep(cfg.limit, cfg.deadline)
    print("conditions:", cov.summary())
    cov = fiber_sum_sweep(cfg.limit, cfg.primes, cfg.deadline)
    print("fibre sums:", cov.summary())


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=int, default=CoverageConfig.limit)
    ap.add_argument("--deadline", type=float, default=CoverageConfig.deadline)
    args = ap.parse_args()
    main(CoverageConfig(args.limit, args.deadline))
