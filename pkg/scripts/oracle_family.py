"""Cross-check criterion, oracle and closed forms on every p-group with |End(G)| <= 2^k."""

import argparse
import time
from dataclasses import dataclass

from cqi.verify import check_counts, check_oracle_agreement, signatures_by_endomorphism


@dataclass(frozen=True)
class FamilyConfig:
    primes: tuple[int, ...] = (2, 3)
    end_log2: int = 22


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="2,3")
    ap.add_argument("--end-log2", type=int, default=FamilyConfig.end_log2)
    args = ap.parse_args()
    cfg = FamilyConfig(tuple(int(x) for x in args.primes.split(",")), args.end_log2)
    failures = 0
    for p in cfg.primes:
        for sig in signatures_by_endomorphism(p, cfg.end_log2):
            t = time.perf_counter()
            a = check_oracle_agreement(sig)
            c = check_counts(sig)
            failures += (not a.ok) + (not c.ok)
            print(f"{sig.text():40s} pairs={a.values['pairs']:>9} X={c.values['subgroups_closed']:>6} "
                  f"classes={c.values['classes_closed']:>4} {'ok' if a.ok and c.ok else 'FAIL'} {time.perf_counter() - t:.2f}s")
    print("failures:", failures)
    raise SystemExit(1 if failures else 0)
