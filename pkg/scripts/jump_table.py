"""Max-jump sums next to the staircase class counts, as CSV."""

import argparse
import csv
import sys
from dataclasses import dataclass

from cqi.counting import count_classes_closed_form, count_Y
from cqi.permstat import BRUTE_MAX_N, jump_sum_brute, jump_sum_closed, staircase


@dataclass(frozen=True)
class JumpConfig:
    max_n: int = 12
    brute_up_to: int = 8
    y_up_to: int = 8  # |Y| walks (n+1)! block-norm vectors


def rows(cfg: JumpConfig):
    for n in range(1, cfg.max_n + 1):
        brute = jump_sum_brute(n) if n <= min(cfg.brute_up_to, BRUTE_MAX_N) else ""
        sig = staircase(n)
        y = count_Y(sig) if n <= cfg.y_up_to else ""
        yield [n, brute, jump_sum_closed(n), count_classes_closed_form(sig).total, y]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=JumpConfig.max_n)
    ap.add_argument("--brute-up-to", type=int, default=JumpConfig.brute_up_to)
    ap.add_argument("--y-up-to", type=int, default=JumpConfig.y_up_to)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "brute", "closed", "classes", "y_size"])
    for r in rows(JumpConfig(args.max_n, args.brute_up_to, args.y_up_to)):
        w.writerow(r)
