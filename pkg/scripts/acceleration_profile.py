#!/usr/bin/env python3
"""Convergence profile of the ordinary projection with and without Shanks
acceleration.

For a coefficient index n coprime to p, prints the valuation of consecutive
differences of the raw sequence a_{n p^m} and of each Shanks column.  The raw
sequence gains roughly a constant number of digits per step (one geometric
transient per finite-slope U_p eigenvalue); each Shanks column removes the
dominant transient and multiplies the rate.

    python3 scripts/acceleration_profile.py [--disc 12] [--p 5] [--n 1]
                                            [--depth 4] [--prec 32]
"""

import argparse
import time

from rmlab.eisenstein import LogCache, diag_coefficient, shanks_step
from rmlab.padic import PadicContext
from rmlab.quadfield import IdealDivisorEngine, NarrowClassGroup


def profile(seq):
    return [None if (x - y).is_zero else (x - y).v
            for x, y in zip(seq, seq[1:])]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--disc", type=int, default=12)
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--prec", type=int, default=32)
    args = ap.parse_args()
    if args.n % args.p == 0:
        ap.error("--n must be coprime to --p")

    ctx = PadicContext(args.p, args.prec)
    group = NarrowClassGroup(args.disc)
    engine = IdealDivisorEngine(group, args.p)
    chi = group.odd_characters()[0]
    logs = LogCache(ctx)

    seq = []
    for m in range(args.depth + 1):
        t0 = time.time()
        seq.append(diag_coefficient(args.n * args.p ** m, chi, engine, ctx,
                                    logs))
        print(f"a_{args.n}*{args.p}^{m} computed in {time.time() - t0:.1f} s")

    print(f"\nraw agreement profile:    {profile(seq)}")
    col = 0
    while len(seq) >= 3:
        seq = shanks_step(seq)
        col += 1
        print(f"after Shanks column {col}:   {profile(seq)}")


if __name__ == "__main__":
    main()
