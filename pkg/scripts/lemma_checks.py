"""Randomised checks of the free-group statements: cube divisibility, the mod-p
filtration degree bound, band-sum invariance and Milnor relators.

    python3 scripts/lemma_checks.py --samples 2000 --seed 1
"""

import argparse
import random
from collections import Counter

import numpy as np

from linkpack.magnus import (
    INFINITY, NRPoly, Word, band_sum_invariance, basis, cube_divisibility, filtration_min_degree,
    milnor_relator_check, random_lcs_element,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    nrng = np.random.default_rng(args.seed)

    cube_ok = 0
    for _ in range(args.samples):
        c = nrng.integers(-10**6, 10**6, size=basis(2).size).astype(object)
        c[0] = 1
        cube_ok += cube_divisibility(NRPoly(2, c))
    print(f"cube divisibility: {cube_ok}/{args.samples}")

    margin = Counter()
    worst = 0
    for k in range(args.samples):
        p, v, level = rng.choice([2, 3, 5]), rng.randint(1, 4), rng.randint(1, 4)
        deg = filtration_min_degree(random_lcs_element(level, p, v, seed=args.seed * 10**6 + k), p, v)
        margin["inf" if deg == INFINITY else int(deg - level)] += 1
        worst += deg < level
    print(f"filtration: {args.samples - worst}/{args.samples} meet the bound; "
          f"degree minus level: {dict(sorted(margin.items(), key=str))}")

    band = 0
    for k in range(args.samples):
        p, v = rng.choice([2, 3, 5]), rng.randint(1, 3)
        beta = random_lcs_element(v + 1, p, v, seed=args.seed * 10**6 + 7 * k + 1)
        lon = Word(tuple(rng.choice([1, -1]) * rng.randint(1, v) for _ in range(rng.randint(1, 12))))
        band += band_sum_invariance(lon, beta, p, tuple(rng.sample(range(1, v + 1), v)))
    print(f"band sums: {band}/{args.samples}")

    rel = 0
    for _ in range(args.samples):
        v = rng.randint(2, 4)
        c1 = Word(tuple(rng.choice([1, -1]) * rng.randint(1, v) for _ in range(rng.randint(0, 8))))
        c2 = Word(tuple(rng.choice([1, -1]) * rng.randint(1, v) for _ in range(rng.randint(0, 8))))
        rel += milnor_relator_check(c1, c2, rng.randint(1, v), v)
    print(f"Milnor relators: {rel}/{args.samples}")


if __name__ == "__main__":
    main()
