"""Generation counts, verification and the log-log density fit over a range of epsilons.

    python3 scripts/density_experiment.py --epsilons 0.05,0.025,0.0125,0.00625 --csv density.csv
"""

import argparse
import csv
import time

from linkpack.packing import density_fit, multigeneration, nominal_count, verify_packing


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--epsilons", default="0.05,0.025,0.0125")
    ap.add_argument("--generations", type=int, default=10)
    ap.add_argument("--csv")
    args = ap.parse_args()
    eps = [float(e) for e in args.epsilons.split(",")]

    rows, gen0 = [], []
    for e in eps:
        t0 = time.perf_counter()
        p = multigeneration(e, args.generations)
        rep = verify_packing(p)
        gen0.append(p.counts[0])
        print(f"eps={e:<9g} counts={p.counts} total={p.total_count} nominal={nominal_count(e)} "
              f"bound={8 / 7 * p.counts[0] + len(p.counts):.1f} verified={rep.passed} "
              f"min_dist={rep.min_distance:.5f} ({time.perf_counter() - t0:.1f}s)")
        for g in p.generations:
            d = min(x for gi, _, x in rep.distances if gi == g.index)
            rows.append((e, g.index, g.count, d))

    fit = density_fit(eps, gen0)
    print(f"exponent {fit.exponent:.4f}  r2 {fit.r2:.5f}")
    if len(eps) >= 3:
        naive = density_fit(eps, [nominal_count(e) for e in eps])
        print(f"exponent of floor(1/8eps)^3 counts: {naive.exponent:.4f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epsilon", "generation", "count", "min_pair_distance"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
