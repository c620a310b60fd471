"""The ten acceptance criteria, each at its stated tolerance.

Every criterion prints one PASS/FAIL line, under pytest as well as when the
file is run directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time

import numpy as np
import pytest

from linkpack import data_path
from linkpack.burnside import IDENTITY, X, Y, b23_closure, b23_mul, b23_pow, burnside_order
from linkpack.certify import certificate, dc_count_bound, gauss_linking_integral, linking_integer
from linkpack.diagrams import load_pd, mu_bar
from linkpack.geometry import (
    borromean_rings, canonical_hopf, circle_points, random_rotation, rigid_transform, split_pair,
)
from linkpack.homology import build_complex, h1_basis
from linkpack.magnus import (
    INFINITY, NRPoly, Word, band_sum_invariance, basis, cube_divisibility, filtration_min_degree,
    random_lcs_element,
)
from linkpack.packing import density_fit, generation0, multigeneration, verify_packing

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from conftest import gf2_rank  # noqa: E402


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title} -- {detail}"
    print("\n" + line, flush=True)


def criterion_1():
    rows = []
    ok = True
    for eps in (0.1, 0.2):
        t0 = time.perf_counter()
        hopf = certificate(canonical_hopf(eps)).eq1
        t1 = time.perf_counter()
        split = certificate(split_pair(eps)).eq1
        t2 = time.perf_counter()
        ok &= hopf == 1 and split == 0 and t1 - t0 < 30 and t2 - t1 < 30
        rows.append(f"eps={eps}: hopf={hopf} split={split} ({t1 - t0:.2f}s, {t2 - t1:.2f}s)")
    return ok, "; ".join(rows)


def criterion_2():
    t0 = time.perf_counter()
    gen = generation0(0.05)
    certs = [certificate(link) for link in gen.links]
    collisions = [(i, j) for (i, a), (j, b) in itertools.combinations(enumerate(certs), 2)
                  if (a.fingerprint, a.x, a.y) == (b.fingerprint, b.x, b.y)]
    dt = time.perf_counter() - t0
    ok = not collisions and all(c.eq1 == 1 for c in certs) and dt < 300
    return ok, f"{len(certs)} pairs, {len(collisions)} collisions, all eq1=1: " \
               f"{all(c.eq1 == 1 for c in certs)}, {dt:.1f}s"


def criterion_3():
    ratios = [dc_count_bound(e / 2).log_value / dc_count_bound(e).log_value
              for e in (0.2, 0.1, 0.05, 0.025)]
    ok = all(abs(r / 8 - 1) <= 0.05 for r in ratios)
    return ok, "ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def criterion_4():
    t0 = time.perf_counter()
    eps = [0.05, 0.025, 0.0125]
    fit = density_fit(eps)
    series = []
    ok = abs(fit.exponent - 3.0) <= 0.3
    for e in eps:
        p = multigeneration(e, 10)
        bound = 8 / 7 * p.counts[0] + len(p.generations)
        ok &= p.total_count < bound and verify_packing(p).passed
        series.append(f"{p.counts} total {p.total_count} < {bound:.1f}")
    dt = time.perf_counter() - t0
    ok &= dt < 600
    return ok, f"exponent {fit.exponent:.3f} (r2 {fit.r2:.4f}); " + "; ".join(series) + f"; {dt:.1f}s"


def criterion_5():
    hopf = mu_bar(load_pd(data_path("hopf.pd")), (1, 2)).coefficient
    unlink = mu_bar(load_pd(data_path("unlink.pd")), (1, 2, 3)).coefficient
    borr = mu_bar(load_pd(data_path("borromean.pd")), (1, 2, 3)).coefficient
    ok = abs(hopf) == 1 and unlink == 0 and abs(borr) == 1 and borr % 3 != 0
    return ok, f"hopf mu12={hopf}, unlink mu123={unlink}, borromean mu123={borr} (mod 3: {borr % 3})"


def criterion_6():
    rng = np.random.default_rng(2024)
    passed = 0
    for _ in range(200):
        coeffs = rng.integers(-1000, 1001, size=basis(2).size).astype(object)
        coeffs[0] = 1
        passed += cube_divisibility(NRPoly(2, coeffs))
    return passed == 200, f"{passed}/200 cubes divisible"


def criterion_7():
    rng = random.Random(7)
    bad_level, bad_top = [], []
    for k in range(500):
        p = rng.choice([2, 3, 5])
        v = rng.randint(1, 4)
        level = rng.randint(1, 4)
        w = random_lcs_element(level, p, v, seed=k)
        if filtration_min_degree(w, p, v) < level:
            bad_level.append(k)
    for k in range(100):
        p = rng.choice([2, 3, 5])
        v = rng.randint(1, 4)
        if filtration_min_degree(random_lcs_element(v + 1, p, v, seed=1000 + k), p, v) != INFINITY:
            bad_top.append(k)
    band_ok = 0
    for k in range(100):
        p = rng.choice([2, 3, 5])
        v = rng.randint(1, 3)
        beta = random_lcs_element(v + 1, p, v, seed=5000 + k)
        lon = Word(tuple(rng.choice([1, -1]) * rng.randint(1, v) for _ in range(rng.randint(1, 10))))
        band_ok += band_sum_invariance(lon, beta, p, tuple(rng.sample(range(1, v + 1), v)))
    ok = not bad_level and not bad_top and band_ok == 100
    return ok, (f"{500 - len(bad_level)}/500 level samples, {100 - len(bad_top)}/100 top-level "
                f"samples expand to 1, band sums {band_ok}/100")


def criterion_8():
    orders = tuple(burnside_order(m) for m in (1, 2, 3))
    group = b23_closure()
    cubes = all(b23_pow(g, 3) == IDENTITY for g in group)
    nonab = b23_mul(X, Y) != b23_mul(Y, X)
    ok = orders == (3, 27, 2187) and len(group) == 27 and cubes and nonab
    return ok, f"orders {orders}, closure {len(group)}, exponent 3: {cubes}, non-abelian: {nonab}"


def _frame(n, origin=(0, 0, 0)):
    ox, oy, oz = origin
    return frozenset((ox + i, oy + j, oz) for i in range(n) for j in range(n)
                     if i in (0, n - 1) or j in (0, n - 1))


def criterion_9():
    block = frozenset(itertools.product(range(3), range(3), range(2)))
    ring = _frame(4)
    double = _frame(4) | _frame(4, (6, 0, 0))
    dims, ok = [], True
    for cells, want in ((block, 0), (ring, 1), (double, 2)):
        cx = build_complex(cells)
        zero = (cx.boundary1 @ cx.boundary2).is_zero()
        oracle = len(cx.edges) - gf2_rank(cx.boundary1.dense()) - gf2_rank(cx.boundary2.dense())
        got = h1_basis(cx).dim
        ok &= zero and got == oracle == want
        dims.append(f"{got}/{oracle}")
    return ok, "dims (basis/oracle) " + ", ".join(dims) + "; boundary squared zero"


def _test_pairs():
    hopf = canonical_hopf(0.1)
    t = np.linspace(0, 2 * np.pi, 160, endpoint=False)
    core = np.stack([0.5 + 0.15 * np.cos(t), 0.5 + 0.15 * np.sin(t), 0.5 + 0 * t], 1)
    rad = 0.15 + 0.05 * np.cos(2 * t)
    wrap = np.stack([0.5 + rad * np.cos(t), 0.5 + rad * np.sin(t), 0.5 + 0.05 * np.sin(2 * t)], 1)
    far = (circle_points([0.3, 0.5, 0.5], 2, 0.1, 32), circle_points([0.7, 0.5, 0.5], 1, 0.1, 32))
    b = borromean_rings().components
    big = canonical_hopf(0.2)
    return [
        ("hopf", *(c.vertices for c in hopf.components)),
        ("double wrap", core, wrap),
        ("split", *far),
        ("borromean 1-2", b[0].vertices, b[1].vertices),
        ("diagonal hopf", *(c.vertices for c in big.components)),
    ]


def criterion_10():
    rng = np.random.default_rng(10)
    hopf = canonical_hopf(0.1)
    lk = linking_integer(*hopf.components)
    rotated = [linking_integer(*rigid_transform(hopf, random_rotation(rng), about=[0.5] * 3).components)
               for _ in range(10)]
    pairs = []
    ok = all(r == lk for r in rotated)
    for name, a, b in _test_pairs():
        n, g = linking_integer(a, b), gauss_linking_integral(a, b)
        ok &= n == round(g) and abs(g - n) < 1e-6
        pairs.append(f"{name} {n}/{g:+.6f}")
    return ok, f"rotations {sorted(set(rotated))}; " + ", ".join(pairs)


CRITERIA = {
    1: ("eq1 certificate on Hopf and split pairs", criterion_1),
    2: ("pairwise distinct certificates in a generation-0 packing", criterion_2),
    3: ("decorated-colouring count bound scales by 8", criterion_3),
    4: ("density exponent and multigeneration series", criterion_4),
    5: ("mu-bar golden values", criterion_5),
    6: ("cube divisibility for monic two-variable polynomials", criterion_6),
    7: ("mod-p filtration, top level and band sums", criterion_7),
    8: ("Burnside orders and B(2,3)", criterion_8),
    9: ("H1 dimensions against a dense oracle", criterion_9),
    10: ("linking number under rotation and against the Gauss integral", criterion_10),
}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    title, fn = CRITERIA[n]
    ok, detail = fn()
    with capsys.disabled():
        report(n, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        title, fn = CRITERIA[n]
        ok, detail = fn()
        report(n, title, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
