"""Deterministic key-ring packings of rigid Hopf pairs and density fits.

Generation i uses Hopf pairs built from circles of radius ``2 r_i`` with
``r_0 = eps`` and ``r_{i+1} = 2 r_i + eps``, placed on a centred cubic
lattice of pitch ``8 r_i``.  Every pair carries the ``(r, b, eps)``
constraint; nothing constrains distinct pairs.
"""

from __future__ import annotations

import json
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .geometry import PLLink, curve_distance, hopf_pair

SEGMENTS = 48
BOX_SLACK = 1e-12


class PackingError(ValueError):
    pass


def pair_extent(r: float) -> np.ndarray:
    """Bounding-box widths of an axis-aligned Hopf pair of circle radius ``2r``."""
    rho = 2.0 * r
    return np.array([3 * rho, 2 * rho, 2 * rho])


def lattice_counts(r: float) -> tuple[int, int, int]:
    """Pairs per axis when pairs of scale ``r`` sit at pitch ``8r`` inside [0, 1]."""
    pitch = 8.0 * r
    out = []
    for w in pair_extent(r):
        out.append(0 if w > 1.0 else int(math.floor((1.0 - w) / pitch + 1e-9)) + 1)
    return tuple(out)


def nominal_count(epsilon: float) -> int:
    """The naive estimate ``floor(1 / 8 eps)^3``, ignoring how pairs sit at the walls."""
    return int(math.floor(1.0 / (8.0 * epsilon) + 1e-9)) ** 3


def radii(epsilon: float, max_gen: int | None = None) -> list[float]:
    """Scales r_0 = eps, r_{i+1} = 2 r_i + eps for as long as a pair still fits."""
    out = []
    r = epsilon
    while min(lattice_counts(r)) > 0 and (max_gen is None or len(out) < max_gen):
        out.append(r)
        r = 2.0 * r + epsilon
    return out


@dataclass
class Generation:
    index: int
    radius: float
    pitch: float
    links: list[PLLink] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.links)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "radius": self.radius,
            "pitch": self.pitch,
            "count": self.count,
            "links": [l.to_json() for l in self.links],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Generation":
        return cls(int(data["index"]), float(data["radius"]), float(data["pitch"]),
                   [PLLink.from_json(l) for l in data["links"]])


@dataclass
class Packing:
    epsilon: float
    generations: list[Generation]

    @property
    def total_count(self) -> int:
        return sum(g.count for g in self.generations)

    @property
    def counts(self) -> list[int]:
        return [g.count for g in self.generations]

    def links(self):
        for g in self.generations:
            for i, l in enumerate(g.links):
                yield g.index, i, l

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "total_count": self.total_count,
            "generations": [g.to_json() for g in self.generations],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Packing":
        p = cls(float(data["epsilon"]), [Generation.from_json(g) for g in data["generations"]])
        if "total_count" in data and int(data["total_count"]) != p.total_count:
            raise PackingError("total_count disagrees with the listed links")
        return p


def save_packing(packing: Packing, path) -> None:
    Path(path).write_text(json.dumps(packing.to_json(), sort_keys=True) + "\n")


def load_packing(path) -> Packing:
    return Packing.from_json(json.loads(Path(path).read_text()))


def _generation(index: int, r: float, epsilon: float, segments: int) -> Generation:
    pitch = 8.0 * r
    widths = pair_extent(r)
    counts = lattice_counts(r)
    axes = []
    for w, n in zip(widths, counts):
        span = w + (n - 1) * pitch
        lo = (1.0 - span) / 2 + w / 2          # first box centre, lattice centred in the cube
        axes.append(lo + pitch * np.arange(n))
    links = []
    for k, (x, y, z) in enumerate(product(*axes)):
        # hopf_pair centres the box at c in y, z; in x the box is symmetric about c too
        l = hopf_pair((x, y, z), 2.0 * r, segments)
        links.append(PLLink(l.components, (), f"g{index}-{k}").with_constraint("r", "b", epsilon))
    return Generation(index, r, pitch, links)


def generation0(epsilon: float, segments: int = SEGMENTS) -> Generation:
    if not epsilon > 0:
        raise PackingError("epsilon must be positive")
    if min(lattice_counts(epsilon)) == 0:
        raise PackingError(f"no Hopf pair of radius {2 * epsilon:g} fits in the unit cube")
    return _generation(0, epsilon, epsilon, segments)


def multigeneration(epsilon: float, max_gen: int, segments: int = SEGMENTS,
                    check: bool = True) -> Packing:
    if max_gen < 1:
        raise PackingError("max_gen must be at least 1")
    if min(lattice_counts(epsilon)) == 0:
        raise PackingError(f"no Hopf pair of radius {2 * epsilon:g} fits in the unit cube")
    gens = [_generation(i, r, epsilon, segments) for i, r in enumerate(radii(epsilon, max_gen))]
    packing = Packing(epsilon, gens)
    if check:
        rep = verify_packing(packing, epsilon)
        if not rep.passed:
            raise PackingError(f"construction failed verification: {rep.summary()}")
    return packing


# ---------------------------------------------------------------------------
# verification

@dataclass
class PairFailure:
    generation: int
    index: int
    a: str
    b: str
    distance: float
    witness: tuple[int, int]


@dataclass
class VerifyReport:
    epsilon: float
    passed: bool
    pair_count: int
    min_distance: float
    distances: list[tuple[int, int, float]]
    failures: list[PairFailure]
    overlaps: list[tuple[int, int, int]]     # (generation, i, j) with touching boxes
    outside: list[tuple[int, int]]
    seconds: float

    def summary(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "passed": self.passed,
            "pair_count": self.pair_count,
            "min_distance": self.min_distance,
            "failures": [f.__dict__ | {"witness": list(f.witness)} for f in self.failures],
            "overlaps": [list(o) for o in self.overlaps],
            "outside": [list(o) for o in self.outside],
            "seconds": round(self.seconds, 3),
        }


def _box_overlaps(boxes: list[tuple[np.ndarray, np.ndarray]]) -> list[tuple[int, int]]:
    """Pairs of closed boxes that intersect, found through a uniform spatial hash."""
    if len(boxes) < 2:
        return []
    lo = np.array([b[0] for b in boxes])
    hi = np.array([b[1] for b in boxes])
    size = float((hi - lo).max()) or 1.0
    buckets = defaultdict(list)
    for i in range(len(boxes)):
        a = np.floor(lo[i] / size).astype(int)
        b = np.floor(hi[i] / size).astype(int)
        for key in product(*(range(a[d], b[d] + 1) for d in range(3))):
            buckets[key].append(i)
    found = set()
    for members in buckets.values():
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                i, j = members[x], members[y]
                if np.all(lo[i] <= hi[j] + BOX_SLACK) and np.all(lo[j] <= hi[i] + BOX_SLACK):
                    found.add((min(i, j), max(i, j)))
    return sorted(found)


def verify_packing(packing: Packing, epsilon: float | None = None) -> VerifyReport:
    """Check every diagonal constraint and within-generation box disjointness.

    Failures are collected, never raised.
    """
    eps = packing.epsilon if epsilon is None else float(epsilon)
    t0 = time.perf_counter()
    distances, failures, overlaps, outside = [], [], [], []
    min_d = math.inf
    for g in packing.generations:
        boxes = []
        for i, link in enumerate(g.links):
            lo, hi = link.bounding_box()
            boxes.append((lo, hi))
            if lo.min() < -1e-9 or hi.max() > 1 + 1e-9:
                outside.append((g.index, i))
            cons = link.constraints or ()
            for c in cons:
                d, w = curve_distance(link.component(c.a), link.component(c.b), return_witness=True)
                need = max(c.min_dist, eps)
                distances.append((g.index, i, d))
                min_d = min(min_d, d)
                if d < need - 1e-9:
                    failures.append(PairFailure(g.index, i, c.a, c.b, d, w))
            if not cons:
                failures.append(PairFailure(g.index, i, "", "", math.nan, (-1, -1)))
        overlaps += [(g.index, i, j) for i, j in _box_overlaps(boxes)]
    passed = not (failures or overlaps or outside)
    return VerifyReport(eps, passed, len(distances), min_d, distances, failures, overlaps,
                        outside, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# density

@dataclass(frozen=True)
class DensityFit:
    samples: tuple[tuple[float, int], ...]
    exponent: float
    intercept: float
    r2: float

    def to_json(self) -> dict:
        return {"samples": [list(s) for s in self.samples], "exponent": self.exponent,
                "intercept": self.intercept, "r2": self.r2}


def density_fit(epsilons, counts=None) -> DensityFit:
    """Least-squares slope of log n against log(1/eps).

    ``counts`` defaults to generation-0 counts of the lattice construction.
    """
    eps = [float(e) for e in epsilons]
    if len(eps) < 3:
        raise PackingError("need at least 3 epsilon samples")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise PackingError("epsilons must be strictly decreasing")
    if counts is None:
        counts = [generation0(e).count for e in eps]
    counts = [int(c) if float(c).is_integer() else float(c) for c in counts]
    if len(counts) != len(eps) or min(counts) <= 0:
        raise PackingError("need one positive count per epsilon")
    x = np.log(1.0 / np.array(eps))
    y = np.log(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float((resid ** 2).sum()) / ss_tot
    return DensityFit(tuple(zip(eps, counts)), float(slope), float(intercept), r2)
