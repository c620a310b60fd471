"""Polygonal curves and links in the unit cube.

Curves are closed polylines stored as ``(n, 3)`` float arrays; the last
vertex connects back to the first.  Links carry pairwise minimum-distance
constraints between labelled components.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CUBE_SLACK = 1e-9       # tolerance for "inside the unit cube"
POINT_BOUND = 0.1       # jitter allowance for stored points
ACCEPT_SLACK = 1e-9     # constraint checks lean towards acceptance


class GeometryError(ValueError):
    pass


class OutsideCubeError(GeometryError):
    pass


def _as_points(points) -> np.ndarray:
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise GeometryError(f"expected an (n, 3) array of points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("non-finite coordinate")
    return pts


def _check_in_cube(pts: np.ndarray, slack: float = CUBE_SLACK) -> None:
    if pts.min() < -slack or pts.max() > 1.0 + slack:
        raise OutsideCubeError(
            f"geometry leaves the unit cube (range {pts.min():.6g} .. {pts.max():.6g})")


@dataclass(frozen=True, eq=False)
class PLCurve:
    """A closed polygonal curve with a component label."""

    vertices: np.ndarray
    label: str

    def __post_init__(self):
        pts = _as_points(self.vertices)
        if len(pts) < 3:
            raise GeometryError(f"curve {self.label!r} needs at least 3 vertices")
        if np.any(np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1) == 0.0):
            raise GeometryError(f"curve {self.label!r} has repeated consecutive vertices")
        if pts.min() < -POINT_BOUND or pts.max() > 1.0 + POINT_BOUND:
            raise GeometryError(f"curve {self.label!r} has points far outside the unit cube")
        pts.setflags(write=False)
        object.__setattr__(self, "vertices", pts)

    @property
    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of every edge, closing edge included."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, PLCurve):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash((self.label, self.vertices.tobytes()))


@dataclass(frozen=True)
class Constraint:
    a: str
    b: str
    min_dist: float


@dataclass(frozen=True)
class PLLink:
    components: tuple[PLCurve, ...]
    constraints: tuple[Constraint, ...] = ()
    name: str = ""

    def __post_init__(self):
        comps = tuple(self.components)
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        labels = [c.label for c in comps]
        if len(set(labels)) != len(labels):
            raise GeometryError(f"duplicate component labels in {labels}")
        for c in cons:
            if c.a not in labels or c.b not in labels:
                raise GeometryError(f"constraint {c} references an unknown label")
            if c.a == c.b:
                raise GeometryError(f"constraint of {c.a!r} with itself")
            if not c.min_dist > 0:
                raise GeometryError(f"constraint {c} needs a positive distance")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "constraints", cons)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.components]

    def component(self, label: str) -> PLCurve:
        for c in self.components:
            if c.label == label:
                return c
        raise KeyError(label)

    def with_constraint(self, a: str, b: str, min_dist: float) -> "PLLink":
        return PLLink(self.components, self.constraints + (Constraint(a, b, min_dist),), self.name)

    def all_points(self) -> np.ndarray:
        return np.vstack([c.vertices for c in self.components])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        pts = self.all_points()
        return pts.min(axis=0), pts.max(axis=0)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "components": [
                {"label": c.label, "points": c.vertices.tolist()} for c in self.components
            ],
            "constraints": [
                {"a": c.a, "b": c.b, "min_dist": c.min_dist} for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PLLink":
        comps = tuple(PLCurve(np.array(c["points"], dtype=float), str(c["label"]))
                      for c in data["components"])
        cons = tuple(Constraint(str(c["a"]), str(c["b"]), float(c["min_dist"]))
                     for c in data.get("constraints", []))
        return cls(comps, cons, str(data.get("name", "")))


def load_link(path) -> PLLink:
    return PLLink.from_json(json.loads(Path(path).read_text()))


def save_link(link: PLLink, path) -> None:
    Path(path).write_text(json.dumps(link.to_json(), indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# distances

def _segment_distance_many(p1, p2, q1, q2):
    """Vectorised closest distance between segments p1p2 and q1q2.

    All arguments broadcast to ``(..., 3)``.  Follows the clamped
    parametric solution for two segments; segments must be non-degenerate.
    """
    d1 = p2 - p1
    d2 = q2 - q1
    r = p1 - q1
    a = np.einsum("...i,...i", d1, d1)
    e = np.einsum("...i,...i", d2, d2)
    b = np.einsum("...i,...i", d1, d2)
    c = np.einsum("...i,...i", d1, r)
    f = np.einsum("...i,...i", d2, r)
    denom = a * e - b * b

    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-14 * a * e, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        # t outside [0, 1]: clamp and recompute s
        s = np.where(t < 0.0, np.clip(-c / a, 0.0, 1.0), np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s))
        t = np.clip(t, 0.0, 1.0)

    c1 = p1 + s[..., None] * d1
    c2 = q1 + t[..., None] * d2
    return np.linalg.norm(c1 - c2, axis=-1)


def segment_distance(p1, p2, q1, q2) -> float:
    """Minimum Euclidean distance between closed segments p1p2 and q1q2."""
    p1, p2, q1, q2 = (np.asarray(x, dtype=float) for x in (p1, p2, q1, q2))
    if np.array_equal(p1, p2) or np.array_equal(q1, q2):
        raise GeometryError("degenerate (zero-length) segment")
    return float(_segment_distance_many(p1, p2, q1, q2))


def curve_distance(a: PLCurve, b: PLCurve, return_witness: bool = False):
    """Minimum distance between two closed polygonal curves (all segment pairs)."""
    pa, pa2 = a.segments
    qb, qb2 = b.segments
    dist = _segment_distance_many(pa[:, None, :], pa2[:, None, :], qb[None, :, :], qb2[None, :, :])
    idx = np.unravel_index(np.argmin(dist), dist.shape)
    if return_witness:
        return float(dist[idx]), (int(idx[0]), int(idx[1]))
    return float(dist[idx])


def link_min_distances(link: PLLink) -> list[tuple[str, str, float]]:
    """Minimum distance for every declared constraint of ``link``."""
    return [(c.a, c.b, curve_distance(link.component(c.a), link.component(c.b)))
            for c in link.constraints]


def constraint_report(link: PLLink) -> list[tuple[Constraint, float, bool]]:
    out = []
    for c in link.constraints:
        d = curve_distance(link.component(c.a), link.component(c.b))
        out.append((c, d, d >= c.min_dist - ACCEPT_SLACK))
    return out


def satisfies_constraints(link: PLLink) -> bool:
    return all(ok for _, _, ok in constraint_report(link))


# ---------------------------------------------------------------------------
# construction

def circle_points(center, normal_axis: int, rho: float, n: int, phase: float = 0.0) -> np.ndarray:
    """Regular n-gon inscribed in a circle in the coordinate plane normal to ``normal_axis``."""
    u, v = [ax for ax in range(3) if ax != normal_axis]
    t = phase + 2 * np.pi * np.arange(n) / n
    pts = np.tile(np.asarray(center, dtype=float), (n, 1))
    pts[:, u] += rho * np.cos(t)
    pts[:, v] += rho * np.sin(t)
    return pts


def hopf_pair(center, rho: float, segments_per_circle: int = 48,
              labels: tuple[str, str] = ("r", "b")) -> PLLink:
    """Two orthogonal circles of radius ``rho``, each through the other's centre.

    The red circle lies in the xy-plane centred at ``center - (rho/2, 0, 0)``,
    the blue one in the xz-plane centred at ``center + (rho/2, 0, 0)``.  For
    round circles every point of one lies at distance exactly ``rho`` from
    the other; the polygons lose a little of that.
    """
    if rho <= 0:
        raise GeometryError("rho must be positive")
    if segments_per_circle < 12:
        raise GeometryError("need at least 12 segments per circle")
    c = np.asarray(center, dtype=float)
    shift = np.array([rho / 2, 0.0, 0.0])
    red = circle_points(c - shift, 2, rho, segments_per_circle)
    blue = circle_points(c + shift, 1, rho, segments_per_circle)
    _check_in_cube(np.vstack([red, blue]))
    return PLLink((PLCurve(red, labels[0]), PLCurve(blue, labels[1])), (), "hopf")


def rigid_transform(link: PLLink, rotation=None, translation=None, about=None) -> PLLink:
    """Apply ``x -> R (x - about) + about + t`` to every vertex.

    ``about`` defaults to the origin.  The result must stay in the cube.
    """
    R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    if R.shape != (3, 3) or not np.allclose(R @ R.T, np.eye(3), atol=1e-9) or np.linalg.det(R) < 0:
        raise GeometryError("rotation must be a proper 3x3 orthogonal matrix")
    t = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
    o = np.zeros(3) if about is None else np.asarray(about, dtype=float)
    comps = []
    for c in link.components:
        pts = (c.vertices - o) @ R.T + o + t
        comps.append(pts)
    _check_in_cube(np.vstack(comps))
    return PLLink(tuple(PLCurve(p, c.label) for p, c in zip(comps, link.components)),
                  link.constraints, link.name)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about ``axis`` by ``angle`` radians."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# long axis of the Hopf pair along the body diagonal; fits rho up to ~0.45
_DIAGONAL_FRAME = np.array([
    [1, 1, 1] / np.sqrt(3),
    [1, -1, 0] / np.sqrt(2),
    [1, 1, -2] / np.sqrt(6),
]).T


def canonical_hopf(epsilon: float, segments_per_circle: int = 48, center=None) -> PLLink:
    """Hopf pair of radius 2*epsilon carrying the (r, b, epsilon) constraint.

    Axis-aligned when it fits; otherwise turned so the long axis follows the
    cube diagonal and re-centred on its bounding box.
    """
    rho = 2.0 * epsilon
    c = np.full(3, 0.5) if center is None else np.asarray(center, dtype=float)
    try:
        link = hopf_pair(c, rho, segments_per_circle)
    except OutsideCubeError:
        red = circle_points(-np.array([rho / 2, 0, 0]), 2, rho, segments_per_circle) @ _DIAGONAL_FRAME.T
        blue = circle_points(np.array([rho / 2, 0, 0]), 1, rho, segments_per_circle) @ _DIAGONAL_FRAME.T
        pts = np.vstack([red, blue])
        mid = (pts.min(axis=0) + pts.max(axis=0)) / 2
        red, blue = red - mid + c, blue - mid + c
        _check_in_cube(np.vstack([red, blue]))
        link = PLLink((PLCurve(red, "r"), PLCurve(blue, "b")), (), "hopf")
    return link.with_constraint("r", "b", epsilon)


def split_pair(epsilon: float, rho: float | None = None, segments_per_circle: int = 48) -> PLLink:
    """Two unlinked coplanar circles side by side, ``(r, b, epsilon)`` constrained."""
    if rho is None:
        rho = min(2.0 * epsilon, 0.24 - epsilon / 4)
    gap = max(epsilon, rho / 2)
    off = rho + gap / 2
    red = circle_points((0.5 - off, 0.5, 0.5), 2, rho, segments_per_circle)
    blue = circle_points((0.5 + off, 0.5, 0.5), 2, rho, segments_per_circle)
    _check_in_cube(np.vstack([red, blue]))
    return PLLink((PLCurve(red, "r"), PLCurve(blue, "b")), (), "split").with_constraint("r", "b", epsilon)


def borromean_rings(rho: float = 0.2, height: float = 0.05, segments_per_circle: int = 48) -> PLLink:
    """Three circles of radius ``rho`` on an equilateral triangle of side ``rho``.

    Seen from above they form the 6-crossing Borromean diagram; circle i
    rises to pass over circle i+1 and dips under circle i-1, with height
    ``0.5 + height * cos 3(theta - theta_next + 60deg)``.
    """
    ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    r_tri = rho / np.sqrt(3)
    centers = np.stack([0.5 + r_tri * np.cos(ang), 0.5 + r_tri * np.sin(ang), np.full(3, 0.5)], axis=1)
    comps = []
    for i in range(3):
        # distinct phases keep crossings off polygon vertices
        t = 2 * np.pi * (np.arange(segments_per_circle) + 0.13 + 0.31 * i) / segments_per_circle
        c = centers[i]
        to_next = centers[(i + 1) % 3] - c
        th_next = np.arctan2(to_next[1], to_next[0])
        pts = np.stack([c[0] + rho * np.cos(t), c[1] + rho * np.sin(t),
                        0.5 + height * np.cos(3 * (t - th_next + np.pi / 3))], axis=1)
        comps.append(PLCurve(pts, str(i + 1)))
    _check_in_cube(np.vstack([c.vertices for c in comps]))
    return PLLink(tuple(comps), (), "borromean")
