"""Linking numbers and decorated-colouring certificates for Hopf pairs.

A certificate records the red/blue cell sets of one two-component link,
the Z/2 homology coordinates of each curve in its own colour region, and
the mod-2 linking matrix between the two canonical H_1 bases.  The
bilinear form ``x^T L y`` then recovers the mod-2 linking number.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .geometry import PLCurve, PLLink, rotation_matrix
from .grid import Grid, color_cells, region_of, regions_touch, tessellate
from .homology import (CubicalComplex, H1Basis, build_complex, chain_loops, coordinates,
                       h1_basis, snap_to_cycle)

JITTER = 1e-5          # grid-cycle perturbation, in units of the cell side
_PARAM_TOL = 1e-9
_HEIGHT_TOL = 1e-12
_RETRIES = 10


class LinkingError(ValueError):
    pass


class CertificateError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


# ---------------------------------------------------------------------------
# linking numbers

def _projection(attempt: int) -> np.ndarray:
    """Fixed sequence of generic rotations; attempt 0 is the default view."""
    golden = (1 + 5 ** 0.5) / 2
    axis = (1.0, golden + 0.1 * attempt, math.sqrt(2) + 0.37 * attempt)
    return rotation_matrix(axis, 0.7390851332 + 0.9 * attempt)


def _points(c) -> np.ndarray:
    return c.vertices if isinstance(c, PLCurve) else np.asarray(c, dtype=float)


def _cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


@dataclass(frozen=True)
class ProjectedCrossings:
    """Crossings of polyline A with polyline B in one projection.

    ``ia``/``ib`` are segment indices, ``t``/``u`` the parameters along them,
    ``a_over`` whether A is on top, ``sign`` the crossing sign.
    """

    ia: np.ndarray
    ib: np.ndarray
    t: np.ndarray
    u: np.ndarray
    a_over: np.ndarray
    sign: np.ndarray


def projected_crossings(A: np.ndarray, B: np.ndarray, R: np.ndarray,
                        same_curve: bool = False) -> ProjectedCrossings | None:
    """All transverse crossings in the view ``R``; None when the view is degenerate.

    With ``same_curve`` the self-crossings of A are found (B is ignored and
    adjacent segments are skipped).
    """
    if same_curve:
        B = A
    PA = A @ R.T
    PB = B @ R.T
    a0, a1 = PA, np.roll(PA, -1, axis=0)
    b0, b1 = PB, np.roll(PB, -1, axis=0)
    r = (a1 - a0)[:, None, :2]
    s = (b1 - b0)[None, :, :2]
    qp = b0[None, :, :2] - a0[:, None, :2]
    denom = _cross2(r, s)
    scale = np.linalg.norm(r, axis=-1) * np.linalg.norm(s, axis=-1)
    parallel = np.abs(denom) <= 1e-12 * scale
    skip = np.zeros(denom.shape, dtype=bool)
    if same_curve:
        n = len(A)
        i = np.arange(n)
        skip[i, i] = True
        skip[i, (i + 1) % n] = True
        skip[(i + 1) % n, i] = True
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(parallel, np.nan, _cross2(qp, s) / denom)
        u = np.where(parallel, np.nan, _cross2(qp, r) / denom)
    if np.any(parallel & ~skip):
        # collinear overlap in projection is degenerate
        off = np.abs(_cross2(qp, np.broadcast_to(r, qp.shape))) / np.maximum(np.linalg.norm(r, axis=-1), 1e-300)
        if np.any(parallel & ~skip & (off < 1e-12)):
            return None
    inside_t = (t > -_PARAM_TOL) & (t < 1 + _PARAM_TOL)
    inside_u = (u > -_PARAM_TOL) & (u < 1 + _PARAM_TOL)
    near_end = ((np.abs(t) <= _PARAM_TOL) | (np.abs(t - 1) <= _PARAM_TOL) |
                (np.abs(u) <= _PARAM_TOL) | (np.abs(u - 1) <= _PARAM_TOL))
    if np.any(inside_t & inside_u & near_end & ~skip):
        return None
    hit = (t > 0) & (t < 1) & (u > 0) & (u < 1) & ~skip
    if same_curve:
        hit &= np.triu(np.ones(hit.shape, dtype=bool), 1)
    ia, ib = np.nonzero(hit)
    th, uh = t[ia, ib], u[ia, ib]
    za = a0[ia, 2] + th * (a1[ia, 2] - a0[ia, 2])
    zb = b0[ib, 2] + uh * (b1[ib, 2] - b0[ib, 2])
    if np.any(np.abs(za - zb) <= _HEIGHT_TOL):
        raise LinkingError("curves meet (or nearly meet) at a crossing")
    a_over = za > zb
    # sign(over x under): a's direction crossed with b's, flipped when b is on top
    sign = np.sign(denom[ia, ib]).astype(int)
    sign = np.where(a_over, sign, -sign)
    return ProjectedCrossings(ia, ib, th, uh, a_over, sign)


def _signed_overcrossings(A: np.ndarray, B: np.ndarray, R: np.ndarray) -> int | None:
    """Sum of signs of crossings with A over B, or None if the view is degenerate."""
    pc = projected_crossings(A, B, R)
    if pc is None:
        return None
    return int(np.sum(pc.sign[pc.a_over]))


def linking_integer(a, b) -> int:
    """Linking number of two disjoint closed polylines.

    Counts signed crossings where ``a`` passes over ``b`` in a generic
    projection; a crossing is positive when the over strand turns
    counter-clockwise onto the under strand.
    """
    A, B = _points(a), _points(b)
    for attempt in range(_RETRIES):
        val = _signed_overcrossings(A, B, _projection(attempt))
        if val is not None:
            return val
    raise LinkingError(f"no generic projection found after {_RETRIES} attempts")


def linking_mod2(a, b) -> int:
    return linking_integer(a, b) % 2


def gauss_linking_integral(a, b) -> float:
    """Exact Gauss integral for polygons (solid-angle formula per segment pair).

    Independent of the crossing count; used as a cross-check.
    """
    A, B = _points(a), _points(b)
    A1, B1 = np.roll(A, -1, axis=0), np.roll(B, -1, axis=0)
    total = 0.0
    for i in range(len(B)):
        a_ = A - B[i]
        b_ = A - B1[i]
        c_ = A1 - B1[i]
        d_ = A1 - B[i]
        p = np.einsum("ij,ij->i", a_, np.cross(b_, c_))
        an, bn, cn, dn = (np.linalg.norm(x, axis=1) for x in (a_, b_, c_, d_))
        d1 = an * bn * cn + np.einsum("ij,ij->i", a_, b_) * cn + np.einsum("ij,ij->i", b_, c_) * an \
            + np.einsum("ij,ij->i", c_, a_) * bn
        d2 = an * dn * cn + np.einsum("ij,ij->i", a_, d_) * cn + np.einsum("ij,ij->i", d_, c_) * an \
            + np.einsum("ij,ij->i", c_, a_) * dn
        total += np.sum(np.arctan2(p, d1) + np.arctan2(p, d2))
    return total / (2 * np.pi)


# ---------------------------------------------------------------------------
# grid cycles as polylines

def _jitter(ijk: np.ndarray) -> np.ndarray:
    """Deterministic pseudo-random offsets in [-1, 1)^3 keyed to vertex index."""
    v = ijk.astype(np.uint64)
    with np.errstate(over="ignore"):
        x = (v[:, 0] * np.uint64(0x9E3779B97F4A7C15)) ^ (v[:, 1] * np.uint64(0xBF58476D1CE4E5B9)) \
            ^ (v[:, 2] * np.uint64(0x94D049BB133111EB))
        out = []
        for salt in (0x632BE59BD9B4E019, 0x85EBCA77C2B2AE63, 0xC2B2AE3D27D4EB4F):
            y = x ^ np.uint64(salt)
            y = (y ^ (y >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            y = (y ^ (y >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            y = y ^ (y >> np.uint64(31))
            out.append((y >> np.uint64(11)).astype(np.float64) / float(1 << 53))
    return np.stack(out, axis=1) * 2.0 - 1.0


def loop_polyline(loop, h: float) -> np.ndarray:
    ijk = np.array(loop, dtype=np.int64)
    return ijk * h + JITTER * h * _jitter(ijk)


def chain_polylines(cx: CubicalComplex, chain: int) -> list[np.ndarray]:
    return [loop_polyline(lp, cx.h) for lp in chain_loops(cx, chain)]


# ---------------------------------------------------------------------------
# linking matrix and certificates

@dataclass(frozen=True)
class LinkingMatrix:
    d: int
    e: int
    L: tuple[tuple[int, ...], ...]

    def array(self) -> np.ndarray:
        return np.array(self.L, dtype=np.uint8).reshape(self.d, self.e)

    def form(self, x, y) -> int:
        """``x^T L y`` over Z/2."""
        if len(x) != self.d or len(y) != self.e:
            raise ValueError(f"vector lengths {len(x)}, {len(y)} do not match {self.d}x{self.e}")
        if self.d == 0 or self.e == 0:
            return 0
        return int(np.array(x, dtype=np.int64) @ self.array().astype(np.int64) @ np.array(y, dtype=np.int64)) % 2

    def rows(self) -> list[str]:
        return ["".join(str(b) for b in row) for row in self.L]


def chain_linking_mod2(cx_a: CubicalComplex, chain_a: int, cx_b: CubicalComplex, chain_b: int) -> int:
    total = 0
    for pa in chain_polylines(cx_a, chain_a):
        for pb in chain_polylines(cx_b, chain_b):
            total += linking_integer(pa, pb)
    return total % 2


def linking_matrix(basis_r: H1Basis, basis_b: H1Basis, cx_r: CubicalComplex,
                   cx_b: CubicalComplex) -> LinkingMatrix:
    polys_r = [chain_polylines(cx_r, z) for z in basis_r.cycles]
    polys_b = [chain_polylines(cx_b, z) for z in basis_b.cycles]
    L = []
    for pr in polys_r:
        row = []
        for pb in polys_b:
            row.append(sum(linking_integer(a, b) for a in pr for b in pb) % 2)
        L.append(tuple(row))
    return LinkingMatrix(basis_r.dim, basis_b.dim, tuple(L))


def fingerprint(grid: Grid, red_cells, blue_cells) -> str:
    h = hashlib.sha256()
    h.update(f"grid:{grid.n_side}:{grid.h!r}".encode())
    for tag, cells in (("R", red_cells), ("B", blue_cells)):
        arr = np.array(sorted(cells), dtype=np.int32).reshape(-1, 3)
        h.update(tag.encode())
        h.update(arr.tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class Certificate:
    fingerprint: str
    epsilon: float
    n_side: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    L: LinkingMatrix
    eq1: int

    @property
    def d(self) -> int:
        return len(self.x)

    @property
    def e(self) -> int:
        return len(self.y)

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "epsilon": self.epsilon,
            "n_side": self.n_side,
            "d": self.d,
            "e": self.e,
            "x": "".join(map(str, self.x)),
            "y": "".join(map(str, self.y)),
            "L": self.L.rows(),
            "eq1": self.eq1,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        x = tuple(int(c) for c in data["x"])
        y = tuple(int(c) for c in data["y"])
        L = LinkingMatrix(len(x), len(y), tuple(tuple(int(c) for c in row) for row in data["L"]))
        return cls(data["fingerprint"], float(data["epsilon"]), int(data["n_side"]), x, y, L, int(data["eq1"]))


@dataclass(frozen=True, eq=False)
class CertificateTrace:
    """Intermediate objects of a certificate run, kept for inspection."""

    grid: Grid
    red_region: object
    blue_region: object
    red_complex: CubicalComplex
    blue_complex: CubicalComplex
    red_basis: H1Basis
    blue_basis: H1Basis
    red_cycle: int
    blue_cycle: int


def certificate(link: PLLink, red: str = "r", blue: str = "b", epsilon: float | None = None,
                return_trace: bool = False):
    """Decorated colouring of the (red, blue) pair at scale epsilon."""
    if epsilon is None:
        matches = [c.min_dist for c in link.constraints if {c.a, c.b} == {red, blue}]
        if not matches:
            raise CertificateError("input", ValueError(f"no constraint between {red!r} and {blue!r}"))
        epsilon = min(matches)

    def stage(name, fn, *args):
        try:
            return fn(*args)
        except CertificateError:
            raise
        except Exception as exc:
            raise CertificateError(name, exc) from exc

    grid = stage("tessellate", tessellate, epsilon)
    coloring = stage("color_cells", color_cells, grid, link, [red, blue])
    reg_r = stage("regions", region_of, coloring, red)
    reg_b = stage("regions", region_of, coloring, blue)
    if regions_touch(reg_r, reg_b):
        raise CertificateError("regions", ValueError("red and blue closed regions touch"))
    cx_r = stage("complexes", build_complex, reg_r, grid.h)
    cx_b = stage("complexes", build_complex, reg_b, grid.h)
    basis_r = stage("h1_basis", h1_basis, cx_r)
    basis_b = stage("h1_basis", h1_basis, cx_b)
    z_r = stage("snap_to_cycle", snap_to_cycle, link.component(red).vertices, reg_r, cx_r, grid)
    z_b = stage("snap_to_cycle", snap_to_cycle, link.component(blue).vertices, reg_b, cx_b, grid)
    x = stage("coordinates", coordinates, z_r, basis_r, cx_r)
    y = stage("coordinates", coordinates, z_b, basis_b, cx_b)
    L = stage("linking_matrix", linking_matrix, basis_r, basis_b, cx_r, cx_b)
    cert = Certificate(fingerprint(grid, reg_r.cells, reg_b.cells), float(epsilon), grid.n_side,
                       x, y, L, L.form(x, y))
    if return_trace:
        return cert, CertificateTrace(grid, reg_r, reg_b, cx_r, cx_b, basis_r, basis_b, z_r, z_b)
    return cert


def _same_grid(c1: Certificate, c2: Certificate) -> None:
    if c1.n_side != c2.n_side or c1.epsilon != c2.epsilon:
        raise ValueError(f"certificates come from different grids "
                         f"({c1.n_side} at {c1.epsilon} vs {c2.n_side} at {c2.epsilon})")


def certificates_equal(c1: Certificate, c2: Certificate) -> bool:
    _same_grid(c1, c2)
    return c1.fingerprint == c2.fingerprint and c1.x == c2.x and c1.y == c2.y


def off_diagonal_check(c1: Certificate, c2: Certificate) -> int:
    """``x1^T L y2``: the red curve of one pair against the blue curve of the other.

    Only meaningful when both share colouring (hence regions, bases and L).
    """
    _same_grid(c1, c2)
    if c1.fingerprint != c2.fingerprint:
        raise ValueError("off-diagonal check needs identical colourings")
    if c1.L != c2.L:
        raise ValueError("linking matrices differ for identical colourings (internal error)")
    return c1.L.form(c1.x, c2.y)


@dataclass(frozen=True)
class CountBound:
    cells: int
    dim_cap: int
    log_value: float
    exact: int | None


def grid_edge_count(n_side: int) -> int:
    return 3 * n_side * (n_side + 1) ** 2


def dc_count_bound(epsilon: float | None = None, cells: int | None = None,
                   dim_cap: int | None = None, max_digits: int = 10_000) -> CountBound:
    """Upper bound ``3^cells * 2^dim_cap * 2^dim_cap`` on decorated colourings.

    With only epsilon given, ``cells = ceil(4/eps)^3`` and ``dim_cap`` is the
    number of grid edges (an upper bound for either H_1 dimension).
    """
    if cells is None or dim_cap is None:
        if epsilon is None or epsilon <= 0:
            raise ValueError("need a positive epsilon or explicit cells and dim_cap")
        n = math.ceil(4.0 / epsilon - 1e-9)
        cells = n ** 3 if cells is None else cells
        dim_cap = grid_edge_count(n) if dim_cap is None else dim_cap
    if cells < 1 or dim_cap < 0:
        raise ValueError("cells must be positive and dim_cap non-negative")
    log_value = cells * math.log(3) + 2 * dim_cap * math.log(2)
    exact = None
    if log_value / math.log(10) < max_digits:
        exact = 3 ** cells * 2 ** (2 * dim_cap)
    return CountBound(cells, dim_cap, log_value, exact)
