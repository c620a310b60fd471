"""Z/2 homology of cubical regions.

Chains are Python ints used as bit sets: bit ``i`` of an edge chain is the
``i``-th edge in the complex's sorted edge list.  Edges are keyed
``(i, j, k, axis)`` by their lower endpoint, faces ``(i, j, k, normal)`` by
their lower corner; both orders are lexicographic, which makes every basis
below a function of the cell set alone.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .grid import Grid, Region

_UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class HomologyError(ValueError):
    pass


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


def bits(x: int) -> list[int]:
    out = []
    while x:
        lb = x & -x
        out.append(lb.bit_length() - 1)
        x ^= lb
    return out


def from_indices(idx) -> int:
    x = 0
    for i in idx:
        x ^= 1 << int(i)
    return x


@dataclass(frozen=True)
class Z2Matrix:
    """Sparse bit matrix stored column-wise; ``cols[j]`` is a row bit set."""

    rows: int
    cols: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, len(self.cols)

    def apply(self, chain: int) -> int:
        out = 0
        for j in bits(chain):
            out ^= self.cols[j]
        return out

    def __matmul__(self, other: "Z2Matrix") -> "Z2Matrix":
        if len(self.cols) != other.rows:
            raise HomologyError(f"shape mismatch {self.shape} @ {other.shape}")
        return Z2Matrix(self.rows, tuple(self.apply(c) for c in other.cols))

    def is_zero(self) -> bool:
        return not any(self.cols)

    def rank(self) -> int:
        return len(_echelon(self.cols))

    def dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for j, c in enumerate(self.cols):
            out[bits(c), j] = 1
        return out

    def triplets(self) -> str:
        """Sparse ``row col 1`` text dump, one entry per line."""
        lines = [f"% {self.rows} {len(self.cols)}"]
        for j, c in enumerate(self.cols):
            lines.extend(f"{i} {j} 1" for i in bits(c))
        return "\n".join(lines) + "\n"


def _echelon(vectors) -> dict[int, int]:
    """Pivot table keyed by lowest set bit."""
    piv: dict[int, int] = {}
    for v in vectors:
        while v:
            lo = _low(v)
            p = piv.get(lo)
            if p is None:
                piv[lo] = v
                break
            v ^= p
    return piv


@dataclass(frozen=True, eq=False)
class CubicalComplex:
    vertices: tuple
    edges: tuple
    faces: tuple
    boundary1: Z2Matrix
    boundary2: Z2Matrix
    h: float

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per vertex, sorted ``(edge index, other vertex)`` pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
        vi = self.vertex_index
        for ei, e in enumerate(self.edges):
            a, b = edge_endpoints(e)
            ia, ib = vi[a], vi[b]
            adj[ia].append((ei, ib))
            adj[ib].append((ei, ia))
        return adj

    def edge_between(self, u, v) -> int:
        """Index of the unit edge joining grid vertices u and v."""
        diff = [b - a for a, b in zip(u, v)]
        axis = [i for i, d in enumerate(diff) if d != 0]
        if len(axis) != 1 or abs(diff[axis[0]]) != 1:
            raise HomologyError(f"{u} and {v} are not adjacent grid vertices")
        low = u if diff[axis[0]] > 0 else v
        key = (*low, axis[0])
        try:
            return self.edge_index[key]
        except KeyError:
            raise HomologyError(f"edge {key} is not in the complex") from None

    def face_boundary(self, fi: int) -> int:
        return self.boundary2.cols[fi]

    def is_cycle(self, chain: int) -> bool:
        return self.boundary1.apply(chain) == 0


def edge_endpoints(edge) -> tuple[tuple, tuple]:
    i, j, k, ax = edge
    d = _UNIT[ax]
    return (i, j, k), (i + d[0], j + d[1], k + d[2])


def _cell_vertices(c):
    i, j, k = c
    return [(i + a, j + b, k + d) for a in (0, 1) for b in (0, 1) for d in (0, 1)]


def _cell_edges(c):
    i, j, k = c
    out = []
    for ax in range(3):
        others = [o for o in range(3) if o != ax]
        for s in (0, 1):
            for t in (0, 1):
                low = [i, j, k]
                low[others[0]] += s
                low[others[1]] += t
                out.append((*low, ax))
    return out


def _cell_faces(c):
    i, j, k = c
    out = []
    for ax in range(3):
        for s in (0, 1):
            low = [i, j, k]
            low[ax] += s
            out.append((*low, ax))
    return out


def _face_edges(face):
    i, j, k, n = face
    u, v = [a for a in range(3) if a != n]
    base = (i, j, k)
    plus_u = tuple(b + (1 if a == u else 0) for a, b in enumerate(base))
    plus_v = tuple(b + (1 if a == v else 0) for a, b in enumerate(base))
    return [(*base, u), (*plus_v, u), (*base, v), (*plus_u, v)]


def build_complex(region: Region | frozenset | set, h: float = 1.0) -> CubicalComplex:
    """Vertices, edges and squares of every cell in the region, with boundaries."""
    cells = region.cells if isinstance(region, Region) else region
    if not cells:
        raise HomologyError("cannot build a complex from an empty region")
    verts, edges, faces = set(), set(), set()
    for c in cells:
        verts.update(_cell_vertices(c))
        edges.update(_cell_edges(c))
        faces.update(_cell_faces(c))
    verts, edges, faces = sorted(verts), sorted(edges), sorted(faces)
    vi = {v: i for i, v in enumerate(verts)}
    ei = {e: i for i, e in enumerate(edges)}
    d1 = []
    for e in edges:
        a, b = edge_endpoints(e)
        d1.append((1 << vi[a]) ^ (1 << vi[b]))
    d2 = [from_indices(ei[e] for e in _face_edges(f)) for f in faces]
    cx = CubicalComplex(tuple(verts), tuple(edges), tuple(faces),
                        Z2Matrix(len(verts), tuple(d1)), Z2Matrix(len(edges), tuple(d2)), h)
    if not (cx.boundary1 @ cx.boundary2).is_zero():
        raise HomologyError("boundary of boundary is not zero")
    return cx


@dataclass(frozen=True)
class H1Basis:
    """Cycle representatives of a basis of H_1 plus the reduction tables."""

    cycles: tuple[int, ...]
    dim: int
    nullity: int
    boundary_rank: int
    _pivots: dict = field(repr=False, compare=False)   # low bit -> (vector, tag)

    def reduce(self, chain: int) -> tuple[int, int]:
        """Reduce modulo boundaries and basis classes; return (residual, tag)."""
        tag = 0
        piv = self._pivots
        v = chain
        while v:
            lo = _low(v)
            hit = piv.get(lo)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag


def spanning_forest_cycles(cx: CubicalComplex) -> list[int]:
    """Fundamental cycles of a BFS spanning forest, ordered by non-tree edge."""
    n = len(cx.vertices)
    adj = cx.adjacency
    parent_edge = [-1] * n
    parent = [-1] * n
    seen = [False] * n
    tree = set()
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for ei, w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    parent_edge[w] = ei
                    tree.add(ei)
                    queue.append(w)

    path_cache: dict[int, int] = {}

    def root_path(v: int) -> int:
        chain = 0
        trail = []
        while v != -1 and v not in path_cache:
            trail.append(v)
            v = parent[v]
        chain = path_cache.get(v, 0) if v != -1 else 0
        for u in reversed(trail):
            chain ^= (1 << parent_edge[u]) if parent_edge[u] >= 0 else 0
            path_cache[u] = chain
        return chain

    vi = cx.vertex_index
    cycles = []
    for ei, e in enumerate(cx.edges):
        if ei in tree:
            continue
        a, b = edge_endpoints(e)
        cycles.append((1 << ei) ^ root_path(vi[a]) ^ root_path(vi[b]))
    return cycles


def h1_basis(cx: CubicalComplex) -> H1Basis:
    """Canonical basis of H_1(complex; Z/2).

    Boundaries are echelonised first; fundamental cycles are then taken in
    edge order and kept whenever independent of everything kept so far.
    """
    piv: dict[int, tuple[int, int]] = {lo: (v, 0) for lo, v in _echelon(cx.boundary2.cols).items()}
    rank2 = len(piv)
    fundamentals = spanning_forest_cycles(cx)
    chosen = []
    for z in fundamentals:
        v, tag = z, 0
        while v:
            lo = _low(v)
            hit = piv.get(lo)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        if v:
            tag ^= 1 << len(chosen)
            piv[_low(v)] = (v, tag)
            chosen.append(z)
    dim = len(chosen)
    if dim != len(fundamentals) - rank2:
        raise HomologyError(f"basis size {dim} != nullity {len(fundamentals)} - rank {rank2}")
    return H1Basis(tuple(chosen), dim, len(fundamentals), rank2, piv)


def coordinates(cycle: int, basis: H1Basis, cx: CubicalComplex) -> tuple[int, ...]:
    """Coordinates of the homology class of ``cycle`` in ``basis``."""
    if not cx.is_cycle(cycle):
        raise HomologyError("chain has nonzero boundary")
    residual, tag = basis.reduce(cycle)
    if residual:
        raise HomologyError("cycle not in the span of boundaries and basis (internal error)")
    return tuple((tag >> p) & 1 for p in range(basis.dim))


def chain_from_edges(cx: CubicalComplex, edges) -> int:
    return from_indices(cx.edge_index[tuple(e)] for e in edges)


# ---------------------------------------------------------------------------
# realising curves on the grid

def _crossing_params(p, q, h):
    """Sorted parameters in (0, 1) where segment pq crosses grid planes."""
    ts = [0.0, 1.0]
    d = q - p
    for ax in range(3):
        if d[ax] == 0:
            continue
        a, b = sorted((p[ax] / h, q[ax] / h))
        for m in range(int(np.ceil(a)), int(np.floor(b)) + 1):
            t = (m * h - p[ax]) / d[ax]
            if 0.0 < t < 1.0:
                ts.append(t)
    return sorted(set(ts))


def _cell_corners(c):
    return set(_cell_vertices(c))


def _manhattan_edges(cx: CubicalComplex, u, v) -> int:
    """Edge chain of the monotone path u -> v through one cube (x, then y, then z)."""
    chain = 0
    cur = list(u)
    for ax in range(3):
        while cur[ax] != v[ax]:
            nxt = list(cur)
            nxt[ax] += 1 if v[ax] > cur[ax] else -1
            chain ^= 1 << cx.edge_between(tuple(cur), tuple(nxt))
            cur = nxt
    return chain


def snap_to_cycle(vertices, region: Region, cx: CubicalComplex, grid: Grid) -> int:
    """Edge cycle in the region homotopic to the closed polyline ``vertices``.

    The curve is cut where it crosses grid planes so each piece lies in one
    closed cell.  Each cut point is replaced by a grid corner shared by the
    two cells on either side of it (the nearest such corner), and each piece
    by a monotone path along the edges of its own cell.
    """
    pts = np.asarray(vertices, dtype=float)
    h = grid.h
    nxt = np.roll(pts, -1, axis=0)
    # [cell, point where the piece ends, polygon vertices met inside it]
    pieces: list[list] = []
    for p, q in zip(pts, nxt):
        ts = _crossing_params(p, q, h)
        first = True
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if t1 - t0 < 1e-12:
                continue
            mid = p + (t0 + t1) / 2 * (q - p)
            cell = grid.cell_of(mid)
            end = p + t1 * (q - p)
            via = [p] if first else []
            first = False
            if pieces and pieces[-1][0] == cell:
                pieces[-1][1] = end
                pieces[-1][2] += via
            else:
                pieces.append([cell, end, via])
    if len(pieces) > 1 and pieces[0][0] == pieces[-1][0]:
        last = pieces.pop()  # the last piece runs on into the first
        pieces[0][2] = last[2] + pieces[0][2]
    for cell, _, _ in pieces:
        if cell not in region.cells:
            raise HomologyError(f"curve meets cell {cell} outside the region")
    if len(pieces) <= 1:
        return 0

    def nearest(candidates, x):
        return min(candidates, key=lambda v: (float(np.sum((np.array(v) * h - x) ** 2)), v))

    # corner replacing the transition point between piece k and piece k+1
    corners = []
    for k, (cell, end, _) in enumerate(pieces):
        other = pieces[(k + 1) % len(pieces)][0]
        common = _cell_corners(cell) & _cell_corners(other)
        if not common:
            raise HomologyError(f"consecutive cells {cell} and {other} do not touch")
        corners.append(nearest(common, end))
    chain = 0
    for k, (cell, _, via) in enumerate(pieces):
        # route through the cell corners nearest the polygon vertices met on the way,
        # so curves running along grid lines snap onto exactly those lines
        stops = [corners[k - 1]] + [nearest(_cell_corners(cell), x) for x in via] + [corners[k]]
        for u, v in zip(stops[:-1], stops[1:]):
            chain ^= _manhattan_edges(cx, u, v)
    if not cx.is_cycle(chain):
        raise HomologyError("snapped chain is not a cycle (internal error)")
    return chain


def chain_loops(cx: CubicalComplex, chain: int) -> list[list[tuple]]:
    """Split a cycle into closed vertex trails (deterministic greedy walk)."""
    remaining: dict[int, list[tuple[int, int]]] = {}
    vi = cx.vertex_index
    for ei in bits(chain):
        a, b = edge_endpoints(cx.edges[ei])
        ia, ib = vi[a], vi[b]
        remaining.setdefault(ia, []).append((ei, ib))
        remaining.setdefault(ib, []).append((ei, ia))
    for lst in remaining.values():
        lst.sort(reverse=True)
    used: set[int] = set()
    loops = []
    for start in sorted(remaining):
        while True:
            # next unused edge at start
            while remaining[start] and remaining[start][-1][0] in used:
                remaining[start].pop()
            if not remaining[start]:
                break
            trail = [start]
            cur = start
            while True:
                lst = remaining[cur]
                while lst and lst[-1][0] in used:
                    lst.pop()
                if not lst:
                    raise HomologyError("chain is not a cycle")
                ei, w = lst.pop()
                used.add(ei)
                cur = w
                if cur == start:
                    break
                trail.append(cur)
            loops.append([cx.vertices[i] for i in trail])
    return loops
