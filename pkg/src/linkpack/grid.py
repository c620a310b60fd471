"""Cubical tessellation of the unit cube and curve-incidence colouring."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import PLLink

WHITE = "white"
DEFAULT_MAX_CELLS = 10**8
MAX_CELLS_ENV = "LINKPACK_MAX_CELLS"
_TOUCH = 1e-12


class GridError(ValueError):
    pass


class ResourceError(GridError):
    pass


class ConstraintViolation(GridError):
    """Two mutually constrained curves meet a common closed cell."""


def max_cells() -> int:
    return int(float(os.environ.get(MAX_CELLS_ENV, DEFAULT_MAX_CELLS)))


@dataclass(frozen=True)
class Grid:
    h: float
    n_side: int
    epsilon: float

    @property
    def cell_count(self) -> int:
        return self.n_side ** 3

    @property
    def cell_diameter(self) -> float:
        return self.h * math.sqrt(3)

    def cell_of(self, point) -> tuple[int, int, int]:
        idx = np.clip(np.floor(np.asarray(point, dtype=float) / self.h).astype(int), 0, self.n_side - 1)
        return tuple(int(i) for i in idx)

    def in_bounds(self, cell) -> bool:
        return all(0 <= c < self.n_side for c in cell)


def tessellate(epsilon: float) -> Grid:
    """Grid of side ``epsilon / 4``; cell diameter is under half of epsilon."""
    if not 0 < epsilon <= 0.5:
        raise GridError(f"epsilon must lie in (0, 0.5], got {epsilon}")
    n_side = math.ceil(4.0 / epsilon - 1e-9)
    if n_side ** 3 > max_cells():
        raise ResourceError(
            f"{n_side**3} cells exceeds the cap of {max_cells()} (set {MAX_CELLS_ENV} to raise it)")
    return Grid(h=epsilon / 4.0, n_side=n_side, epsilon=epsilon)


def segment_cells(grid: Grid, p, q) -> list[tuple[int, int, int]]:
    """Closed grid cells met by the closed segment pq (slab test per cell)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    h, n = grid.h, grid.n_side
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    i0 = np.clip(np.floor((lo - _TOUCH) / h).astype(int), 0, n - 1)
    i1 = np.clip(np.floor((hi + _TOUCH) / h).astype(int), 0, n - 1)
    rng = [np.arange(a, b + 1) for a, b in zip(i0, i1)]
    cells = np.stack(np.meshgrid(*rng, indexing="ij"), axis=-1).reshape(-1, 3)
    box_lo = cells * h - _TOUCH
    box_hi = (cells + 1) * h + _TOUCH
    d = q - p
    tmin = np.zeros(len(cells))
    tmax = np.ones(len(cells))
    keep = np.ones(len(cells), dtype=bool)
    for ax in range(3):
        if d[ax] == 0.0:
            keep &= (p[ax] >= box_lo[:, ax]) & (p[ax] <= box_hi[:, ax])
        else:
            t1 = (box_lo[:, ax] - p[ax]) / d[ax]
            t2 = (box_hi[:, ax] - p[ax]) / d[ax]
            tmin = np.maximum(tmin, np.minimum(t1, t2))
            tmax = np.minimum(tmax, np.maximum(t1, t2))
    keep &= tmin <= tmax
    return [tuple(int(x) for x in c) for c in cells[keep]]


def curve_cells(grid: Grid, vertices) -> set[tuple[int, int, int]]:
    pts = np.asarray(vertices, dtype=float)
    nxt = np.roll(pts, -1, axis=0)
    out: set[tuple[int, int, int]] = set()
    for p, q in zip(pts, nxt):
        out.update(segment_cells(grid, p, q))
    return out


@dataclass(frozen=True)
class Region:
    color: str
    cells: frozenset

    def __len__(self):
        return len(self.cells)

    @cached_property
    def sorted_cells(self) -> list[tuple[int, int, int]]:
        return sorted(self.cells)


@dataclass(frozen=True)
class Coloring:
    """Cell colours for one grid; cells absent from ``cell_color`` are white."""

    grid: Grid
    palette: tuple[str, ...]
    cell_color: dict

    def color(self, cell) -> str:
        return self.cell_color.get(tuple(cell), WHITE)

    def colored_cells(self, color: str) -> frozenset:
        return frozenset(c for c, col in self.cell_color.items() if col == color)

    def dense(self) -> np.ndarray:
        """Palette indices as an ``(n, n, n)`` uint8 array (0 = white)."""
        n = self.grid.n_side
        arr = np.zeros((n, n, n), dtype=np.uint8)
        for cell, col in self.cell_color.items():
            arr[cell] = self.palette.index(col)
        return arr

    def to_rle(self) -> dict:
        """Run-length encoding of the C-ordered dense array."""
        flat = self.dense().ravel()
        change = np.flatnonzero(np.diff(flat)) + 1
        starts = np.concatenate([[0], change])
        lengths = np.diff(np.concatenate([starts, [len(flat)]]))
        runs = [[int(flat[s]), int(l)] for s, l in zip(starts, lengths)]
        n = self.grid.n_side
        return {"dims": [n, n, n], "h": self.grid.h, "epsilon": self.grid.epsilon,
                "palette": list(self.palette), "runs": runs}

    @classmethod
    def from_rle(cls, data: dict) -> "Coloring":
        n = data["dims"][0]
        grid = Grid(h=float(data["h"]), n_side=n, epsilon=float(data["epsilon"]))
        flat = np.concatenate([np.full(l, v, dtype=np.uint8) for v, l in data["runs"]])
        arr = flat.reshape(n, n, n)
        palette = tuple(data["palette"])
        cells = {tuple(int(x) for x in c): palette[arr[tuple(c)]] for c in np.argwhere(arr)}
        return cls(grid, palette, cells)


def color_cells(grid: Grid, link: PLLink, labels=None) -> Coloring:
    """Colour each closed cell by the labelled curve it meets.

    A cell met by two curves that share a constraint raises
    ``ConstraintViolation``; curves without a mutual constraint may share
    cells, and the earlier label in ``labels`` wins there.
    """
    labels = list(link.labels if labels is None else labels)
    constrained = {frozenset((c.a, c.b)) for c in link.constraints}
    cell_color: dict = {}
    for lab in labels:
        for cell in sorted(curve_cells(grid, link.component(lab).vertices)):
            prev = cell_color.get(cell)
            if prev is None:
                cell_color[cell] = lab
            elif prev != lab and frozenset((prev, lab)) in constrained:
                raise ConstraintViolation(
                    f"cell {cell} meets both {prev!r} and {lab!r}: their distance is below "
                    f"{grid.cell_diameter:.4g}")
    return Coloring(grid, (WHITE, *labels), cell_color)


def region_of(coloring: Coloring, color: str) -> Region:
    if color not in coloring.palette:
        raise GridError(f"unknown colour {color!r}; palette is {coloring.palette}")
    if color != WHITE:
        return Region(color, coloring.colored_cells(color))
    n = coloring.grid.n_side
    taken = coloring.cell_color
    white = frozenset((i, j, k) for i in range(n) for j in range(n) for k in range(n)
                      if (i, j, k) not in taken)
    return Region(WHITE, white)


def regions_touch(a: Region, b: Region) -> bool:
    """True when some closed cell of ``a`` shares a point with a closed cell of ``b``."""
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    offsets = [(di, dj, dk) for di in (-1, 0, 1) for dj in (-1, 0, 1) for dk in (-1, 0, 1)]
    for i, j, k in small.cells:
        for di, dj, dk in offsets:
            if (i + di, j + dj, k + dk) in big.cells:
                return True
    return False
