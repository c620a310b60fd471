import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import gf2_rank
from linkpack.certify import chain_polylines, linking_integer
from linkpack.geometry import PLLink, hopf_pair
from linkpack.grid import Region, color_cells, region_of, tessellate
from linkpack.homology import (
    HomologyError, bits, build_complex, chain_from_edges, coordinates, h1_basis, snap_to_cycle,
)


def block(nx, ny, nz, origin=(0, 0, 0)):
    ox, oy, oz = origin
    return frozenset((ox + i, oy + j, oz + k) for i in range(nx) for j in range(ny) for k in range(nz))


def frame(n=4, origin=(0, 0, 0)):
    """n x n x 1 square ring of cells with the (n-2)^2 middle removed."""
    ox, oy, oz = origin
    return frozenset((ox + i, oy + j, oz) for i in range(n) for j in range(n)
                     if i in (0, n - 1) or j in (0, n - 1))


def oracle_h1(cx) -> int:
    """dim H1 = #edges - rank d1 - rank d2, by dense elimination."""
    d1, d2 = cx.boundary1.dense(), cx.boundary2.dense()
    return len(cx.edges) - gf2_rank(d1) - gf2_rank(d2)


def test_single_cube():
    cx = build_complex(block(1, 1, 1))
    assert (len(cx.vertices), len(cx.edges), len(cx.faces)) == (8, 12, 6)


def test_two_cube_block():
    cx = build_complex(block(2, 1, 1))
    assert (len(cx.vertices), len(cx.edges), len(cx.faces)) == (12, 20, 11)


def test_empty_region():
    with pytest.raises(HomologyError):
        build_complex(frozenset())


@pytest.mark.parametrize("cells, dim", [
    (block(3, 2, 2), 0),
    (frame(4), 1),
    (frame(4) | frame(4, (6, 0, 0)), 2),
    (frame(5) | frame(3, (1, 1, 3)), 2),
])
def test_h1_dimensions(cells, dim):
    cx = build_complex(cells)
    assert (cx.boundary1 @ cx.boundary2).is_zero()
    assert not (cx.boundary1.dense().astype(int) @ cx.boundary2.dense().astype(int) % 2).any()
    basis = h1_basis(cx)
    assert basis.dim == dim == oracle_h1(cx)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2)), min_size=1, max_size=40))
def test_random_regions_match_oracle(cells):
    cx = build_complex(frozenset(cells))
    assert (cx.boundary1 @ cx.boundary2).is_zero()
    assert h1_basis(cx).dim == oracle_h1(cx)


def test_basis_is_deterministic():
    cells = frame(5) | frame(4, (0, 0, 2))
    b1 = h1_basis(build_complex(cells))
    b2 = h1_basis(build_complex(frozenset(sorted(cells, reverse=True))))
    assert b1.cycles == b2.cycles


def test_coordinates_basics():
    cells = frame(4) | frame(4, (6, 0, 0))
    cx = build_complex(cells)
    basis = h1_basis(cx)
    assert coordinates(basis.cycles[0], basis, cx) == (1, 0)
    assert coordinates(basis.cycles[0] ^ basis.cycles[1], basis, cx) == (1, 1)
    assert coordinates(cx.face_boundary(0), basis, cx) == (0, 0)
    with pytest.raises(HomologyError):
        coordinates(1, basis, cx)  # a single edge is not a cycle


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=4, max_size=4))
def test_coordinates_linear(seeds):
    cells = frame(5) | frame(4, (0, 0, 2)) | block(2, 2, 2, (7, 7, 0))
    cx = build_complex(cells)
    basis = h1_basis(cx)
    rng = np.random.default_rng(seeds)

    def random_cycle():
        z = 0
        for i, c in enumerate(basis.cycles):
            if rng.integers(2):
                z ^= c
        for f in rng.choice(len(cx.faces), size=5):
            z ^= cx.face_boundary(int(f))
        return z

    a, b = random_cycle(), random_cycle()
    ca, cb = coordinates(a, basis, cx), coordinates(b, basis, cx)
    assert coordinates(a ^ b, basis, cx) == tuple(x ^ y for x, y in zip(ca, cb))


def test_square_loop_on_grid_lines():
    grid = tessellate(0.4)           # h = 0.1
    h = grid.h
    square = np.array([[2, 2, 2], [4, 2, 2], [4, 4, 2], [2, 4, 2]], float) * h + 1e-13
    cells = frozenset((i, j, k) for i in range(1, 5) for j in range(1, 5) for k in range(1, 3))
    region = Region("r", cells)
    cx = build_complex(region, h)
    z = snap_to_cycle(square, region, cx, grid)
    expected = [((2 + i, 2, 2, 0)) for i in range(2)] + [((4, 2 + j, 2, 1)) for j in range(2)] \
        + [((2 + i, 4, 2, 0)) for i in range(2)] + [((2, 2 + j, 2, 1)) for j in range(2)]
    assert z == chain_from_edges(cx, expected)


def test_tiny_curve_is_trivial():
    grid = tessellate(0.4)
    tri = np.array([[0.41, 0.41, 0.41], [0.43, 0.41, 0.41], [0.41, 0.43, 0.42]])
    region = Region("r", frozenset({(4, 4, 4)}))
    cx = build_complex(region, grid.h)
    assert snap_to_cycle(tri, region, cx, grid) == 0


def test_snapped_circle_keeps_linking():
    link = hopf_pair((0.5, 0.5, 0.5), 0.2).with_constraint("r", "b", 0.1)
    grid = tessellate(0.1)
    col = color_cells(grid, link)
    red = region_of(col, "r")
    cx = build_complex(red, grid.h)
    z = snap_to_cycle(link.component("r").vertices, red, cx, grid)
    assert cx.is_cycle(z) and z
    loops = chain_polylines(cx, z)
    blue = link.component("b").vertices
    lk = sum(linking_integer(p, blue) for p in loops)
    assert abs(lk) == abs(linking_integer(link.component("r"), link.component("b"))) == 1
    assert coordinates(z, h1_basis(cx), cx) == (1,)


def test_snap_outside_region():
    grid = tessellate(0.4)
    region = Region("r", frozenset({(0, 0, 0)}))
    cx = build_complex(region, grid.h)
    pts = np.array([[0.05, 0.05, 0.05], [0.35, 0.05, 0.05], [0.05, 0.35, 0.05]])
    with pytest.raises(HomologyError):
        snap_to_cycle(pts, region, cx, grid)


def test_bits_round_trip():
    assert bits(0b101001) == [0, 3, 5]
