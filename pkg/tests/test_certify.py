import dataclasses
import math
import time

import numpy as np
import pytest

from linkpack.certify import (
    Certificate, CertificateError, LinkingMatrix, certificate, certificates_equal, dc_count_bound,
    gauss_linking_integral, linking_integer, linking_matrix, linking_mod2, off_diagonal_check,
)
from linkpack.geometry import (
    PLCurve, PLLink, canonical_hopf, circle_points, hopf_pair, random_rotation, rigid_transform,
    split_pair,
)
from linkpack.homology import build_complex, h1_basis


def double_wrap(R=0.15, r=0.05, n=200):
    """A core circle and a curve winding twice around it."""
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    core = np.stack([0.5 + R * np.cos(t), 0.5 + R * np.sin(t), 0.5 + 0 * t], 1)
    rad = R + r * np.cos(2 * t)
    wrap = np.stack([0.5 + rad * np.cos(t), 0.5 + rad * np.sin(t), 0.5 + r * np.sin(2 * t)], 1)
    return core, wrap


def test_hopf_linking():
    link = canonical_hopf(0.1)
    lk = linking_integer(*link.components)
    assert abs(lk) == 1
    assert lk == round(gauss_linking_integral(*link.components))
    assert linking_mod2(*link.components) == 1


def test_unlinked_circles():
    a = circle_points([0.3, 0.5, 0.5], 2, 0.1, 32)
    b = circle_points([0.7, 0.5, 0.5], 1, 0.1, 32)
    assert linking_integer(a, b) == 0
    assert linking_mod2(a, b) == 0


def test_double_wrap_against_gauss():
    core, wrap = double_wrap()
    lk = linking_integer(core, wrap)
    assert abs(lk) == 2
    assert lk == round(gauss_linking_integral(core, wrap))
    assert abs(gauss_linking_integral(core, wrap) - lk) < 1e-6
    assert linking_mod2(core, wrap) == 0


def test_symmetry_and_reflection(rng):
    core, wrap = double_wrap()
    assert linking_integer(core, wrap) == linking_integer(wrap, core)
    flip = np.array([1.0, 1.0, -1.0])
    assert linking_integer(core * flip, wrap * flip) == -linking_integer(core, wrap)


def test_invariant_under_rotations(rng):
    link = canonical_hopf(0.1)
    lk = linking_integer(*link.components)
    for _ in range(10):
        moved = rigid_transform(link, random_rotation(rng), about=[0.5] * 3)
        assert linking_integer(*moved.components) == lk


def test_touching_curves_rejected():
    a = circle_points([0.5, 0.5, 0.5], 2, 0.1, 32)
    with pytest.raises(ValueError):
        linking_integer(a, a.copy())


@pytest.mark.parametrize("eps", [0.1, 0.2])
def test_linking_form_on_hopf_and_split(eps):
    t0 = time.perf_counter()
    c = certificate(canonical_hopf(eps))
    assert (c.d, c.e, c.L.rows(), c.eq1) == (1, 1, ["1"], 1)
    s = certificate(split_pair(eps))
    assert s.eq1 == 0
    assert s.L.rows() == ["0"]
    assert time.perf_counter() - t0 < 30


def test_empty_matrix_for_contractible_regions():
    blk = build_complex(frozenset({(0, 0, 0), (1, 0, 0)}))
    far = build_complex(frozenset({(5, 5, 5)}))
    L = linking_matrix(h1_basis(blk), h1_basis(far), blk, far)
    assert (L.d, L.e, L.L) == (0, 0, ())
    assert L.form((), ()) == 0


def test_translation_changes_fingerprint():
    link = canonical_hopf(0.1)
    moved = rigid_transform(link, translation=[0.05, 0, 0])
    c1, c2 = certificate(link), certificate(moved)
    assert c1.fingerprint != c2.fingerprint
    assert not certificates_equal(c1, c2)
    assert certificates_equal(c1, certificate(link))


def test_same_regions_different_coordinates():
    link = canonical_hopf(0.1)
    red = link.component("r").vertices
    twice = np.vstack([red, red + [0, 0, 1e-9]])     # runs round the red circle twice
    other = PLLink((PLCurve(twice, "r"), link.component("b")), link.constraints)
    c1, c2 = certificate(link), certificate(other)
    assert c1.fingerprint == c2.fingerprint
    assert c2.x == (0,)
    assert not certificates_equal(c1, c2)


def test_off_diagonal():
    c = certificate(canonical_hopf(0.1))
    assert off_diagonal_check(c, c) == 1 == c.eq1
    zero = dataclasses.replace(c, y=(0,) * c.e)
    assert off_diagonal_check(c, zero) == 0
    other = certificate(rigid_transform(canonical_hopf(0.1), translation=[0.05, 0, 0]))
    with pytest.raises(ValueError):
        off_diagonal_check(c, other)


def test_grid_mismatch():
    with pytest.raises(ValueError):
        certificates_equal(certificate(canonical_hopf(0.1)), certificate(canonical_hopf(0.2)))


def test_stage_tagged_errors():
    a = PLCurve(circle_points([0.5, 0.5, 0.5], 2, 0.2, 32), "r")
    b = PLCurve(circle_points([0.5, 0.5, 0.51], 2, 0.2, 32), "b")
    with pytest.raises(CertificateError) as info:
        certificate(PLLink((a, b), [("r", "b", 0.1)]))
    assert info.value.stage == "color_cells"
    with pytest.raises(CertificateError) as info:
        certificate(PLLink((a,)), red="r", blue="b")
    assert info.value.stage == "input"


def test_json_round_trip():
    c = certificate(canonical_hopf(0.1))
    assert Certificate.from_json(c.to_json()) == c
    assert set(c.to_json()) >= {"fingerprint", "d", "e", "x", "y", "L", "eq1"}


def test_count_bound_arithmetic():
    assert dc_count_bound(cells=1, dim_cap=0).exact == 3
    b = dc_count_bound(cells=8, dim_cap=2)
    assert b.exact == 3**8 * 2**2 * 2**2 == 104976
    assert b.log_value == pytest.approx(math.log(104976), rel=1e-12)


@pytest.mark.parametrize("eps", [0.2, 0.1, 0.05, 0.02])
def test_count_bound_scaling(eps):
    ratio = dc_count_bound(eps / 2).log_value / dc_count_bound(eps).log_value
    assert abs(ratio / 8 - 1) < 0.05


def test_certificates_pairwise_distinct_small_packing():
    from linkpack.packing import generation0
    gen = generation0(0.1)
    certs = [certificate(l) for l in gen.links]
    keys = {(c.fingerprint, c.x, c.y) for c in certs}
    assert len(keys) == len(certs)
