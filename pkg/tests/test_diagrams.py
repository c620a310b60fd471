import numpy as np
import pytest

from linkpack import data_path
import linkpack.diagrams as dg
from linkpack.certify import linking_integer
from linkpack.diagrams import (
    DiagramError, PDCode, abelianized_linking, disjoint_union, load_pd, longitude_word, mu_bar,
    pd_from_link, reduce_to_meridians, wirtinger,
)
from linkpack.geometry import borromean_rings, canonical_hopf, circle_points, PLCurve, PLLink
from linkpack.magnus import commutator, expand, meridian

HOPF = load_pd(data_path("hopf.pd"))
BORROMEAN = load_pd(data_path("borromean.pd"))
UNLINK3 = load_pd(data_path("unlink.pd"))
UNKNOT = PDCode.parse("C 1 1")


def test_hopf_presentation():
    pres = wirtinger(HOPF)
    assert pres.n_arcs == 2 and len(pres.relations) == 2
    assert abs(abelianized_linking(HOPF, 1, 2)) == 1
    assert abelianized_linking(HOPF, 1, 2) == abelianized_linking(HOPF, 2, 1)


def test_unknot_presentation():
    pres = wirtinger(UNKNOT)
    assert pres.n_arcs == 1 and len(pres.relations) == 0
    assert len(longitude_word(UNKNOT, 1)) == 0


def test_borromean_presentation():
    pres = wirtinger(BORROMEAN)
    assert pres.n_arcs == 6 and len(pres.relations) == 6
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i != j:
                assert abelianized_linking(BORROMEAN, i, j) == 0


def test_hopf_longitude_abelianizes_to_meridian():
    pres = wirtinger(HOPF)
    lam = reduce_to_meridians(longitude_word(HOPF, 2, pres), pres, 0)
    assert abs(lam.exponent_sums(2)[0]) == 1
    assert lam.exponent_sums(2)[1] == 0
    poly = expand(reduce_to_meridians(longitude_word(HOPF, 2, pres), pres, 6), 2)
    assert abs(poly.coefficient((1,))) == 1


def test_longitudes_have_zero_own_exponent():
    for pd in (HOPF, BORROMEAN, UNLINK3):
        pres = wirtinger(pd)
        for k in pd.components:
            sums = reduce_to_meridians(longitude_word(pd, k, pres), pres, 0).exponent_sums(pd.n_components)
            assert sums[k - 1] == 0


def test_unlink_longitude_expands_to_one():
    pres = wirtinger(UNLINK3)
    assert expand(reduce_to_meridians(longitude_word(UNLINK3, 3, pres), pres, 4), 3).is_one()


def test_borromean_longitude_matches_commutator():
    pres = wirtinger(BORROMEAN)
    poly = expand(reduce_to_meridians(longitude_word(BORROMEAN, 3, pres), pres, 3), 3)
    com = expand(commutator(meridian(1), meridian(2)), 3)
    deg2 = {m: c for m, c in poly.to_dict().items() if len(m) == 2}
    ref = {m: c for m, c in com.to_dict().items() if len(m) == 2}
    sign = deg2[(1, 2)]
    assert abs(sign) == 1
    assert deg2 == {m: sign * c for m, c in ref.items()}


def test_golden_mu_values():
    h = mu_bar(HOPF, (1, 2))
    assert abs(h.coefficient) == 1 and not h.indeterminate
    assert mu_bar(UNLINK3, (1, 2, 3)).coefficient == 0
    b = mu_bar(BORROMEAN, (1, 2, 3))
    assert abs(b.coefficient) == 1 and not b.indeterminate
    assert mu_bar(BORROMEAN, (1, 2, 3), modulus=3).coefficient != 0


def test_mu_errors():
    with pytest.raises(DiagramError):
        mu_bar(BORROMEAN, (1, 1, 2))
    with pytest.raises(DiagramError):
        mu_bar(HOPF, (1, 2, 3))


@pytest.mark.parametrize("depth", [3, 4, 5, 6])
def test_mu_independent_of_depth(depth):
    assert mu_bar(BORROMEAN, (1, 2, 3), depth=depth).coefficient == mu_bar(BORROMEAN, (1, 2, 3)).coefficient


def test_mu_independent_of_labels():
    edges = sorted(BORROMEAN.edge_component)
    rng = np.random.default_rng(4)
    perm = dict(zip(edges, (int(x) for x in rng.permutation(edges))))
    shuffled = BORROMEAN.relabel(perm)
    for seq in [(1, 2, 3), (2, 3, 1), (2, 1, 3)]:
        assert mu_bar(shuffled, seq).coefficient == mu_bar(BORROMEAN, seq).coefficient


def test_split_union_vanishes():
    union = disjoint_union(HOPF, UNKNOT)
    assert union.n_components == 3
    assert mu_bar(union, (1, 2)).coefficient == mu_bar(HOPF, (1, 2)).coefficient
    for seq in [(1, 3), (2, 3), (1, 2, 3), (3, 1, 2)]:
        assert mu_bar(union, seq).coefficient == 0


def test_abelianization_matches_geometry():
    link = canonical_hopf(0.1)
    pd = pd_from_link(link)
    assert abelianized_linking(pd, 1, 2) == linking_integer(*link.components)
    a = PLCurve(circle_points([0.3, 0.5, 0.5], 2, 0.1, 24), "a")
    b = PLCurve(circle_points([0.7, 0.5, 0.5], 1, 0.1, 24), "b")
    split = pd_from_link(PLLink((a, b)))
    assert abelianized_linking(split, 1, 2) == 0 == linking_integer(a, b)


def test_geometry_to_borromean_diagram():
    pd = pd_from_link(borromean_rings(), np.eye(3))
    assert len(pd.crossings) == 6
    assert abs(mu_bar(pd, (1, 2, 3)).coefficient) == 1


def test_malformed_pd():
    with pytest.raises(DiagramError):
        PDCode.parse("X 1,2,3,4 +\nC 1 1\nC 2 1\nC 3 1")


def test_word_length_guard(monkeypatch):
    import dataclasses
    from linkpack.magnus import Word
    monkeypatch.setattr(dg, "MAX_WORD_LENGTH", 50)
    pres = wirtinger(BORROMEAN)
    # an arc conjugated by itself keeps growing under substitution
    looping = dataclasses.replace(pres, conjugator={**pres.conjugator, 2: Word((2, 4))})
    with pytest.raises(DiagramError):
        reduce_to_meridians(Word((2,)), looping, 10)


def test_text_round_trip():
    assert PDCode.parse(BORROMEAN.to_text()) == BORROMEAN
