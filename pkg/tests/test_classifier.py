import json
from pathlib import Path

import pytest

from atlas.bundle_data import A0, A1, TRIVIAL, SurfaceTag
from atlas.classifier import (aut_descriptor, bir_maximality, classify, conjugacy_family, stiffness,
                              witness_path)
from atlas.divisor_class import ClassGroup
from atlas.errors import OutOfUniverse
from atlas.link_engine import (ASbnD, Dec, FiberProduct, IndecCP1, XA0b0, apply_link, canonical,
                               descriptor_from_json, descriptor_key, enumerate_orbit, set_default_group)

SWEEP = json.loads((Path(__file__).parent.parent / "fixtures" / "classification_sweep.json").read_text())
G = ClassGroup.from_json(SWEEP["class_group"])
set_default_group(G)
g1, g2, t = G.generator(1), G.generator(2), G.generator(3)
O = G.zero()
Ds = G.Dsigma()


def SL(L):
    return SurfaceTag("SL", L)


def row_descriptor(row):
    return descriptor_from_json(row["descriptor"], G)


@pytest.mark.parametrize("row", SWEEP["rows"], ids=lambda r: r["name"])
def test_fixture_row(row):
    v = classify(row_descriptor(row), row["genus"])
    assert v.relatively_maximal == row["relatively_maximal"]
    assert v.rule == row["rule"]
    if row["relatively_maximal"]:
        assert stiffness(row_descriptor(row), row["genus"]).status == row["stiffness"]


def test_sweep_covers_every_positive_case():
    cases = {r["case"] for r in SWEEP["rows"] if r["relatively_maximal"] and r["genus"] == 1}
    assert cases == {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii"}
    assert len(SWEEP["rows"]) >= 14


@pytest.mark.parametrize("row", [r for r in SWEEP["rows"] if not r["relatively_maximal"]], ids=lambda r: r["name"])
def test_witness_paths_replay(row):
    d = row_descriptor(row)
    path = classify(d, row["genus"]).witness
    node = canonical(d)      # paths are spelled in the canonical frame
    for step in path:
        r = apply_link(node, step["selector"], witness=True)
        node = r.target
        assert descriptor_key(node) == descriptor_key(descriptor_from_json(step["descriptor"], G))
    if path:
        assert not path[-1]["conjugates_full_group"]
        assert all(s["conjugates_full_group"] for s in path[:-1])


def test_witness_path_of_maximal_bundle_is_empty():
    assert witness_path(FiberProduct(A1, A1)) == []


def test_side_conditions_are_reported():
    v = classify(FiberProduct(SL(g1), A0))
    assert v.side_conditions == {"order(D)": "infinite"}
    v = classify(FiberProduct(SL(t), A0))
    assert not v.relatively_maximal and v.side_conditions == {"order(D)": "2"}


def test_genus_guard():
    with pytest.raises(OutOfUniverse):
        classify(FiberProduct(A1, A1), genus=2)
    with pytest.raises(OutOfUniverse):
        classify(FiberProduct(TRIVIAL, TRIVIAL), genus=0)
    assert classify(FiberProduct(TRIVIAL, TRIVIAL), genus=3).relatively_maximal


# -- stiffness and families ------------------------------------------------

def test_superstiff_fixtures_have_singleton_orbits():
    for row in SWEEP["rows"]:
        if row.get("stiffness") == "Superstiff":
            d = row_descriptor(row)
            assert len(enumerate_orbit(d, 3).nodes) == 1, row["name"]


def test_families_contain_their_orbits():
    for d in (FiberProduct(A1, SL(g1)), Dec(A1, 2, G.element(-1, [1, 0, 0])), FiberProduct(SL(g1), A0),
              Dec(A0, 1, g2), FiberProduct(SL(g1), SL(g2))):
        fam = conjugacy_family(d)
        assert fam is not None
        for node in enumerate_orbit(d, 2).nodes:
            assert fam.contains(node)
        members = {descriptor_key(m) for m in fam.members(2)}
        assert descriptor_key(d) in members


def test_family_excludes_neighbours():
    fam = conjugacy_family(FiberProduct(A1, SL(g1)))
    assert not fam.contains(Dec(A1, 4, g2 - Ds))
    assert not fam.contains(Dec(A1, 2, G.element(-1, [1, 0, 0])))
    fam = conjugacy_family(ASbnD(g1, 3, 1))
    assert fam.contains(ASbnD(-g1, 5, 5)) and not fam.contains(ASbnD(g2, 1, 0))


def test_not_applicable_stiffness():
    report = stiffness(FiberProduct(SL(t), A0))
    assert report.status == "NotApplicable" and "not-maximal-in-Bir" in report.rule


# -- maximality in Bir ------------------------------------------------------

@pytest.mark.parametrize("d,status", [
    (FiberProduct(TRIVIAL, TRIVIAL), "Maximal"),
    (FiberProduct(A0, A1), "NotMaximal"),
    (Dec(TRIVIAL, 1, g1), "Open"),
    (Dec(TRIVIAL, 2, g1), "Maximal"),
    (FiberProduct(SL(g1), A0), "Open"),
    (FiberProduct(SL(g1), SL(g2)), "Open"),
    (FiberProduct(A0, A0), "NotMaximal"),
    (FiberProduct(A1, A1), "Maximal"),
])
def test_bir_statuses(d, status):
    assert bir_maximality(d).status == status


def test_bir_coprime_relation():
    # D = 3 g1 and E = 2 g1 satisfy 2D - 3E = 0 with gcd(2, 3) = 1, yet no D + nE vanishes
    assert G.has_coprime_relation(g1 * 3, g1 * 2)
    assert G.exists_n_trivial(g1 * 3, g1 * 2) is None
    verdict = bir_maximality(FiberProduct(SL(g1 * 2), SL(g1 * 3)))
    assert verdict.status == "NotMaximal" and verdict.rule == "bir-sl-times-sl-coprime-relation"


# -- automorphism descriptors ----------------------------------------------

@pytest.mark.parametrize("tag,dim,kernel", [(TRIVIAL, 4, "PGL2"), (A0, 2, "Ga"), (A1, 1, "(Z/2)^2"), (SL(g1), 2, "Gm")])
def test_surface_automorphisms(tag, dim, kernel):
    a = aut_descriptor(tag)
    assert (a.dimension, a.kernel) == (dim, kernel)


def test_fiber_product_dimension():
    tags = [TRIVIAL, A0, A1, SL(g1)]
    for S1 in tags:
        for S2 in tags:
            a = aut_descriptor(FiberProduct(S1, S2))
            assert a.dimension == aut_descriptor(S1).dimension + aut_descriptor(S2).dimension - 1
            assert a.kernel == aut_descriptor(S2).kernel


def test_decomposable_over_trivial_product():
    assert aut_descriptor(Dec(TRIVIAL, 3, O)).dimension == 9
    assert aut_descriptor(IndecCP1(2, (1, 0, 1))).image_of_pi_star == "AutC_times_proper_subgroup"
    assert aut_descriptor(XA0b0(2)).dimension is None
