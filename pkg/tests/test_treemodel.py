import numpy as np
import pytest
import shapely
from shapely.geometry import LineString, Point, Polygon
from shapely.ops import polygonize, unary_union

from lozitree.errors import InvariantViolation, UsageError
from lozitree.geom2d import on_segment, segment_intersect
from lozitree.lozi import forward
from lozitree.treemodel import (
    ArcLocator,
    E_segment,
    T0,
    T_polygon,
    accumulation_witness,
    arc_node,
    branch_census,
    induced_map,
    interleaving_violations,
    map_arcs_by_power,
    preimage_components,
    stems_and_levels,
)


def _float(pl):
    return [p.approx() for p in pl]


def _delta_shape(P):
    return Polygon(_float(P.delta.vertices))


def test_T0_corner_A0(P):
    t0 = T0(P)
    assert on_segment(t0.A0, P.X, P.Z1) and t0.A0 not in (P.X, P.Z1)
    assert on_segment(t0.W, P.X, P.V0)
    assert forward(P, t0.A0) == t0.W
    # float line intersection of [V0, V^-1] and [X, Z^1]
    V0, Vm1 = np.array(P.V0.approx()), np.array(P.inverse(P.V0).approx())
    X, Z1 = np.array(P.X.approx()), np.array(P.Z1.approx())
    M = np.column_stack([Vm1 - V0, X - Z1])
    s, _ = np.linalg.solve(M, X - V0)
    assert np.allclose(V0 + s * (Vm1 - V0), t0.A0.approx(), atol=1e-12, rtol=0)


def test_T_polygon_depth_zero(P):
    T = T_polygon(P, 0)
    assert len(T.components) == 1
    with pytest.raises(UsageError):
        T_polygon(P, -1)


def test_T_components_match_float_intersection(P):
    for n in (3, 6):
        T = T_polygon(P, n)
        shape = Polygon(_float(T.stable_boundary)).buffer(0)
        inter = shape.intersection(_delta_shape(P))
        parts = [g for g in getattr(inter, "geoms", [inter]) if g.area > 1e-14]
        assert len(parts) == len(T.components)


@pytest.mark.slow
def test_T_diameter_shrinks_between_depths_5_and_10(P):
    assert T_polygon(P, 10).max_diameter < T_polygon(P, 5).max_diameter


def test_unstable_side_of_T_shrinks(P):
    lengths = []
    for n in range(0, 9):
        A, X = T_polygon(P, n).unstable_boundary()
        lengths.append(np.hypot(*(np.array(A.approx()) - np.array(X.approx()))))
    assert all(b < a for a, b in zip(lengths, lengths[1:]))
    assert lengths[-1] < lengths[0] / 100


def test_XW_arc_present_at_every_depth(P, family):
    t0 = T0(P)
    for n in range(0, 9):
        arc = family(n).arcs[0]
        assert arc.polyline[0] == P.X
        assert on_segment(t0.W, arc.polyline[0], arc.polyline[1])


def _float_arc_count(P, pl):
    line = LineString(_float(pl))
    inter = line.intersection(_delta_shape(P))
    parts = list(getattr(inter, "geoms", [inter]))
    if len(parts) > 1:
        parts = list(getattr(shapely.line_merge(shapely.MultiLineString(parts)), "geoms", parts))
    tip = Point(pl[-1].approx())
    return sum(1 for g in parts if g.distance(tip) > 1e-12)


def test_arc_count_matches_float_pipeline(P, stable12, family):
    for n in (4, 6):
        assert len(family(n).arcs) == _float_arc_count(P, stable12.prefix(n))


def test_arcs_pairwise_disjoint(family):
    arcs = family(6).arcs
    for i, a in enumerate(arcs):
        for b in arcs[i + 1:]:
            for p, q in zip(a.polyline, a.polyline[1:]):
                for u, v in zip(b.polyline, b.polyline[1:]):
                    assert segment_intersect(p, q, u, v) is None


def test_single_arc_tree(tree):
    t = tree(0)
    assert len(t.nodes) == 3 and t.n_edges == 2
    assert t.degree(arc_node(0)) == 2


def test_tree_property_and_degrees(tree):
    for n in range(0, 9):
        t = tree(n)
        assert t.is_connected()
        assert len(t.nodes) == t.n_edges + 1
        for arc in t.family.arcs:
            assert t.degree(arc_node(arc.id)) == arc.c == 2 + len(arc.interior_touches)


def test_census_depth_zero_empty(P, tree):
    c = branch_census(P, 0, tree=tree(0))
    assert c.histogram == {} and c.face_histogram == {}
    assert c.min_order is None


def _float_face_degrees(P, fam):
    """Faces by float polygonization; an arc is incident to a face if it runs along its boundary."""
    delta = _delta_shape(P)
    lines = [delta.exterior]
    for arc in fam.arcs:
        pts = np.array(_float(arc.polyline))
        # push the ends slightly outwards so float noding sees a crossing
        for i, j in ((0, 1), (-1, -2)):
            d = pts[i] - pts[j]
            pts[i] = pts[i] + 1e-9 * d / np.linalg.norm(d)
        lines.append(LineString(pts))
    faces = [f for f in polygonize(unary_union(lines)) if delta.contains(f.representative_point())]
    degrees = []
    for f in faces:
        deg = 0
        for arc in fam.arcs:
            pts = np.array(_float(arc.polyline))
            mid = 0.5 * (pts[0] + pts[1])
            if f.exterior.distance(Point(mid)) < 1e-9:
                deg += 1
        degrees.append(deg)
    return degrees


def test_census_matches_float_pipeline(P, tree):
    t = tree(8)
    c = branch_census(P, 8, tree=t)
    degs = _float_face_degrees(P, t.family)
    assert len(degs) == c.n_faces
    hist = {}
    for d in degs:
        if d >= 3:
            hist[d] = hist.get(d, 0) + 1
    assert hist == c.face_histogram
    assert all(o >= 3 for o in c.histogram)


def test_stems_b0(P, tree):
    r = stems_and_levels(P, 6, tree=tree(6))
    assert r.b0 is not None and r.b0.level == 0 and r.b0.order >= 3
    assert r.b0_check
    assert r.stems[0].level == 0 and r.stems[0].anchor is None
    for u in r.unresolved:
        assert u.reason


def test_stems_on_small_depth_report_unresolved(P, tree):
    r = stems_and_levels(P, 1, tree=tree(1))
    assert r.b0 is None and not r.b0_check
    assert r.unresolved


def test_interleaving_detects_bad_labels(tree):
    from lozitree.treemodel import BranchRecord

    t = tree(6)
    br = [BranchRecord(n[0], n[1], t.degree(n), 2) for n in t.branch_nodes()[:2]]
    assert len(br) == 2
    assert interleaving_violations(t, br) == [(br[0].node, br[1].node)]


def test_E_segment_on_y_axis(P):
    top, bottom = E_segment(P)
    assert top == P.inverse(P.Z) and top.x.sign() == 0 and bottom.x.sign() == 0
    assert on_segment(bottom, P.Z2, P.Z)


def test_induced_map_fixes_X_arc(P, family):
    for n in range(1, 7):
        f = induced_map(P, n, family(n), family(n - 1))
        assert f[0] == 0
        assert set(f) == {a.id for a in family(n).arcs}


def test_induced_map_matches_preimage_enumeration(P, family):
    for n in range(1, 7):
        f = induced_map(P, n, family(n), family(n - 1))
        pre = preimage_components(P, family(n), family(n - 1))
        for tgt, srcs in pre.items():
            for s in srcs:
                assert f[s] == tgt
        covered = {t for t, srcs in pre.items() if srcs}
        assert set(f.values()) == covered


def test_two_steps_equal_direct_square(P, family):
    for n in range(2, 7):
        f1 = induced_map(P, n, family(n), family(n - 1))
        f2 = induced_map(P, n - 1, family(n - 1), family(n - 2))
        direct = map_arcs_by_power(P, family(n), family(n - 2), 2)
        assert {k: f2[v] for k, v in f1.items()} == direct


def test_arcs_persist_with_their_ids(family):
    for n in range(0, 7):
        loc = ArcLocator(family(n + 1).arcs)
        for arc in family(n).arcs:
            for p in arc.polyline:
                assert arc.id in loc.locate(p)


def test_image_off_family_is_an_invariant_violation(P, family):
    # mapping depth-3 arcs into the depth-0 family must fail: images are not all contained
    with pytest.raises(InvariantViolation):
        map_arcs_by_power(P, family(3), family(0), 1)


def test_accumulation_witness_small(P):
    w = accumulation_witness(P, 0, 0.2, max_depth=8)
    assert w.found and w.depth <= 8
    assert 0 not in w.witnesses and w.witnesses[0] != w.witnesses[1]
    assert w.sides[0] != w.sides[1]
    assert all(d <= 0.2 for d in w.distances)


def test_accumulation_not_found_is_a_report(P):
    w = accumulation_witness(P, 0, 1e-6, max_depth=3)
    assert not w.found and w.depth is None
    with pytest.raises(UsageError):
        accumulation_witness(P, 0, 0)
