"""The thirteen acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import misiurewicz_grid, record
from lozitree.cli import main
from lozitree.geom2d import BOUNDARY, INSIDE, point_in_polygon
from lozitree.henon import henon, henon_params, image_area, trace_unstable, triangle_area
from lozitree.lozi import check_trapping, forward, make_params
from lozitree.manifold import (
    basin_anchors,
    find_v_points,
    grow_stable,
    grow_unstable,
    orbit_density_diagnostic,
    stable_parameters,
    stable_segment0,
    unstable_segment0,
)
from lozitree.qfield import QScalar
from lozitree.render import lozi_scene, svg_layer_points
from lozitree.treemodel import (
    accumulation_witness,
    induced_map,
    map_arcs_by_power,
    stems_and_levels,
)

GRID = misiurewicz_grid(20)


def test_criterion_01_exact_fixed_points():
    t = time.perf_counter()
    bad = []
    for a, b in [(F(7, 4), F(9, 20))] + GRID:
        p = make_params(a, b)
        if forward(p, p.X) != p.X or forward(p, p.Y) != p.Y:
            bad.append((a, b))
    p = make_params(F(7, 4), F(9, 20))
    exact = p.X == p.point(F(10, 23), F(9, 46)) and p.Y == p.point(F(-5, 6), F(-3, 8))
    dt = time.perf_counter() - t
    ok = not bad and exact and dt < 1
    record(1, ok, f"{1 + len(GRID)} parameter pairs, {len(bad)} failures, {dt:.3f} s")
    assert ok


def test_criterion_02_closed_forms():
    t = time.perf_counter()
    bad = []
    for a, b in GRID:
        p = make_params(a, b)
        r = 1 + a - b
        sq = QScalar(0, 1, p.D)
        V0 = p.point(0, ((2 * b - a) - sq) / (2 * r))
        Z = p.point((sq + (2 + a)) / (2 * r), 0)
        if stable_segment0(p)[1] != V0 or unstable_segment0(p)[1] != Z:
            bad.append((a, b))
    dt = time.perf_counter() - t
    ok = not bad and len(GRID) == 20 and dt < 1
    record(2, ok, f"eigenline hits equal closed-form V0 and Z for {len(GRID) - len(bad)}/20 pairs, {dt:.3f} s")
    assert ok


def test_criterion_03_trapping():
    t = time.perf_counter()
    results = [bool(check_trapping(make_params(a, b))) for a, b in [(F(7, 4), F(9, 20))] + GRID]
    bad = check_trapping(make_params(F(2), F(1, 2)))
    dt = time.perf_counter() - t
    ok = all(results) and not bad and bad.witness is not None and dt < 5
    record(3, ok, f"trapping holds on {sum(results)}/{len(results)} pairs; (2, 1/2) rejected with witness; {dt:.3f} s")
    assert ok


def test_criterion_04_v_points(P):
    t = time.perf_counter()
    S = grow_stable(P, 10)
    ba = basin_anchors(P, 1)
    lo, hi = ba.N.y, ba.M_pullbacks[0].y
    counts, problems = [], []
    for n in range(1, 11):
        Sn = S.truncate(n)
        recs = find_v_points(P, Sn)
        params = stable_parameters(Sn)
        ts = [params[r.index] for r in recs]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            problems.append(f"order at depth {n}")
        for r in recs:
            if r.level == 1 and not (r.point.x.sign() == 0 and lo < r.point.y < hi):
                problems.append(f"level-1 point outside (M^-1, N) at depth {n}")
        counts.append(len(recs))
    monotone = all(b >= a for a, b in zip(counts, counts[1:]))
    dt = time.perf_counter() - t
    ok = not problems and monotone and dt < 60
    record(4, ok, f"V-point counts {counts}, ordered, level-1 points inside (M^-1, N); {dt:.1f} s")
    assert ok


def test_criterion_05_tree_property(tree):
    t = time.perf_counter()
    sizes, bad = [], []
    for n in range(1, 9):
        tr = tree(n)
        if not (tr.is_connected() and len(tr.nodes) == tr.n_edges + 1):
            bad.append(n)
        sizes.append(len(tr.nodes))
    dt = time.perf_counter() - t
    ok = not bad and dt < 120
    record(5, ok, f"connected with |nodes| = |edges| + 1 at depths 1..8 (nodes {sizes}); {dt:.1f} s")
    assert ok


def test_criterion_06_branch_criterion(family):
    disc = checked = 0
    for n in range(0, 9):
        fam = family(n)
        for arc in fam.arcs:
            checked += 1
            if fam.subdivision.face_degree(arc.id) != 2 + len(arc.interior_touches):
                disc += 1
    ok = disc == 0
    record(6, ok, f"{checked} arcs over depths 0..8, {disc} discrepancies")
    assert ok


@pytest.mark.slow
def test_criterion_07_branch_density(P, tree):
    dist, diam = {}, {}
    for n in range(4, 11):
        tr = tree(n)
        dist[n] = tr.max_distance_to_branch()
        diam[n] = tr.max_face_diameter()
    d_ok = all(dist[n + 1] <= dist[n] for n in range(4, 10))
    f_ok = all(diam[n + 1] <= diam[n] for n in range(4, 10))
    half = diam[10] < 0.5 * diam[5]
    ok = d_ok and f_ok and half
    record(7, ok, "max hops arc->branch " + str([dist[n] for n in range(4, 11)])
           + f" (non-increasing: {d_ok}); max face diameter "
           + str([round(diam[n], 4) for n in range(4, 11)])
           + f" (non-increasing: {f_ok}; depth 10 < 50% of depth 5: {half})")
    assert ok


def test_criterion_08_accumulation(P):
    t = time.perf_counter()
    w = accumulation_witness(P, 0, 0.05, max_depth=12)
    dt = time.perf_counter() - t
    ok = w.found and w.depth <= 12 and None not in w.witnesses and w.sides[0] != w.sides[1] \
        and all(d <= 0.05 for d in w.distances)
    record(8, ok, f"[X,W]-arc: depth {w.depth}, witness arcs {w.witnesses}, Hausdorff "
           f"{tuple(round(d, 4) for d in w.distances) if w.found else None}, faces {w.sides}; {dt:.1f} s")
    assert ok


def test_criterion_09_induced_map(P, family):
    violations = 0
    for n in range(2, 9):
        try:
            f = induced_map(P, n, family(n), family(n - 1))
            if set(f) != {a.id for a in family(n).arcs}:
                violations += 1
        except Exception:
            violations += 1
    for n in range(2, 7):
        f1 = induced_map(P, n, family(n), family(n - 1))
        f2 = induced_map(P, n - 1, family(n - 1), family(n - 2))
        direct = map_arcs_by_power(P, family(n), family(n - 2), 2)
        violations += sum(1 for k in f1 if f2[f1[k]] != direct[k])
    ok = violations == 0
    record(9, ok, f"induced map total and single-valued at depths 2..8; f∘f = L^2 at depths 2..6; {violations} violations")
    assert ok


def test_criterion_10_stems(P, tree):
    found, violations, missing = [], 0, []
    for n in range(1, 9):
        r = stems_and_levels(P, n, tree=tree(n))
        violations += len(r.interleaving_violations)
        if r.b0 is None:
            missing.append(n)
        else:
            found.append((n, r.b0_check))
    ok = violations == 0 and found and all(c for _, c in found) and max(found)[0] == 8
    record(10, ok, f"b0 = B0 ∩ B1 at depths {[n for n, c in found if c]} (b0 unresolved at depths {missing}); "
           f"{violations} interleaving violations at depths 1..8")
    assert ok


@pytest.mark.slow
def test_criterion_11_figure(P, tmp_path, capsys):
    paths = [tmp_path / "fig6a.svg", tmp_path / "fig6b.svg"]
    for p in paths:
        assert main(["render", "--a", "7/4", "--b", "9/20", "--stable-depth", "14", "--unstable-depth", "14",
                     "-o", str(p)]) == 0
    capsys.readouterr()
    same = paths[0].read_bytes() == paths[1].read_bytes()
    U = grow_unstable(P, 14)
    in_delta = all(point_in_polygon(v, P.delta) in (INSIDE, BOUNDARY) for v in U.vertices())
    through_v0 = grow_stable(P, 14).polyline[1] == P.V0
    sc = lozi_scene(P, 14, 14)
    red = svg_layer_points(paths[0].read_text(), "stable", sc.viewport)
    drawn_v0 = np.abs(red - np.array(P.V0.approx())).max(axis=1).min() < 1e-5
    ok = same and in_delta and through_v0 and drawn_v0
    record(11, ok, f"SVG byte-identical: {same}; {len(U.vertices())} unstable vertices in Delta exactly: {in_delta}; "
           f"stable layer through V0: {through_v0 and drawn_v0}")
    assert ok


def test_criterion_12_henon():
    hp = henon_params(1.4, 0.3)
    res = float(np.hypot(*np.subtract(henon(1.4, 0.3, hp.P), hp.P)))
    rng = np.random.default_rng(2024)
    worst = 0.0
    n_tri = 0
    while n_tri < 100:
        tri = rng.uniform(-2, 2, size=(3, 2))
        a0 = triangle_area(tri)
        if abs(a0) < 1e-3:
            continue
        worst = max(worst, abs(abs(image_area(1.4, 0.3, tri) / a0) - 0.3))
        n_tri += 1
    t10, t20 = trace_unstable(hp, 10.0), trace_unstable(hp, 20.0)
    # common window: the arclength range both traces cover
    common = t20.points[: len(t10.points)]
    from lozitree.henon import hausdorff_points

    hd = hausdorff_points(t10.points, common)
    # for the record: a spatial box also sees the extra folds of the longer trace
    box = (0.0, 0.0, 1.0, 0.4)
    spatial = hausdorff_points(np.vstack(t10.window(box)), np.vstack(t20.window(box)))
    ok = res < 1e-12 and worst < 1e-9 and hd < 1e-3
    record(12, ok, f"fixed-point residual {res:.1e}; worst area-ratio error {worst:.1e} on 100 triangles; "
           f"Hausdorff on the common arclength window {hd:.1e} (spatial box {box}: {spatial:.2e})")
    assert ok


def test_criterion_13_orbit_density(P):
    seg = unstable_segment0(P)
    _, ref = orbit_density_diagnostic(P, seg, 10**7, 0.05, return_cells=True)
    frac = orbit_density_diagnostic(P, seg, 10**6, 0.05, reference=ref)
    ok = frac >= 0.95
    record(13, ok, f"10^6 iterates cover {100 * frac:.2f}% of the {len(ref)} cells of the 10^7 reference")
    assert ok
