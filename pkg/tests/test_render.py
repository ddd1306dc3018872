import numpy as np

from lozitree.render import clip_to_box, henon_scene, lozi_scene, scene_to_png, scene_to_svg, svg_layer_points


def test_clip_to_box():
    pl = np.array([[-2.0, 0.5], [2.0, 0.5], [2.0, 2.0], [0.5, 2.0], [0.5, -2.0]])
    pieces = clip_to_box(pl, (0, 0, 1, 1))
    assert len(pieces) == 2
    assert np.allclose(pieces[0], [[0, 0.5], [1, 0.5]])
    assert np.allclose(pieces[1], [[0.5, 1], [0.5, 0]])


def test_scene_layers_and_svg_round_trip(P):
    sc = lozi_scene(P, 6, 6, region_depth=3)
    roles = [l.role for l in sc.ordered()]
    assert roles.index("stable") < roles.index("unstable") < roles.index("labels")
    svg = scene_to_svg(sc)
    assert svg == scene_to_svg(lozi_scene(P, 6, 6, region_depth=3))
    back = svg_layer_points(svg, "unstable", sc.viewport)
    orig = np.vstack(sc.layer("unstable").items)
    assert back.shape == orig.shape and np.abs(back - orig).max() < 1e-5
    assert '<g class="sboundary"' in svg


def test_stable_layer_passes_through_V0(P):
    from lozitree.manifold import grow_stable

    S = grow_stable(P, 14)
    assert S.polyline[1] == P.V0
    sc = lozi_scene(P, 14, 4)
    v0 = np.array(P.V0.approx())
    d = min(np.abs(item - v0).max(axis=1).min() for item in sc.layer("stable").items)
    assert d < 1e-12


def test_png_written(tmp_path, P):
    sc = lozi_scene(P, 4, 4)
    scene_to_png(sc, str(tmp_path / "f.png"))
    assert (tmp_path / "f.png").stat().st_size > 1000


def test_henon_scene():
    sc = henon_scene([np.array([[0.0, 0.0], [3.0, 3.0]])], [], (0.5, 0.5), (-1, -1, 1, 1))
    assert np.allclose(sc.layer("unstable").items[0], [[0, 0], [1, 1]])
    assert "<svg" in scene_to_svg(sc)
