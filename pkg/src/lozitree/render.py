"""Scenes for the Lozi figures, written as SVG (hand-rolled, deterministic) or PNG.

A scene is a list of layers with roles; roles map to CSS classes in SVG and to
colours in matplotlib, following the usual convention of the figures: stable
manifold red, unstable blue, stable boundaries of regions black.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvariantViolation
from .geom2d import INSIDE, BOUNDARY, QPoint, point_in_polygon

ROLE_COLOURS = {
    "delta": "#7f7f7f",
    "stable": "#d62728",
    "unstable": "#1f77b4",
    "sboundary": "#000000",
    "E": "#2ca02c",
    "basin": "#9467bd",
    "arcs": "#ff7f0e",
    "labels": "#000000",
}

LAYER_ORDER = ("E", "basin", "stable", "arcs", "unstable", "sboundary", "delta", "labels")


@dataclass
class Layer:
    role: str
    kind: str  # "polyline", "polygon" or "points"
    items: List[np.ndarray]
    labels: List[str] = field(default_factory=list)


@dataclass
class SceneDescription:
    layers: List[Layer]
    viewport: Tuple[float, float, float, float]
    title: str = ""

    def layer(self, role: str) -> Optional[Layer]:
        return next((l for l in self.layers if l.role == role), None)

    def ordered(self) -> List[Layer]:
        rank = {r: i for i, r in enumerate(LAYER_ORDER)}
        return sorted(self.layers, key=lambda l: (rank.get(l.role, len(rank)), l.role))


def _arr(pts: Sequence[QPoint]) -> np.ndarray:
    return np.array([p.approx() for p in pts], dtype=float)


def clip_to_box(pl: np.ndarray, box) -> List[np.ndarray]:
    """Liang-Barsky clipping of a float polyline to a rectangle; returns the inside pieces."""
    x0, y0, x1, y1 = box
    pieces: List[List[np.ndarray]] = []
    cur: List[np.ndarray] = []
    for p, q in zip(pl[:-1], pl[1:]):
        d = q - p
        t0, t1 = 0.0, 1.0
        ok = True
        for pk, qk in ((-d[0], p[0] - x0), (d[0], x1 - p[0]), (-d[1], p[1] - y0), (d[1], y1 - p[1])):
            if pk == 0:
                if qk < 0:
                    ok = False
                    break
            else:
                r = qk / pk
                if pk < 0:
                    t0 = max(t0, r)
                else:
                    t1 = min(t1, r)
        if not ok or t0 > t1:
            if cur:
                pieces.append(cur)
                cur = []
            continue
        a, b = p + t0 * d, p + t1 * d
        if not cur:
            cur = [a]
        elif not np.array_equal(cur[-1], a):
            pieces.append(cur)
            cur = [a]
        cur.append(b)
        if t1 < 1.0:
            pieces.append(cur)
            cur = []
    if cur:
        pieces.append(cur)
    return [np.array(c) for c in pieces if len(c) >= 2]


def lozi_scene(params, stable_depth: int, unstable_depth: int, region_depth: Optional[int] = None,
               show_E: bool = True, budget=None) -> SceneDescription:
    """Delta, stable and unstable approximations, optional region boundaries, labelled points.

    Every unstable vertex is checked to lie in Delta exactly before it is drawn.
    """
    from .manifold import grow_stable, grow_unstable
    from .treemodel import E_segment, T_polygon

    delta = params.delta
    U = grow_unstable(params, unstable_depth, budget)
    for v in U.vertices():
        if point_in_polygon(v, delta) not in (INSIDE, BOUNDARY):
            raise InvariantViolation("unstable vertex outside Delta", witness={"point": v})
    S = grow_stable(params, stable_depth, budget)

    named = {"X": params.X, "Y": params.Y, "Z": params.Z, "Z1": params.Z1, "Z2": params.Z2, "V0": params.V0}
    pts = np.array([p.approx() for p in list(delta.vertices) + list(named.values())])
    lo, hi = pts.min(0), pts.max(0)
    pad = 0.08 * float((hi - lo).max())
    box = (float(lo[0] - pad), float(lo[1] - pad), float(hi[0] + pad), float(hi[1] + pad))

    layers = [Layer("delta", "polygon", [_arr(delta.vertices)])]
    if show_E:
        layers.append(Layer("E", "polyline", [_arr(E_segment(params))]))
    layers.append(Layer("stable", "polyline", clip_to_box(_arr(S.polyline), box)))
    b1, b2 = U.branches
    layers.append(Layer("unstable", "polyline", [_arr(b1), _arr(b2)]))
    if region_depth is not None:
        T = T_polygon(params, region_depth)
        chords = sorted({c for comp in T.components for c in comp.stable_chords})
        layers.append(Layer("sboundary", "polyline", [_arr(T.subdivision.chords[c].points) for c in chords]))
    names = sorted(named)
    layers.append(Layer("labels", "points", [np.array([named[k].approx()]) for k in names], labels=names))
    title = f"Lozi map a={params.a}, b={params.b}"
    return SceneDescription(layers=layers, viewport=box, title=title)


# -- SVG ------------------------------------------------------------------------------


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def scene_to_svg(scene: SceneDescription, width: int = 800) -> str:
    x0, y0, x1, y1 = scene.viewport
    w, h = x1 - x0, y1 - y0
    height = int(round(width * h / w))
    sx = width / w

    def tx(p):
        return _fmt((p[0] - x0) * sx), _fmt((y1 - p[1]) * sx)

    css = "\n".join(
        f"  .{role} {{ stroke: {col}; fill: none; stroke-width: {1.6 if role in ('sboundary', 'delta') else 0.8}; }}"
        for role, col in ROLE_COLOURS.items()
    )
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{scene.title}</title>",
        "<style>",
        css,
        "  .labels { fill: #000000; stroke: none; font: 12px sans-serif; }",
        "</style>",
        '<rect width="100%" height="100%" fill="#ffffff"/>',
    ]
    for layer in scene.ordered():
        out.append(f'<g class="{layer.role}" data-role="{layer.role}">')
        if layer.kind == "points":
            for item, lab in zip(layer.items, layer.labels or [""] * len(layer.items)):
                for p in item:
                    x, y = tx(p)
                    out.append(f'<circle cx="{x}" cy="{y}" r="2.5"/>')
                    if lab:
                        out.append(f'<text x="{x}" y="{y}" dx="4" dy="-4">{lab}</text>')
        else:
            tag = "polygon" if layer.kind == "polygon" else "polyline"
            for item in layer.items:
                coords = " ".join(",".join(tx(p)) for p in item)
                out.append(f'<{tag} points="{coords}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_layer_points(svg: str, role: str, scene_viewport, width: int = 800) -> np.ndarray:
    """Recover world coordinates of a layer's vertices from SVG text (inverse of the writer)."""
    import re

    x0, y0, x1, y1 = scene_viewport
    sx = width / (x1 - x0)
    m = re.search(rf'<g class="{role}"[^>]*>(.*?)</g>', svg, re.S)
    if not m:
        return np.zeros((0, 2))
    pts = []
    for coords in re.findall(r'points="([^"]*)"', m.group(1)):
        for pair in coords.split():
            u, v = pair.split(",")
            pts.append((float(u) / sx + x0, y1 - float(v) / sx))
    return np.array(pts)


# -- matplotlib -------------------------------------------------------------------------


def scene_to_png(scene: SceneDescription, path: str, dpi: int = 150) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 8 * (scene.viewport[3] - scene.viewport[1]) / (scene.viewport[2] - scene.viewport[0])))
    for layer in scene.ordered():
        col = ROLE_COLOURS.get(layer.role, "#000000")
        lw = {"sboundary": 1.6, "delta": 1.6, "stable": 0.25}.get(layer.role, 0.6)
        if layer.kind == "points":
            for item, lab in zip(layer.items, layer.labels or [""] * len(layer.items)):
                ax.plot(item[:, 0], item[:, 1], "o", color=col, ms=3)
                if lab:
                    ax.annotate(lab, item[0], xytext=(4, 4), textcoords="offset points", fontsize=9)
        else:
            for item in layer.items:
                xy = np.vstack([item, item[:1]]) if layer.kind == "polygon" else item
                ax.plot(xy[:, 0], xy[:, 1], color=col, lw=lw)
    x0, y0, x1, y1 = scene.viewport
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_title(scene.title)
    fig.savefig(path, dpi=dpi, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def plot_series(path: str, xs: Sequence[float], series: Dict[str, Sequence[float]], xlabel: str, title: str) -> None:
    """A small line chart of per-depth statistics."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted(series):
        ys = [np.nan if v is None else v for v in series[name]]
        ax.plot(xs, ys, marker="o", label=name)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def henon_scene(unstable: Sequence[np.ndarray], stable: Sequence[np.ndarray], P, box) -> SceneDescription:
    layers = [
        Layer("stable", "polyline", [p for s in stable for p in clip_to_box(s, box)]),
        Layer("unstable", "polyline", [p for u in unstable for p in clip_to_box(u, box)]),
        Layer("labels", "points", [np.array([P])], labels=["P"]),
    ]
    return SceneDescription(layers=layers, viewport=tuple(float(v) for v in box), title="Henon map")
