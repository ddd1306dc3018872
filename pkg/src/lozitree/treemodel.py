"""Finite tree models of the dendrite attached to a Lozi attractor.

Gamma-arcs are the components of the depth-n stable polyline inside Delta.
Cutting Delta along them gives faces; the bipartite face/arc incidence graph
is a finite tree; its nodes of degree >= 3 shadow the branch points.  On
top of that sit the polygons T_n, stems with levels, the induced map and an
accumulation search.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConstructionError, InvariantViolation, UsageError
from .geom2d import (
    TRANSVERSAL,
    QPoint,
    QPolygon,
    Subdivision,
    Touch,
    _seg_box,
    clip_polyline_to_polygon,
    densify,
    on_segment,
    point_to_polyline,
    segment_intersect,
    subdivide,
)
from .lozi import forward, forward_polyline, inverse, inverse_polyline
from .manifold import StableApprox, grow_stable, stable_segment0

# -- Gamma arcs ----------------------------------------------------------------------


@dataclass
class GammaArc:
    id: int
    polyline: List[QPoint]
    interior_touches: List[Touch]
    c: int
    depth_created: int

    @property
    def endpoints(self) -> Tuple[QPoint, QPoint]:
        return self.polyline[0], self.polyline[-1]

    @property
    def c_transversal(self) -> int:
        """Face count under the convention that only transversal touches pinch."""
        return 2 + sum(1 for t in self.interior_touches if t.kind == TRANSVERSAL)


@dataclass
class GammaFamily:
    depth: int
    arcs: List[GammaArc]
    subdivision: Subdivision
    incomplete: int  # clipped components dropped because they end in the free tip
    stable: StableApprox = field(repr=False, default=None)


def gamma_arcs(params, n: int, stable: Optional[StableApprox] = None, budget=None) -> GammaFamily:
    """Clip the depth-n stable polyline to Delta and cut Delta along the pieces.

    Arc ids follow the order along the stable manifold, so an arc keeps its id
    at every larger depth.
    """
    if stable is None:
        stable = grow_stable(params, n, budget)
    comps = clip_polyline_to_polygon(stable.polyline, params.delta)
    complete = [c for c in comps if c.complete]
    sub = subdivide(params.delta, [c.points for c in complete])
    arcs = []
    for k, comp in enumerate(complete):
        seg_end = comp.source_end[0]
        created = next(d for d, ln in enumerate(stable.prefix_lengths) if ln >= seg_end + 2)
        arcs.append(GammaArc(id=k, polyline=comp.points, interior_touches=comp.touches,
                             c=sub.face_degree(k), depth_created=created))
    return GammaFamily(depth=n, arcs=arcs, subdivision=sub, incomplete=len(comps) - len(complete),
                       stable=stable)


# -- finite tree -----------------------------------------------------------------------


def arc_node(k: int):
    return ("a", k)


def face_node(f: int):
    return ("f", f)


@dataclass
class FiniteTree:
    """Bipartite face/arc incidence graph of a subdivision of Delta."""

    depth: int
    family: GammaFamily
    adj: Dict[tuple, List[tuple]]

    @classmethod
    def from_family(cls, fam: GammaFamily, check: bool = True) -> "FiniteTree":
        sub = fam.subdivision
        adj = {face_node(f.id): [] for f in sub.faces}
        for k in range(len(fam.arcs)):
            adj[arc_node(k)] = []
        for k, f in sub.incidence_edges():
            adj[arc_node(k)].append(face_node(f))
            adj[face_node(f)].append(arc_node(k))
        for v in adj.values():
            v.sort()
        tree = cls(depth=fam.depth, family=fam, adj=adj)
        if check:
            ok, info = tree.tree_check()
            if not ok:
                raise InvariantViolation("face/arc incidence graph is not a tree", witness=info)
        return tree

    @property
    def nodes(self) -> List[tuple]:
        return sorted(self.adj)

    @property
    def n_edges(self) -> int:
        return sum(len(v) for v in self.adj.values()) // 2

    def arc_nodes(self) -> List[tuple]:
        return [n for n in self.nodes if n[0] == "a"]

    def face_nodes(self) -> List[tuple]:
        return [n for n in self.nodes if n[0] == "f"]

    def degree(self, node) -> int:
        return len(self.adj[node])

    def is_connected(self) -> bool:
        if not self.adj:
            return True
        start = next(iter(self.adj))
        return len(self._bfs(start)[0]) == len(self.adj)

    def tree_check(self) -> Tuple[bool, dict]:
        nn, ne = len(self.adj), self.n_edges
        conn = self.is_connected()
        return (conn and nn == ne + 1), {"nodes": nn, "edges": ne, "connected": conn}

    def _bfs(self, start, blocked=frozenset()):
        dist = {start: 0}
        parent = {start: None}
        dq = deque([start])
        while dq:
            u = dq.popleft()
            for w in self.adj[u]:
                if w in dist or w in blocked:
                    continue
                dist[w] = dist[u] + 1
                parent[w] = u
                dq.append(w)
        return dist, parent

    def path(self, u, v) -> List[tuple]:
        """The unique node path from u to v."""
        _, parent = self._bfs(u)
        if v not in parent:
            raise InvariantViolation("nodes are not connected", witness={"u": u, "v": v})
        out = [v]
        while out[-1] != u:
            out.append(parent[out[-1]])
        return out[::-1]

    def components_without(self, node) -> List[set]:
        """Node sets of the components left after deleting ``node``."""
        out = []
        for nb in self.adj[node]:
            dist, _ = self._bfs(nb, blocked=frozenset([node]))
            out.append(set(dist))
        return out

    def project(self, u, target: set):
        """Nearest node of the connected node set ``target`` seen from u."""
        if u in target:
            return u
        dist, parent = self._bfs(u)
        best = min((dist[t], t) for t in target)
        return best[1]

    def branch_nodes(self, arcs_only: bool = False) -> List[tuple]:
        """Nodes of degree >= 3.

        A face bounded by three or more arcs is the finite shadow of a branch
        point that is a limit continuum rather than an arc of the family, so
        faces count unless ``arcs_only`` is set.
        """
        pool = self.arc_nodes() if arcs_only else self.nodes
        return [n for n in pool if self.degree(n) >= 3]

    def max_distance_to_branch(self, arcs_only: bool = False) -> Optional[int]:
        """Max over arc-nodes of the hop distance to the nearest branch node."""
        br = self.branch_nodes(arcs_only)
        if not br:
            return None
        dist = {b: 0 for b in br}
        dq = deque(br)
        while dq:
            u = dq.popleft()
            for w in self.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    dq.append(w)
        return max(dist[n] for n in self.arc_nodes())

    def max_face_diameter(self) -> float:
        sub = self.family.subdivision
        return max(sub.face_diameter(f.id) for f in sub.faces)


def build_tree(params, n: int, family: Optional[GammaFamily] = None, budget=None) -> FiniteTree:
    if family is None:
        family = gamma_arcs(params, n, budget=budget)
    return FiniteTree.from_family(family)


# -- census ----------------------------------------------------------------------------


@dataclass
class Census:
    """Branch orders at one depth.

    ``histogram`` counts arc-nodes (arcs touching the boundary inside),
    ``histogram_transversal_only`` the same under the convention that only
    transversal touches pinch, and ``face_histogram`` faces bounded by three
    or more arcs.  All orders are lower bounds for the limit objects.
    """

    depth: int
    histogram: Dict[int, int]
    min_order: Optional[int]
    max_order: Optional[int]
    histogram_transversal_only: Dict[int, int]
    face_histogram: Dict[int, int]
    n_arcs: int
    n_faces: int


def branch_census(params, n: int, tree: Optional[FiniteTree] = None) -> Census:
    if tree is None:
        tree = build_tree(params, n)
    orders = [tree.degree(arc_node(a.id)) for a in tree.family.arcs]
    hist = Counter(o for o in orders if o >= 3)
    alt = Counter(a.c_transversal for a in tree.family.arcs if a.c_transversal >= 3)
    fh = Counter(tree.degree(f) for f in tree.face_nodes() if tree.degree(f) >= 3)
    return Census(
        depth=n,
        histogram=dict(sorted(hist.items())),
        min_order=min(hist) if hist else None,
        max_order=max(hist) if hist else None,
        histogram_transversal_only=dict(sorted(alt.items())),
        face_histogram=dict(sorted(fh.items())),
        n_arcs=len(tree.family.arcs),
        n_faces=tree.family.subdivision.n_faces,
    )


# -- T_0 and T_n -------------------------------------------------------------------------


@dataclass
class T0Data:
    X: QPoint
    V0: QPoint
    A0: QPoint
    W: QPoint
    polygon: QPolygon


def T0(params) -> T0Data:
    """Triangle X, V0, A0 with A0 = [V0, V^-1] ∩ [X, Z^1] and W = L(A0)."""
    X, V0 = stable_segment0(params)
    Vm1 = inverse(params, V0)
    hit = segment_intersect(V0, Vm1, X, params.Z1)
    if not isinstance(hit, QPoint):
        raise ConstructionError("[V0, V^-1] does not cross [X, Z^1] in a single point")
    A0 = hit
    if A0 == X or A0 == params.Z1:
        raise ConstructionError("A0 is an endpoint of [X, Z^1]")
    W = forward(params, A0)
    if not on_segment(W, X, V0):
        raise InvariantViolation("L(A0) is not on [X, V0]", witness={"W": W})
    return T0Data(X=X, V0=V0, A0=A0, W=W, polygon=QPolygon([X, V0, A0]))


@dataclass
class SComponent:
    face: int  # face id in the subdivision by the clipped stable boundary
    diameter: float
    stable_chords: List[int]  # chord indices of the subdivision on its boundary


@dataclass
class TRegion:
    depth: int
    stable_boundary: List[QPoint]  # P_n, from X to A^-n
    A: QPoint  # A^-n
    polygon: QPolygon
    subdivision: Subdivision
    components: List[SComponent]

    @property
    def max_diameter(self) -> float:
        return max(c.diameter for c in self.components)

    def unstable_boundary(self) -> Tuple[QPoint, QPoint]:
        return (self.A, self.stable_boundary[0])


def stable_boundary(params, n: int, t0: Optional[T0Data] = None) -> List[QPoint]:
    """P_0 = [X, V0, A0]; P_k = L^-1(split_{y=0}(P_{k-1}))."""
    t0 = t0 or T0(params)
    P = [t0.X, t0.V0, t0.A0]
    for _ in range(n):
        P = inverse_polyline(params, P)
    return P


def T_polygon(params, n: int, t0: Optional[T0Data] = None) -> TRegion:
    """T_n = L^-n(T_0) and the components of T_n ∩ Delta.

    The unstable side [A^-n, X] of T_n lies on the boundary edge [Z, Z^1], so
    T_n ∩ Delta is the union of the faces of Delta cut by P_n that lie on the
    T_n side of P_n.  Each face is decided by chord sides, not by sampling.
    """
    if n < 0:
        raise UsageError("depth must be >= 0")
    t0 = t0 or T0(params)
    P = stable_boundary(params, n, t0)
    poly = QPolygon(P)
    # P followed by [A, X] is counterclockwise iff QPolygon kept the input order
    inside_left = not poly.reversed_input
    comps = clip_polyline_to_polygon(P, params.delta)
    if any(not c.complete for c in comps):
        raise InvariantViolation("stable boundary of T_n has a free end inside Delta")
    sub = subdivide(params.delta, [c.points for c in comps])
    side = {}
    for ci, (lf, rf) in enumerate(sub.chord_sides):
        tin, tout = (lf, rf) if inside_left else (rf, lf)
        for f, val in ((tin, True), (tout, False)):
            if side.setdefault(f, val) != val:
                raise InvariantViolation("face lies on both sides of the boundary of T_n", witness={"face": f})
    out = []
    for f in sorted(k for k, v in side.items() if v):
        chords = [fr[1] for fr in sub.faces[f].fragments if fr[0] == "chord"]
        out.append(SComponent(face=f, diameter=sub.face_diameter(f), stable_chords=sorted(set(chords))))
    return TRegion(depth=n, stable_boundary=P, A=P[-1], polygon=poly, subdivision=sub, components=out)


# -- stems and levels --------------------------------------------------------------------


@dataclass
class BranchRecord:
    """A labelled branch node; ``kind`` is "a" for an arc, "f" for a face."""

    kind: str
    id: int
    order: int
    level: int

    @property
    def node(self):
        return (self.kind, self.id)

    @property
    def arc_id(self) -> Optional[int]:
        return self.id if self.kind == "a" else None


@dataclass
class StemRecord:
    level: int
    members: List[int]  # arc ids on the stem, from the anchor outwards
    anchor: Optional[tuple]  # branch node it hangs from (None for B^0)
    start: str  # label of the boundary point the stem starts from
    nodes: List[tuple] = field(default_factory=list)


@dataclass
class Unresolved:
    level: int
    index: int  # p in Y^n_p
    reason: str


@dataclass
class StemsResult:
    depth: int
    stems: List[StemRecord]
    branches: List[BranchRecord]
    shared: List[Tuple[int, int, tuple]]  # (n, p, node) hitting an already-labelled branch
    unresolved: List[Unresolved]
    b0_check: bool
    interleaving_violations: List[Tuple[tuple, tuple]]
    tree: FiniteTree = field(repr=False)

    def level_of(self, node) -> Optional[int]:
        for b in self.branches:
            if b.node == tuple(node):
                return b.level
        return None

    @property
    def b0(self) -> Optional[BranchRecord]:
        return next((b for b in self.branches if b.level == 0), None)


def E_segment(params) -> List[QPoint]:
    """E = Delta ∩ y-axis, from Y0 = L^-1(Z) down to the bottom edge [Z^2, Z]."""
    Y0 = inverse(params, params.Z)
    Z, Z2 = params.Z, params.Z2
    t = Z2.x / (Z2.x - Z.x)
    bottom = QPoint(Z.x * 0, Z2.y + (Z.y - Z2.y) * t)
    return [Y0, bottom]


def boundary_points_of_preimage(params, n: int) -> List[List[QPoint]]:
    """Points of L^-n(E) ∩ ∂Delta grouped by component of L^-n(E) ∩ Delta, in order from L^-n(Y0)."""
    pl = E_segment(params)
    for _ in range(n):
        pl = inverse_polyline(params, pl)
    groups = []
    for comp in clip_polyline_to_polygon(pl, params.delta):
        pts = []
        if comp.start_kind == "boundary":
            pts.append(comp.points[0])
        pts.extend(t.point for t in comp.touches)
        if comp.end_kind == "boundary":
            pts.append(comp.points[-1])
        groups.append(pts)
    return groups


def stems_and_levels(params, n: int, tree: Optional[FiniteTree] = None, n_levels: Optional[int] = None) -> StemsResult:
    """Stems and branch levels on the depth-n finite tree.

    Finite version of the inductive construction: B^0 is the tree path between
    the faces at Z and Z^1.  At level k each boundary point Y^k_p (p odd) of
    L^-k(E) ∩ Delta is projected onto the union of stems of level <= k; an
    unlabelled node of degree >= 3 reached that way gets level k and spawns
    the stem of level k+1 from Y^k_p to it.  Projections onto nodes of order
    2, and points whose face already lies on a stem, are reported as
    unresolved: a deeper tree is needed to separate them.
    """
    if tree is None:
        tree = build_tree(params, n)
    if n_levels is None:
        n_levels = n
    sub = tree.family.subdivision

    def face_at(p):
        f = sub.face_of_boundary_point(p)
        return None if f is None else face_node(f)

    stems: List[StemRecord] = []
    branches: Dict[tuple, BranchRecord] = {}
    shared, unresolved = [], []

    def stem(level, path, anchor, start):
        stems.append(StemRecord(level=level, members=[v[1] for v in path if v[0] == "a"],
                                anchor=anchor, start=start, nodes=list(path)))

    fZ, fZ1 = face_at(params.Z), face_at(params.Z1)
    if fZ is None or fZ1 is None:
        raise ConstructionError("a corner of Delta is an arc contact")
    B0 = tree.path(fZ, fZ1)
    stem(0, B0, None, "Z")
    stem_nodes = set(B0)
    b0_check = False

    Y0 = inverse(params, params.Z)
    fY0 = face_at(Y0)
    if fY0 is None:
        unresolved.append(Unresolved(0, 1, "Y0 is an arc contact"))
    else:
        alpha = tree.project(fY0, set(B0))
        if tree.degree(alpha) < 3:
            unresolved.append(Unresolved(0, 1, "projection of Y0 onto B0 is not a branch node"))
        else:
            branches[alpha] = BranchRecord(alpha[0], alpha[1], tree.degree(alpha), 0)
            B1 = tree.path(alpha, fY0)
            stem(1, B1, alpha, "Y^0_1")
            b0_check = set(B0) & set(B1) == {alpha}
            stem_nodes |= set(B1)

    for k in range(1, n_levels + 1):
        groups = boundary_points_of_preimage(params, k)
        frozen = set(stem_nodes)
        ys = []
        dup = set()
        for g in groups:
            for i, p in enumerate(g):
                ys.append(p)
                if 0 < i < len(g) - 1:
                    ys.append(p)  # a touch closes one piece and opens the next
                    dup.add(len(ys))  # 1-based index of the second copy
        for p_idx in range(1, len(ys) + 1, 2):
            if p_idx in dup:
                continue  # Y_{2i} = Y_{2i+1}: no branch point attached
            y = ys[p_idx - 1]
            fy = face_at(y)
            if fy is None:
                unresolved.append(Unresolved(k, p_idx, "boundary point is an arc contact"))
                continue
            if fy in frozen:
                unresolved.append(Unresolved(k, p_idx, "face of the boundary point already lies on a stem"))
                continue
            alpha = tree.project(fy, frozen)
            if tree.degree(alpha) < 3:
                unresolved.append(Unresolved(k, p_idx, "projection is a node of order 2"))
                continue
            if alpha in branches:
                shared.append((k, p_idx, alpha))
                continue
            branches[alpha] = BranchRecord(alpha[0], alpha[1], tree.degree(alpha), k)
            path = tree.path(alpha, fy)
            stem(k + 1, path, alpha, f"Y^{k}_{p_idx}")
            stem_nodes |= set(path)

    br = sorted(branches.values(), key=lambda r: (r.level, r.kind, r.id))
    violations = interleaving_violations(tree, br)
    return StemsResult(depth=n, stems=stems, branches=br, shared=shared, unresolved=unresolved,
                       b0_check=b0_check, interleaving_violations=violations, tree=tree)


def interleaving_violations(tree: FiniteTree, branches: Sequence[BranchRecord]) -> List[Tuple[int, int]]:
    """Pairs of same-level (>= 1) branch nodes with no smaller-level branch strictly between them."""
    level = {b.node: b.level for b in branches}
    by_level: Dict[int, List[tuple]] = {}
    for b in branches:
        if b.level >= 1:
            by_level.setdefault(b.level, []).append(b.node)
    bad = []
    for lv, nodes in sorted(by_level.items()):
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                path = tree.path(nodes[i], nodes[j])
                if not any(level.get(v, lv) < lv for v in path[1:-1]):
                    bad.append((nodes[i], nodes[j]))
    return bad


# -- induced map ---------------------------------------------------------------------------


class ArcLocator:
    """Finds the arc of a family whose polyline contains a given point (exact)."""

    def __init__(self, arcs: Sequence[GammaArc], cells: int = 64):
        self.segs = []
        boxes = []
        for a in arcs:
            for p, q in zip(a.polyline, a.polyline[1:]):
                self.segs.append((a.id, p, q))
                boxes.append(_seg_box(p, q))
        b = np.array(boxes) if boxes else np.zeros((0, 4))
        self.lo = b[:, :2].min(0) if len(b) else np.zeros(2)
        hi = b[:, 2:].max(0) if len(b) else np.ones(2)
        self.h = max(float((hi - self.lo).max()) / cells, 1e-12)
        self.grid: Dict[Tuple[int, int], List[int]] = {}
        tol = 1e-9
        for i, (x0, y0, x1, y1) in enumerate(boxes):
            for ix in range(self._c(x0 - tol, 0), self._c(x1 + tol, 0) + 1):
                for iy in range(self._c(y0 - tol, 1), self._c(y1 + tol, 1) + 1):
                    self.grid.setdefault((ix, iy), []).append(i)

    def _c(self, v, axis):
        return int(np.floor((v - self.lo[axis]) / self.h))

    def locate(self, p: QPoint) -> set:
        x, y = p.approx()
        out = set()
        for i in self.grid.get((self._c(x, 0), self._c(y, 1)), ()):
            aid, a, b = self.segs[i]
            if aid not in out and on_segment(p, a, b):
                out.add(aid)
        if not out:
            # float cell rounding at a cell edge: scan the neighbourhood
            cx, cy = self._c(x, 0), self._c(y, 1)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for i in self.grid.get((cx + dx, cy + dy), ()):
                        aid, a, b = self.segs[i]
                        if aid not in out and on_segment(p, a, b):
                            out.add(aid)
        return out


def _image_arc(locator: ArcLocator, image: Sequence[QPoint], source_id: int) -> int:
    common = None
    for v in image:
        ids = locator.locate(v)
        if not ids:
            raise InvariantViolation("image of an arc leaves the previous-depth arcs",
                                     witness={"arc": source_id, "point": v})
        common = ids if common is None else common & ids
        if not common:
            raise InvariantViolation("image of an arc straddles two arcs", witness={"arc": source_id})
    if len(common) != 1:
        raise InvariantViolation("image arc is ambiguous", witness={"arc": source_id, "candidates": sorted(common)})
    return next(iter(common))


def induced_map(params, n: int, fam_n: Optional[GammaFamily] = None,
                fam_prev: Optional[GammaFamily] = None) -> Dict[int, int]:
    """f on arc ids: gamma at depth n -> the depth-(n-1) arc containing L(gamma)."""
    if n < 1:
        raise UsageError("induced map needs n >= 1")
    fam_n = fam_n or gamma_arcs(params, n)
    fam_prev = fam_prev or gamma_arcs(params, n - 1)
    loc = ArcLocator(fam_prev.arcs)
    out = {}
    for g in fam_n.arcs:
        out[g.id] = _image_arc(loc, forward_polyline(params, g.polyline), g.id)
    return out


def map_arcs_by_power(params, fam_src: GammaFamily, fam_dst: GammaFamily, power: int) -> Dict[int, int]:
    """Locate L^power(gamma) in the target family directly."""
    loc = ArcLocator(fam_dst.arcs)
    out = {}
    for g in fam_src.arcs:
        pl = g.polyline
        for _ in range(power):
            pl = forward_polyline(params, pl)
        out[g.id] = _image_arc(loc, pl, g.id)
    return out


def preimage_components(params, fam_n: GammaFamily, fam_prev: GammaFamily) -> Dict[int, List[int]]:
    """For each depth-(n-1) arc, the depth-n arcs among the components of L^-1(gamma) ∩ Delta."""
    by_ends = {}
    for g in fam_n.arcs:
        by_ends[frozenset(g.endpoints)] = g.id
    out = {}
    for g in fam_prev.arcs:
        ids = []
        for comp in clip_polyline_to_polygon(inverse_polyline(params, g.polyline), params.delta):
            key = frozenset((comp.points[0], comp.points[-1]))
            if key not in by_ends:
                raise InvariantViolation("preimage component is not a depth-n arc", witness={"arc": g.id})
            ids.append(by_ends[key])
        out[g.id] = sorted(ids)
    return out


# -- accumulation ----------------------------------------------------------------------------


def hausdorff(pl1: Sequence[QPoint], pl2: Sequence[QPoint], h: float = 1e-3) -> float:
    """Float Hausdorff distance between polylines (vertices densified at spacing h)."""
    A = np.array([p.approx() for p in pl1])
    B = np.array([p.approx() for p in pl2])
    da = point_to_polyline(densify(A, h), B).max()
    db = point_to_polyline(densify(B, h), A).max()
    return float(max(da, db))


@dataclass
class AccumulationWitness:
    found: bool
    depth: Optional[int]
    arc_id: int
    witnesses: Tuple[Optional[int], Optional[int]]
    distances: Tuple[Optional[float], Optional[float]]
    sides: Tuple[Optional[int], Optional[int]]  # face ids next to gamma on each side


GUARD = 1e-9


def accumulation_witness(params, arc_id: int, eps: float, max_depth: int = 12,
                         start_depth: int = 0) -> AccumulationWitness:
    """Search depths for arcs within Hausdorff distance eps on both sides of an arc."""
    if eps <= 0:
        raise UsageError("eps must be positive")
    stable = grow_stable(params, max_depth)
    last_sides = (None, None)
    for d in range(start_depth, max_depth + 1):
        fam = gamma_arcs(params, d, stable=stable.truncate(d))
        if arc_id >= len(fam.arcs):
            continue
        gamma = fam.arcs[arc_id]
        if gamma.c != 2:
            raise UsageError(f"arc {arc_id} has c = {gamma.c}; accumulation needs c = 2")
        tree = FiniteTree.from_family(fam)
        node = arc_node(arc_id)
        comps = tree.components_without(node)
        faces = tree.adj[node]
        last_sides = (faces[0][1], faces[1][1])
        gf = np.array([p.approx() for p in gamma.polyline])
        best = [None, None]
        for side, face in enumerate(faces):
            comp = next(c for c in comps if face in c)
            for other in sorted(c for c in comp if c[0] == "a"):
                B = fam.arcs[other[1]].polyline
                # vertex-to-polyline distances bound the Hausdorff distance from below
                Bf = np.array([p.approx() for p in B])
                if max(point_to_polyline(Bf, gf).max(), point_to_polyline(gf, Bf).max()) > eps:
                    continue
                dist = hausdorff(gamma.polyline, B, h=eps / 50)
                if dist <= eps - GUARD and (best[side] is None or dist < best[side][1]):
                    best[side] = (other[1], dist)
        if best[0] and best[1]:
            return AccumulationWitness(True, d, arc_id, (best[0][0], best[1][0]), (best[0][1], best[1][1]),
                                       last_sides)
    return AccumulationWitness(False, None, arc_id, (None, None), (None, None), last_sides)
