"""Exact planar geometry over QScalar coordinates.

Primitives (orientation, segment intersection, point location), fold-line
splitting of polylines, polyline clipping against a simple polygon, and the
disk-subdivision kernel :func:`subdivide` that cuts a polygon by pairwise
disjoint arcs and reports faces and face/arc incidence.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvariantViolation, UsageError
from .qfield import QScalar

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"

TANGENTIAL = "tangential"
TRANSVERSAL = "transversal"


class QPoint:
    """A point with QScalar coordinates.  Equality and hashing are exact."""

    __slots__ = ("x", "y", "_f")

    def __init__(self, x: QScalar, y: QScalar):
        if x.D != y.D:
            raise UsageError("point coordinates must share the radicand")
        self.x = x
        self.y = y
        self._f = None

    @property
    def D(self):
        return self.x.D

    def __iter__(self):
        yield self.x
        yield self.y

    def __eq__(self, other):
        return isinstance(other, QPoint) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"QPoint({self.x}, {self.y})"

    def approx(self) -> Tuple[float, float]:
        f = self._f
        if f is None:
            f = self._f = (self.x.to_float(), self.y.to_float())
        return f

    def __sub__(self, other):
        return (self.x - other.x, self.y - other.y)

    def __getstate__(self):
        return (self.x, self.y)

    def __setstate__(self, state):
        self.x, self.y = state
        self._f = None


def qpoint(x, y, D) -> QPoint:
    """Build a point from rationals (or QScalars) in Q(sqrt(D))."""
    if not isinstance(x, QScalar):
        x = QScalar(x, 0, D)
    if not isinstance(y, QScalar):
        y = QScalar(y, 0, D)
    return QPoint(x, y)


QPolyline = List[QPoint]


# -- basic predicates ------------------------------------------------------------

def cross(ux, uy, vx, vy):
    return ux * vy - uy * vx


def orient(a: QPoint, b: QPoint, c: QPoint) -> int:
    """+1 if a, b, c turn counterclockwise, -1 clockwise, 0 collinear."""
    return ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).sign()


def _between(v, lo, hi) -> bool:
    if lo > hi:
        lo, hi = hi, lo
    return lo <= v <= hi


def on_segment(p: QPoint, a: QPoint, b: QPoint) -> bool:
    """True if p lies on the closed segment [a, b]."""
    if orient(a, b, p) != 0:
        return False
    if a.x != b.x:
        return _between(p.x, a.x, b.x)
    return _between(p.y, a.y, b.y)


def segment_param(p: QPoint, a: QPoint, b: QPoint) -> QScalar:
    """Parameter t with p = a + t (b - a), for p on the line through a, b."""
    dx, dy = b.x - a.x, b.y - a.y
    return ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)


def lerp(a: QPoint, b: QPoint, t) -> QPoint:
    return QPoint(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def segment_intersect(p1: QPoint, p2: QPoint, q1: QPoint, q2: QPoint):
    """Exact intersection of closed segments [p1,p2] and [q1,q2].

    Returns None, a QPoint, or a tuple (start, end) for a collinear overlap
    (ordered along p1 -> p2).
    """
    if p1 == p2 or q1 == q2:
        raise UsageError("degenerate segment")
    o1 = orient(p1, p2, q1)
    o2 = orient(p1, p2, q2)
    o3 = orient(q1, q2, p1)
    o4 = orient(q1, q2, p2)
    if o1 == 0 and o2 == 0:
        # collinear: intersect parameter intervals along p1 -> p2
        t1 = segment_param(q1, p1, p2)
        t2 = segment_param(q2, p1, p2)
        lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
        zero = QScalar._raw(Fraction(0), Fraction(0), p1.D)
        one = QScalar._raw(Fraction(1), Fraction(0), p1.D)
        a = lo if lo > zero else zero
        b = hi if hi < one else one
        if a > b:
            return None
        pa = p1 if a == zero else (p2 if a == one else lerp(p1, p2, a))
        if a == b:
            return pa
        pb = p2 if b == one else lerp(p1, p2, b)
        return (pa, pb)
    if o1 * o2 > 0 or o3 * o4 > 0:
        return None
    # touching at an endpoint: return it exactly
    if o1 == 0:
        return q1
    if o2 == 0:
        return q2
    if o3 == 0:
        return p1
    if o4 == 0:
        return p2
    dx, dy = p2.x - p1.x, p2.y - p1.y
    ex, ey = q2.x - q1.x, q2.y - q1.y
    t = cross(q1.x - p1.x, q1.y - p1.y, ex, ey) / cross(dx, dy, ex, ey)
    return QPoint(p1.x + dx * t, p1.y + dy * t)


# -- polygons ----------------------------------------------------------------------

def signed_area2(vertices: Sequence[QPoint]) -> QScalar:
    """Twice the signed area (shoelace), exact."""
    n = len(vertices)
    acc = vertices[0].x * 0
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        acc = acc + (a.x * b.y - a.y * b.x)
    return acc


class QPolygon:
    """A closed simple polygon stored counterclockwise.

    Clockwise input is reversed; ``reversed_input`` records that so callers
    that care about the original traversal can recover it.
    """

    __slots__ = ("vertices", "reversed_input")

    def __init__(self, vertices: Sequence[QPoint], check_simple: bool = False):
        verts = list(vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts.pop()
        verts = _dedupe_consecutive(verts)
        if len(verts) < 3:
            raise UsageError("polygon needs at least three distinct vertices")
        s = signed_area2(verts).sign()
        if s == 0:
            raise UsageError("polygon has zero area")
        self.reversed_input = s < 0
        if s < 0:
            verts.reverse()
        self.vertices = tuple(verts)
        if check_simple and not is_simple_closed(self.vertices):
            raise UsageError("polygon is not simple")

    def edges(self):
        v = self.vertices
        n = len(v)
        for i in range(n):
            yield v[i], v[(i + 1) % n]

    def __len__(self):
        return len(self.vertices)

    def area(self) -> QScalar:
        return signed_area2(self.vertices) / 2

    def bbox(self):
        xs = [p.approx()[0] for p in self.vertices]
        ys = [p.approx()[1] for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def _dedupe_consecutive(pts):
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    return out


def point_in_polygon(p: QPoint, poly: QPolygon) -> str:
    """Exact classification: INSIDE, BOUNDARY or OUTSIDE (winding number)."""
    wn = 0
    py = p.y
    for a, b in poly.edges():
        ay, by = a.y, b.y
        lo_y, hi_y = (ay, by) if ay <= by else (by, ay)
        if lo_y <= py <= hi_y:
            if on_segment(p, a, b):
                return BOUNDARY
        if ay <= py:
            if by > py and orient(a, b, p) > 0:
                wn += 1
        elif by <= py and orient(a, b, p) < 0:
            wn -= 1
    return INSIDE if wn else OUTSIDE


def boundary_position(p: QPoint, poly: QPolygon):
    """(edge index, parameter in [0,1)) of a point on the boundary, else None.

    Corners are reported as the start (t = 0) of the edge leaving them.
    """
    v = poly.vertices
    n = len(v)
    for i in range(n):
        if p == v[i]:
            return (i, p.x * 0)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        if on_segment(p, a, b):
            return (i, segment_param(p, a, b))
    return None


# -- fold splitting ----------------------------------------------------------------

def split_polyline_at_axis(pl: Sequence[QPoint], axis) -> QPolyline:
    """Insert the crossing points of ``pl`` with the axis line(s).

    ``axis`` is ``"x=0"``, ``"y=0"`` or an iterable of both.  Afterwards every
    edge lies in one closed half-plane of each requested axis.
    """
    axes = (axis,) if isinstance(axis, str) else tuple(axis)
    out = list(pl)
    for ax in axes:
        if ax not in ("x=0", "y=0"):
            raise UsageError(f"unknown axis {ax!r}")
        out = _split_one(out, ax)
    return out


def _split_one(pl, ax):
    if not pl:
        return []
    coord = (lambda p: p.x) if ax == "x=0" else (lambda p: p.y)
    out = [pl[0]]
    prev = pl[0]
    sp = coord(prev).sign()
    for q in pl[1:]:
        sq = coord(q).sign()
        if sp * sq < 0:
            cp, cq = coord(prev), coord(q)
            t = cp / (cp - cq)
            m = lerp(prev, q, t)
            # land exactly on the axis
            if ax == "x=0":
                m = QPoint(m.x * 0, m.y)
            else:
                m = QPoint(m.x, m.y * 0)
            out.append(m)
        out.append(q)
        prev, sp = q, sq
    return out


# -- segment sweep for intersection candidates ------------------------------------

def candidate_pairs(boxes: Sequence[Tuple[float, float, float, float]], pad: float = 1e-9):
    """Indices (i, j), i < j, of boxes whose padded extents overlap."""
    order = sorted(range(len(boxes)), key=lambda i: boxes[i][0])
    active: list = []
    out = []
    for i in order:
        x0, y0, x1, y1 = boxes[i]
        tol = pad * (1.0 + abs(x0) + abs(x1) + abs(y0) + abs(y1))
        active = [j for j in active if boxes[j][2] + tol >= x0 - tol]
        for j in active:
            bj = boxes[j]
            if bj[1] - tol <= y1 + tol and y0 - tol <= bj[3] + tol:
                out.append((j, i) if j < i else (i, j))
        active.append(i)
    return out


def _seg_box(a: QPoint, b: QPoint):
    ax, ay = a.approx()
    bx, by = b.approx()
    return (min(ax, bx), min(ay, by), max(ax, bx), max(ay, by))


def is_simple_open(pl: Sequence[QPoint]) -> bool:
    """True if the polyline has no self-intersections (adjacent edges may share their vertex)."""
    segs = list(zip(pl, pl[1:]))
    if any(a == b for a, b in segs):
        return False
    boxes = [_seg_box(a, b) for a, b in segs]
    for i, j in candidate_pairs(boxes):
        hit = segment_intersect(segs[i][0], segs[i][1], segs[j][0], segs[j][1])
        if hit is None:
            continue
        if j == i + 1 and isinstance(hit, QPoint) and hit == segs[i][1]:
            continue
        return False
    return True


def is_simple_closed(verts: Sequence[QPoint]) -> bool:
    n = len(verts)
    segs = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    boxes = [_seg_box(a, b) for a, b in segs]
    for i, j in candidate_pairs(boxes):
        hit = segment_intersect(segs[i][0], segs[i][1], segs[j][0], segs[j][1])
        if hit is None:
            continue
        adjacent = j == i + 1 or (i == 0 and j == n - 1)
        if adjacent and isinstance(hit, QPoint):
            continue
        return False
    return True


# -- clipping ------------------------------------------------------------------------

@dataclass
class Touch:
    """An interior contact of a clipped component with the polygon boundary."""

    point: QPoint
    kind: str  # TANGENTIAL (no crossing) or TRANSVERSAL
    grazing: bool = False  # the component runs along the boundary here
    index: int = 0  # vertex index inside the component polyline


@dataclass
class ClipComponent:
    """A maximal connected piece of a polyline inside a closed polygon."""

    points: List[QPoint]
    start_kind: str  # "boundary" or "tip"
    end_kind: str
    touches: List[Touch] = field(default_factory=list)
    # (segment index, parameter) of the first and last point in the source polyline
    source_start: Tuple[int, QScalar] = None
    source_end: Tuple[int, QScalar] = None

    @property
    def complete(self) -> bool:
        return self.start_kind == "boundary" and self.end_kind == "boundary"


def _edge_hits(a: QPoint, b: QPoint, poly: QPolygon):
    """Sorted distinct parameters along [a,b] where it meets the polygon boundary."""
    ts = []
    pb = _seg_box(a, b)
    for e0, e1 in poly.edges():
        eb = _seg_box(e0, e1)
        tol = 1e-9 * (1 + abs(pb[0]) + abs(pb[2]) + abs(pb[1]) + abs(pb[3]))
        if eb[0] > pb[2] + tol or eb[2] < pb[0] - tol or eb[1] > pb[3] + tol or eb[3] < pb[1] - tol:
            continue
        hit = segment_intersect(a, b, e0, e1)
        if hit is None:
            continue
        if isinstance(hit, QPoint):
            ts.append(segment_param(hit, a, b))
        else:
            ts.append(segment_param(hit[0], a, b))
            ts.append(segment_param(hit[1], a, b))
    ts = sorted(set(ts))
    return ts


def clip_polyline_to_polygon(pl: Sequence[QPoint], poly: QPolygon) -> List[ClipComponent]:
    """Maximal connected pieces of ``pl`` inside the closed polygon, in polyline order."""
    if len(pl) < 2:
        raise UsageError("polyline needs at least two vertices")
    D = pl[0].D
    zero = QScalar._raw(Fraction(0), Fraction(0), D)
    one = QScalar._raw(Fraction(1), Fraction(0), D)
    half = Fraction(1, 2)

    # pieces: (segment index, t0, t1, P0, P1, state) with state INSIDE/BOUNDARY/OUTSIDE
    pieces = []
    for i in range(len(pl) - 1):
        a, b = pl[i], pl[i + 1]
        ts = [t for t in _edge_hits(a, b, poly) if zero < t < one]
        params = [zero] + ts + [one]
        pts = [a] + [lerp(a, b, t) for t in ts] + [b]
        for k in range(len(params) - 1):
            mid = lerp(a, b, (params[k] + params[k + 1]) * half)
            state = point_in_polygon(mid, poly)
            pieces.append((i, params[k], params[k + 1], pts[k], pts[k + 1], state))

    comps: List[ClipComponent] = []
    run: list = []

    def flush():
        if not run:
            return
        comps.append(_make_component(run, pl, poly))
        run.clear()

    for pc in pieces:
        if pc[5] == OUTSIDE:
            flush()
        else:
            run.append(pc)
    flush()
    return comps


def _make_component(run, pl, poly) -> ClipComponent:
    pts = [run[0][3]]
    grazing_flags = []  # per piece
    for pc in run:
        pts.append(pc[4])
        grazing_flags.append(pc[5] == BOUNDARY)
    first, last = run[0], run[-1]
    start_at_tip = first[0] == 0 and first[1] == 0
    end_at_tip = last[0] == len(pl) - 2 and last[2] == 1
    start_state = point_in_polygon(pts[0], poly)
    end_state = point_in_polygon(pts[-1], poly)
    start_kind = "tip" if (start_at_tip and start_state == INSIDE) else "boundary"
    end_kind = "tip" if (end_at_tip and end_state == INSIDE) else "boundary"

    # interior boundary contacts: maximal runs of boundary vertices / grazing pieces
    on_b = [point_in_polygon(p, poly) == BOUNDARY for p in pts]
    touches = []
    n = len(pts)
    k = 1
    while k < n - 1:
        if not on_b[k]:
            k += 1
            continue
        # extend across grazing pieces
        j = k
        grazing = False
        while j < n - 1 and grazing_flags[j]:
            grazing = True
            j += 1
        if j >= n - 1:
            break  # contact run reaches the end point: part of the endpoint
        if k > 0 and grazing_flags[k - 1]:
            # run started at the start endpoint
            k = j + 1
            continue
        kind = _touch_kind(pts[k - 1], pts[k], pts[j], pts[j + 1], poly)
        touches.append(Touch(point=pts[k], kind=kind, grazing=grazing, index=k))
        k = j + 1
    pts = _dedupe_consecutive(pts)
    # re-index touches after dedupe
    for t in touches:
        t.index = pts.index(t.point)
    return ClipComponent(
        points=pts,
        start_kind=start_kind,
        end_kind=end_kind,
        touches=touches,
        source_start=(first[0], first[1]),
        source_end=(last[0], last[2]),
    )


def _touch_kind(u: QPoint, p: QPoint, q: QPoint, w: QPoint, poly: QPolygon) -> str:
    """TANGENTIAL if the neighbours stay on one closed side of a supporting boundary line."""
    lines = []
    for a, b in poly.edges():
        if on_segment(p, a, b) or on_segment(q, a, b):
            lines.append((a, b))
    for a, b in lines:
        s1 = orient(a, b, u)
        s2 = orient(a, b, w)
        if s1 * s2 >= 0:
            return TANGENTIAL
    return TRANSVERSAL


# -- subdivision ---------------------------------------------------------------------

@dataclass
class Face:
    id: int
    # fragments: ("boundary", boundary edge index) or ("chord", chord index, forward)
    fragments: List[tuple]
    key: tuple = ()


@dataclass
class Chord:
    arc: int
    index: int  # position along the arc
    points: List[QPoint]


@dataclass
class Subdivision:
    """Faces of a polygon cut by pairwise disjoint arcs with endpoints on its boundary."""

    polygon: QPolygon
    arcs: List[List[QPoint]]
    contacts: List[List[List[QPoint]]]  # per arc: contact groups (runs on the boundary)
    chords: List[Chord]
    faces: List[Face]
    arc_faces: List[Tuple[int, ...]]
    chord_sides: List[Tuple[int, int]]  # per chord: (left face, right face) along the arc
    boundary_vertices: List[QPoint]
    boundary_keys: list
    boundary_edge_face: List[int]
    euler: Tuple[int, int, int]

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def face_degree(self, arc: int) -> int:
        return len(self.arc_faces[arc])

    def incidence_edges(self):
        return [(k, f) for k, fs in enumerate(self.arc_faces) for f in fs]

    def arc_chords(self, arc: int) -> List[int]:
        return [i for i, c in enumerate(self.chords) if c.arc == arc]

    def face_of_boundary_point(self, p: QPoint) -> Optional[int]:
        """Face adjacent to a boundary point; None if the point is an arc contact."""
        pos = boundary_position(p, self.polygon)
        if pos is None:
            raise UsageError("point is not on the polygon boundary")
        key = _pos_key(pos)
        keys = self.boundary_keys
        nb = len(keys)
        lo, hi = 0, nb
        while lo < hi:
            mid = (lo + hi) // 2
            if _key_lt(keys[mid], key):
                lo = mid + 1
            else:
                hi = mid
        if lo < nb and _key_eq(keys[lo], key):
            if self.boundary_vertices[lo] in self._contact_set():
                return None
            return self.boundary_edge_face[lo]
        return self.boundary_edge_face[(lo - 1) % nb]

    def _contact_set(self):
        s = getattr(self, "_cset", None)
        if s is None:
            s = {p for groups in self.contacts for g in groups for p in g}
            self._cset = s
        return s

    def face_points(self, fid: int) -> np.ndarray:
        pts = []
        nb = len(self.boundary_vertices)
        for frag in self.faces[fid].fragments:
            if frag[0] == "boundary":
                e = frag[1]
                pts.append(self.boundary_vertices[e].approx())
                pts.append(self.boundary_vertices[(e + 1) % nb].approx())
            else:
                pts.extend(p.approx() for p in self.chords[frag[1]].points)
        return np.array(pts, dtype=float)

    def face_diameter(self, fid: int) -> float:
        return point_set_diameter(self.face_points(fid))


# -- float helpers (diagnostics only) ---------------------------------------------

def densify(pts: np.ndarray, h: float) -> np.ndarray:
    """Float polyline resampled so consecutive points are at most h apart."""
    out = [pts[:1]]
    for p, q in zip(pts[:-1], pts[1:]):
        k = max(1, int(np.ceil(np.linalg.norm(q - p) / h)))
        t = np.linspace(0, 1, k + 1)[1:, None]
        out.append(p + t * (q - p))
    return np.vstack(out)


def point_to_polyline(pts: np.ndarray, pl: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Distance from each float point to a float polyline."""
    pl = np.asarray(pl, dtype=float)
    if len(pl) == 1:
        return np.sqrt(((pts - pl[0]) ** 2).sum(-1))
    a = pl[:-1][None, :, :]
    d = (pl[1:] - pl[:-1])[None, :, :]
    L2 = (d ** 2).sum(-1)
    L2 = np.where(L2 > 0, L2, 1)
    out = np.empty(len(pts))
    for i in range(0, len(pts), chunk):
        p = pts[i:i + chunk, None, :]
        t = np.clip(((p - a) * d).sum(-1) / L2, 0, 1)
        proj = a + t[..., None] * d
        out[i:i + chunk] = np.sqrt(((p - proj) ** 2).sum(-1)).min(1)
    return out


def point_set_diameter(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    hull = convex_hull(pts)
    if len(hull) < 2:
        return 0.0
    diff = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def convex_hull(pts: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain on float points."""
    P = np.unique(pts, axis=0)
    if len(P) <= 2:
        return P

    def half(points):
        h = []
        for p in points:
            while len(h) >= 2 and (h[-1][0] - h[-2][0]) * (p[1] - h[-2][1]) - (h[-1][1] - h[-2][1]) * (p[0] - h[-2][0]) <= 0:
                h.pop()
            h.append(tuple(p))
        return h

    lower = half(P)
    upper = half(P[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _pos_key(pos):
    return pos


def _key_lt(a, b) -> bool:
    if a[0] != b[0]:
        return a[0] < b[0]
    return a[1] < b[1]


def _key_eq(a, b) -> bool:
    return a[0] == b[0] and a[1] == b[1]


def _cmp_keys(a, b) -> int:
    if a[0] != b[0]:
        return -1 if a[0] < b[0] else 1
    if a[1] == b[1]:
        return 0
    return -1 if a[1] < b[1] else 1


def _angle_cmp(d1, d2) -> int:
    """Counterclockwise angular order of direction vectors, starting at +x."""

    def half(d):
        sy = d[1].sign()
        return 0 if (sy > 0 or (sy == 0 and d[0].sign() > 0)) else 1

    h1, h2 = half(d1), half(d2)
    if h1 != h2:
        return h1 - h2
    c = cross(d1[0], d1[1], d2[0], d2[1]).sign()
    return -c


def subdivide(poly: QPolygon, arcs: Sequence[Sequence[QPoint]], check_disjoint: bool = True) -> Subdivision:
    """Cut ``poly`` by pairwise disjoint arcs whose endpoints lie on its boundary.

    Each arc is split at its boundary contacts into chords; the boundary with
    all contacts inserted plus the chords form a planar graph whose faces are
    traced with half-edges.  Raises UsageError if arcs intersect or an arc
    endpoint is off the boundary, InvariantViolation if Euler's formula fails.
    """
    arcs = [list(a) for a in arcs]
    if check_disjoint:
        _check_disjoint(arcs)

    # contacts of every arc
    contacts = []
    chords: List[Chord] = []
    contact_pos = {}
    for k, arc in enumerate(arcs):
        if len(arc) < 2:
            raise UsageError(f"arc {k} has fewer than two points")
        pos = [boundary_position(p, poly) for p in arc]
        if pos[0] is None or pos[-1] is None:
            raise UsageError(f"arc {k} does not end on the polygon boundary")
        groups = []
        i = 0
        n = len(arc)
        bounds = []  # (first index, last index) of contact groups
        while i < n:
            if pos[i] is None:
                i += 1
                continue
            j = i
            while j + 1 < n and pos[j + 1] is not None and _runs_along(arc[j], arc[j + 1], poly):
                j += 1
            groups.append(arc[i:j + 1])
            bounds.append((i, j))
            for t in range(i, j + 1):
                contact_pos[arc[t]] = pos[t]
            i = j + 1
        contacts.append(groups)
        for g in range(len(bounds) - 1):
            s, e = bounds[g][1], bounds[g + 1][0]
            chords.append(Chord(arc=k, index=g, points=arc[s:e + 1]))

    # boundary vertices: corners plus contact points, sorted along the boundary
    D = poly.vertices[0].D
    bpts = {}
    for i, v in enumerate(poly.vertices):
        bpts[v] = (i, QScalar._raw(Fraction(0), Fraction(0), D))
    for p, ps in contact_pos.items():
        bpts[p] = ps
    items = sorted(bpts.items(), key=functools.cmp_to_key(lambda a, b: _cmp_keys(a[1], b[1])))
    bverts = [p for p, _ in items]
    bkeys = [k for _, k in items]
    vindex = {p: i for i, p in enumerate(bverts)}
    nb = len(bverts)

    # half-edges
    h_origin: List[int] = []
    h_dir: list = []
    h_meta: list = []

    def add_edge(u, v, du, dv, meta_fwd, meta_bwd):
        h_origin.append(u)
        h_dir.append(du)
        h_meta.append(meta_fwd)
        h_origin.append(v)
        h_dir.append(dv)
        h_meta.append(meta_bwd)

    for e in range(nb):
        u, v = bverts[e], bverts[(e + 1) % nb]
        add_edge(e, (e + 1) % nb, v - u, u - v, ("boundary", e, True), ("boundary", e, False))
    for ci, ch in enumerate(chords):
        pts = ch.points
        a, b = pts[0], pts[-1]
        add_edge(vindex[a], vindex[b], pts[1] - pts[0], pts[-2] - pts[-1],
                 ("chord", ci, True), ("chord", ci, False))

    nh = len(h_origin)
    out_lists = [[] for _ in range(nb)]
    for h in range(nh):
        out_lists[h_origin[h]].append(h)
    # rotation order around each vertex
    rot_pos = [0] * nh
    rot = []
    for v in range(nb):
        lst = out_lists[v]
        lst.sort(key=functools.cmp_to_key(lambda h1, h2: _angle_cmp(h_dir[h1], h_dir[h2])))
        for idx, h in enumerate(lst):
            rot_pos[h] = idx
        rot.append(lst)

    def twin(h):
        return h ^ 1

    def nxt(h):
        t = twin(h)
        v = h_origin[t]
        lst = rot[v]
        return lst[(rot_pos[t] - 1) % len(lst)]

    face_of = [-1] * nh
    cycles = []
    for h in range(nh):
        if face_of[h] != -1:
            continue
        cyc = []
        g = h
        fid = len(cycles)
        while face_of[g] == -1:
            face_of[g] = fid
            cyc.append(g)
            g = nxt(g)
        if g != h:
            raise InvariantViolation("half-edge traversal did not close", witness={"start": h})
        cycles.append(cyc)

    outer = face_of[1]  # boundary edge 0 traversed clockwise
    V = nb
    E = nh // 2
    F = len(cycles)
    if V - E + F != 2:
        raise InvariantViolation("Euler characteristic check failed", witness={"V": V, "E": E, "F": F})

    # canonical face numbering: by first boundary edge on the face
    inner = [c for c in range(F) if c != outer]

    def face_key(c):
        edges = [h_meta[h][1] for h in cycles[c] if h_meta[h][0] == "boundary" and h_meta[h][2]]
        return (min(edges) if edges else nb, )

    inner.sort(key=face_key)
    renum = {c: i for i, c in enumerate(inner)}
    faces = []
    for c in inner:
        frags = []
        for h in cycles[c]:
            m = h_meta[h]
            frags.append(m)
        faces.append(Face(id=renum[c], fragments=frags, key=face_key(c)))

    chord_sides = []
    for ci in range(len(chords)):
        hf = 2 * (nb + ci)
        lf, rf = face_of[hf], face_of[hf + 1]
        if lf == outer or rf == outer:
            raise InvariantViolation("chord borders the outer face", witness={"chord": ci})
        chord_sides.append((renum[lf], renum[rf]))
    boundary_edge_face = []
    for e in range(nb):
        f = face_of[2 * e]
        boundary_edge_face.append(renum.get(f, -1))

    arc_faces = []
    for k in range(len(arcs)):
        fs = set()
        for ci, ch in enumerate(chords):
            if ch.arc == k:
                fs.update(chord_sides[ci])
        # arcs running along the boundary also touch the face inside those edges
        for g in contacts[k]:
            for p, q in zip(g, g[1:]):
                e = _boundary_edge_between(vindex[p], vindex[q], nb)
                if e is not None and boundary_edge_face[e] >= 0:
                    fs.add(boundary_edge_face[e])
        arc_faces.append(tuple(sorted(fs)))

    return Subdivision(
        polygon=poly,
        arcs=arcs,
        contacts=contacts,
        chords=chords,
        faces=faces,
        arc_faces=arc_faces,
        chord_sides=chord_sides,
        boundary_vertices=bverts,
        boundary_keys=bkeys,
        boundary_edge_face=boundary_edge_face,
        euler=(V, E, F),
    )


def _boundary_edge_between(i, j, nb):
    if (i + 1) % nb == j:
        return i
    if (j + 1) % nb == i:
        return j
    return None


def _runs_along(p: QPoint, q: QPoint, poly: QPolygon) -> bool:
    for a, b in poly.edges():
        if on_segment(p, a, b) and on_segment(q, a, b):
            return True
    return False


def _check_disjoint(arcs):
    segs = []
    owner = []
    for k, arc in enumerate(arcs):
        for a, b in zip(arc, arc[1:]):
            segs.append((a, b))
            owner.append(k)
    boxes = [_seg_box(a, b) for a, b in segs]
    for i, j in candidate_pairs(boxes):
        if owner[i] == owner[j]:
            continue
        if segment_intersect(segs[i][0], segs[i][1], segs[j][0], segs[j][1]) is not None:
            raise UsageError(f"arcs {owner[i]} and {owner[j]} intersect")
