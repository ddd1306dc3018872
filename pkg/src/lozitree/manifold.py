"""Exact polygonal approximations of the stable and unstable manifolds of X.

The stable line is grown by pullbacks S_{i+1} = L^-1(split_{y=0}(S_i)), the
unstable one by pushforwards with splits at x = 0.  V-points (vertices whose
forward orbit meets the y-axis) get levels from exact forward iteration.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConstructionError, InvariantViolation, ResourceError, UsageError
from .geom2d import QPoint, on_segment, split_polyline_at_axis
from .lozi import eigen_left, eigen_right, forward, inverse

DEFAULT_BUDGET = 10 ** 6
CERTIFY_CAP = 200

CERTIFIED_BASIC = "certified-basic"
CERTIFIED_NONBASIC = "certified-nonbasic"
UNDECIDED = "undecided"


def vertex_budget(budget: Optional[int] = None) -> int:
    """Explicit argument, else LOZITREE_BUDGET, else the default of 10^6."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("LOZITREE_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LOZITREE_BUDGET is not an integer: {env!r}") from None
    return DEFAULT_BUDGET


# -- stable side -----------------------------------------------------------------

def stable_segment0(params) -> List[QPoint]:
    """[X, V0] along the stable eigendirection (1, b/lambda_s) at X.

    The y-axis hit of the eigenline is compared with the closed form V0 and
    must agree exactly.
    """
    lam_s, _ = eigen_right(params)
    X = params.X
    slope = (lam_s.inverse()) * params.b
    y = X.y - X.x * slope
    hit = QPoint(X.x * 0, y)
    if hit != params.V0:
        raise InvariantViolation("stable eigenline misses the closed-form V0", witness={"hit": hit})
    return [X, hit]


@dataclass
class StableApprox:
    """Stable polyline from X through V0 to L^-n(V0), in the order along the manifold."""

    depth: int
    polyline: List[QPoint]
    provenance: List[int]  # pullback step that created each vertex
    prefix_lengths: List[int]  # len of S_0 ... S_n

    def prefix(self, k: int) -> List[QPoint]:
        return self.polyline[: self.prefix_lengths[k]]

    def truncate(self, k: int) -> "StableApprox":
        """The depth-k approximation, shared with this one as a prefix."""
        m = self.prefix_lengths[k]
        return StableApprox(depth=k, polyline=self.polyline[:m], provenance=self.provenance[:m],
                            prefix_lengths=self.prefix_lengths[: k + 1])


def grow_stable(params, n: int, budget: Optional[int] = None) -> StableApprox:
    """S_0 = [X, V0]; S_{i+1} = L^-1(split_{y=0}(S_i)).

    S_i is a prefix of S_{i+1}, so only the part added last is pulled back.
    """
    if n < 0:
        raise UsageError("depth must be >= 0")
    budget = vertex_budget(budget)
    pl = stable_segment0(params)
    prov = [0, 0]
    lengths = [2]
    tail_start = 0  # index of the first vertex of the most recent addition (incl. joint)
    for i in range(1, n + 1):
        tail = pl[tail_start:]
        img = [inverse(params, p) for p in split_polyline_at_axis(tail, "y=0")]
        # the image of the joint vertex is the current end point
        if img[0] != pl[-1] and i > 1:
            raise InvariantViolation("pullback lost the prefix property", witness={"step": i})
        if i == 1:
            # L^-1([X, V0]) = [X, V0, V^-1]
            if img[0] != params.X or img[1] != params.V0:
                raise InvariantViolation("first pullback does not extend [X, V0]")
            new = img[2:]
        else:
            new = img[1:]
        if len(pl) + len(new) > budget:
            raise ResourceError(f"vertex budget {budget} exceeded at stable depth {i}", achieved=i - 1)
        tail_start = len(pl) - 1
        pl.extend(new)
        prov.extend([i] * len(new))
        lengths.append(len(pl))
    return StableApprox(depth=n, polyline=pl, provenance=prov, prefix_lengths=lengths)


@dataclass(frozen=True)
class VPointRec:
    point: QPoint
    index: int  # position on the stable polyline (order along the manifold)
    first_axis_hit: int
    level: int
    basic_status: str
    hits: Tuple[int, ...] = ()


def classify_v_point(params, p: QPoint, cap: int = CERTIFY_CAP):
    """Forward-iterate exactly; return (axis-hit indices, certified?).

    Certification: once an iterate lies on [X, V0] with x > 0 the orbit stays in
    [X, L(V0)], which lies in x > 0, because L maps [X, V0] affinely onto
    [X, L(V0)] with the contracting stable eigenvalue.
    """
    X, V0 = params.X, params.V0
    hits = []
    q = p
    for k in range(cap + 1):
        sx = q.x.sign()
        if sx == 0:
            hits.append(k)
        elif sx > 0 and on_segment(q, X, V0):
            return tuple(hits), True
        q = forward(params, q)
    return tuple(hits), False


def find_v_points(params, stable: StableApprox, cap: int = CERTIFY_CAP) -> List[VPointRec]:
    """Every vertex of the stable polyline after X, with its level.

    The level is one more than the index of the last axis hit (the iterate that
    is a basic V-point).  If the orbit is not certified within ``cap`` steps
    the status is undecided and the level reflects the hits seen so far.
    """
    out = []
    for idx, p in enumerate(stable.polyline):
        if idx == 0:
            continue
        hits, ok = classify_v_point(params, p, cap)
        if not hits:
            raise InvariantViolation("stable vertex is not a V-point", witness={"index": idx})
        if not ok:
            status = UNDECIDED
        elif hits[-1] == 0:
            status = CERTIFIED_BASIC
        else:
            status = CERTIFIED_NONBASIC
        out.append(VPointRec(point=p, index=idx, first_axis_hit=hits[0], level=hits[-1] + 1,
                             basic_status=status, hits=hits))
    return out


def stable_parameters(stable: StableApprox) -> List[float]:
    """Float arclength parameter of each vertex along the polyline (order check aid)."""
    pts = np.array([p.approx() for p in stable.polyline])
    seg = np.sqrt((np.diff(pts, axis=0) ** 2).sum(1))
    return [0.0] + list(np.cumsum(seg))


# -- unstable side ---------------------------------------------------------------

@dataclass
class UnstableApprox:
    """piece_0 = [X, Z]; piece_{i+1} = L(split_{x=0}(piece_i)).

    Even pieces extend the branch through Z, odd pieces the branch through Z^1,
    so U_m = piece_m with piece_{m-1} covers both sides of X.
    """

    depth: int
    pieces: List[List[QPoint]]

    @property
    def branches(self) -> Tuple[List[QPoint], List[QPoint]]:
        m = self.depth
        if m == 0:
            return self.pieces[0], [self.pieces[0][0]]
        return self.pieces[m], self.pieces[m - 1]

    @property
    def polyline(self) -> List[QPoint]:
        b1, b2 = self.branches
        return list(reversed(b2)) + b1[1:]

    def vertices(self) -> set:
        b1, b2 = self.branches
        return set(b1) | set(b2)


def unstable_segment0(params) -> List[QPoint]:
    """[X, Z] along (1, b/lambda_u); the x-axis hit must equal the closed-form Z."""
    _, lam_u = eigen_right(params)
    X = params.X
    slope = lam_u.inverse() * params.b
    x = X.x - X.y / slope
    hit = QPoint(x, X.y * 0)
    if hit != params.Z:
        raise InvariantViolation("unstable eigenline misses the closed-form Z", witness={"hit": hit})
    return [X, hit]


def grow_unstable(params, m: int, budget: Optional[int] = None) -> UnstableApprox:
    if m < 0:
        raise UsageError("depth must be >= 0")
    budget = vertex_budget(budget)
    pieces = [unstable_segment0(params)]
    for i in range(1, m + 1):
        nxt = [forward(params, p) for p in split_polyline_at_axis(pieces[-1], "x=0")]
        if len(nxt) + len(pieces[-1]) > budget:
            raise ResourceError(f"vertex budget {budget} exceeded at unstable depth {i}", achieved=i - 1)
        pieces.append(nxt)
    return UnstableApprox(depth=m, pieces=pieces)


# -- basin anchors ---------------------------------------------------------------

@dataclass
class BasinAnchors:
    N: QPoint
    M: QPoint
    N_pullbacks: List[QPoint]  # N^-1, ..., N^-depth
    M_pullbacks: List[QPoint]
    C: QPoint  # where the upward branch of W^s_Y meets the x-axis


def basin_anchors(params, depth: int = 1) -> BasinAnchors:
    """N and M on W^s_Y, the stable manifold of Y, plus pullbacks.

    The downward half of the stable eigenline at Y meets the y-axis at N; the
    upward half meets the x-axis at C with L^-1(C) = N.  Beyond N the manifold
    is L^-1 of the upper-half-plane segment [C, N^-1], a straight segment
    [N, N^-2] whose x-axis crossing is M.
    """
    lam_s, _ = eigen_left(params)
    Y = params.Y
    slope = lam_s.inverse() * params.b  # dy/dx along the eigenline
    if slope.sign() >= 0:
        raise ConstructionError("stable eigendirection at Y does not descend to the right")
    zero = Y.x * 0
    N = QPoint(zero, Y.y - Y.x * slope)
    C = QPoint(Y.x - Y.y / slope, zero)
    if inverse(params, C) != N:
        raise InvariantViolation("L^-1(C) != N", witness={"C": C, "N": N})
    N1 = inverse(params, N)
    N2 = inverse(params, N1)
    if N.y.sign() >= 0 or N2.y.sign() <= 0:
        raise ConstructionError("segment [N, N^-2] does not cross the x-axis")
    t = N.y / (N.y - N2.y)
    M = QPoint(N.x + (N2.x - N.x) * t, zero)
    Np, Mp = [], []
    p, q = N, M
    for _ in range(max(depth, 1)):
        p = inverse(params, p)
        q = inverse(params, q)
        Np.append(p)
        Mp.append(q)
    return BasinAnchors(N=N, M=M, N_pullbacks=Np, M_pullbacks=Mp, C=C)


# -- orbit density ---------------------------------------------------------------

def lozi_float_orbit(a: float, b: float, x: float, y: float, n: int) -> np.ndarray:
    """n + 1 float iterates starting at (x, y), as an (n+1, 2) array."""
    xs = [0.0] * (n + 1)
    ys = [0.0] * (n + 1)
    xs[0], ys[0] = x, y
    for i in range(1, n + 1):
        x, y = 1.0 + y - a * abs(x), b * x
        xs[i] = x
        ys[i] = y
    return np.column_stack([np.array(xs), np.array(ys)])


def grid_cells(points: np.ndarray, origin: Tuple[float, float], eps: float) -> set:
    ij = np.floor((points - np.asarray(origin)) / eps).astype(np.int64)
    codes = np.unique(ij[:, 0] * 1_000_003 + ij[:, 1])
    return set(codes.tolist())


def orbit_density_diagnostic(params, segment: Sequence[QPoint], iterations: int, eps: float,
                             reference: Optional[set] = None, return_cells: bool = False):
    """Fraction of eps-grid cells near the attractor visited by the float orbit.

    The orbit starts at the midpoint of ``segment`` (a piece of the unstable
    approximation).  Without ``reference`` the denominator is the number of
    grid cells over Delta's bounding box whose centre lies in Delta; with a
    reference cell set (say, from a longer run) it is the fraction of those
    reference cells that were visited.
    """
    if iterations < 0 or eps <= 0:
        raise UsageError("iterations must be >= 0 and eps > 0")
    p, q = segment[0].approx(), segment[-1].approx()
    x0, y0 = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
    pts = lozi_float_orbit(float(params.a), float(params.b), x0, y0, iterations)
    x_lo, y_lo, _, _ = params.delta.bbox()
    origin = (x_lo, y_lo)
    cells = grid_cells(pts, origin, eps)
    if reference is not None:
        denom = len(reference)
        frac = len(cells & reference) / denom if denom else 0.0
    else:
        cand = _delta_cells(params, origin, eps)
        frac = len(cells & cand) / len(cand) if cand else 0.0
    frac = min(1.0, frac)
    return (frac, cells) if return_cells else frac


def _delta_cells(params, origin, eps) -> set:
    x_lo, y_lo, x_hi, y_hi = params.delta.bbox()
    nx = int(math.ceil((x_hi - x_lo) / eps))
    ny = int(math.ceil((y_hi - y_lo) / eps))
    tri = np.array([v.approx() for v in params.delta.vertices])
    out = set()
    for i in range(nx):
        for j in range(ny):
            cx = origin[0] + (i + 0.5) * eps
            cy = origin[1] + (j + 0.5) * eps
            if _in_tri(cx, cy, tri):
                out.add(i * 1_000_003 + j)
    return out


def _in_tri(x, y, tri) -> bool:
    s = []
    for k in range(3):
        ax, ay = tri[k]
        bx, by = tri[(k + 1) % 3]
        s.append((bx - ax) * (y - ay) - (by - ay) * (x - ax))
    return all(v >= 0 for v in s) or all(v <= 0 for v in s)
