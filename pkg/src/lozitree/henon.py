"""Floating-point Hénon companion: H(x, y) = (1 - a x^2 + y, b x).

Fixed point, Jacobian, and one-dimensional manifold growth in the style of
Krauskopf and Osinga: a new point is the image of an interpolated point of the
part already computed, with step size adapted to angle and flatness.  The
growth never revisits accepted points, so a larger arclength budget only
extends a trace.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .errors import DomainError, UsageError


@dataclass(frozen=True)
class HenonParams:
    a: float
    b: float
    P: Tuple[float, float]
    eigenvalues: Tuple[float, float]  # (stable, unstable) of DH(P)
    eigenvectors: Tuple[Tuple[float, float], Tuple[float, float]]


def henon(a: float, b: float, p):
    x, y = p
    return (1.0 - a * x * x + y, b * x)


def henon_inverse(a: float, b: float, p):
    """H^-1(x, y) = (y/b, x - 1 + a (y/b)^2)."""
    x, y = p
    u = y / b
    return (u, x - 1.0 + a * u * u)


def jacobian(a: float, b: float, p) -> np.ndarray:
    return np.array([[-2.0 * a * p[0], 1.0], [b, 0.0]])


def henon_fixed_point(a: float, b: float) -> Tuple[float, float]:
    """The fixed point with P_x = (-(1-b) + sqrt((1-b)^2 + 4a)) / (2a)."""
    a, b = float(a), float(b)
    disc = (1.0 - b) ** 2 + 4.0 * a
    if disc < 0:
        raise DomainError("no real fixed point: (1-b)^2 + 4a < 0")
    if a == 0:
        if b == 1:
            raise DomainError("no fixed point for a = 0, b = 1")
        x = 1.0 / (1.0 - b)
    else:
        # rationalised root avoids cancellation when a is small
        x = 2.0 / ((1.0 - b) + math.sqrt(disc))
    return (x, b * x)


def henon_params(a: float, b: float) -> HenonParams:
    if b == 0:
        raise DomainError("b = 0 makes the map non-invertible")
    P = henon_fixed_point(a, b)
    J = jacobian(a, b, P)
    tr = J[0, 0]
    det = -b
    disc = tr * tr - 4 * det
    if disc < 0:
        raise DomainError("complex eigenvalues at P: no saddle")
    r = math.sqrt(disc)
    # numerically stable roots of l^2 - tr l + det
    big = (tr - r) / 2 if tr < 0 else (tr + r) / 2
    small = det / big
    lam_s, lam_u = (small, big) if abs(small) < abs(big) else (big, small)
    vecs = []
    for lam in (lam_s, lam_u):
        v = np.array([lam, b])  # from b*v1 = lam*v2
        v = v / np.linalg.norm(v)
        vecs.append((float(v[0]), float(v[1])))
    return HenonParams(a=float(a), b=float(b), P=P, eigenvalues=(lam_s, lam_u), eigenvectors=tuple(vecs))


@dataclass
class ManifoldTrace:
    points: np.ndarray
    levels: List[int]  # step-halving count used for each accepted point
    arclength: float
    truncated: bool = False  # left the box before the budget was spent
    kind: str = "unstable"

    def window(self, box) -> List[np.ndarray]:
        """Pieces of the trace inside box = (xmin, ymin, xmax, ymax)."""
        x0, y0, x1, y1 = box
        P = self.points
        inside = (P[:, 0] >= x0) & (P[:, 0] <= x1) & (P[:, 1] >= y0) & (P[:, 1] <= y1)
        pieces, cur = [], []
        for i, ok in enumerate(inside):
            if ok:
                cur.append(i)
            elif cur:
                pieces.append(P[cur])
                cur = []
        if cur:
            pieces.append(P[cur])
        return pieces


SEED = 1e-6


def _grow(F: Callable, lam: float, P, v, budget: float, tol: float, box, max_points: int,
          alpha_max: float = 0.3, d_min: float = 1e-9, d_max: float = 0.05, kind: str = "unstable") -> ManifoldTrace:
    P = np.asarray(P, dtype=float)
    v = np.asarray(v, dtype=float)
    pts = [P.copy(), P + SEED * v]
    arc = [0.0, SEED]
    levels = [0, 0]
    if budget <= SEED:
        return ManifoldTrace(np.array(pts), levels, arc[-1], False, kind)
    t_pre = SEED / abs(lam)
    step = SEED
    truncated = False

    def curve(t):
        i = bisect.bisect_right(arc, t) - 1
        i = min(max(i, 0), len(arc) - 2)
        s0, s1 = arc[i], arc[i + 1]
        w = 0.0 if s1 == s0 else (t - s0) / (s1 - s0)
        return pts[i] + w * (pts[i + 1] - pts[i])

    def image(t):
        return np.asarray(F(curve(t)))

    while arc[-1] < budget and len(pts) < max_points:
        last, prev = pts[-1], pts[-2]
        halvings = 0
        while True:
            # bracket the preimage parameter, then bisect on the distance
            lo = t_pre
            dt = max(step / abs(lam), 1e-15)
            hi = min(lo + dt, arc[-1])
            while np.linalg.norm(image(hi) - last) < step and hi < arc[-1]:
                dt *= 2
                hi = min(lo + dt, arc[-1])
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if np.linalg.norm(image(mid) - last) < step:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-15 * max(1.0, hi):
                    break
            t_new = hi
            q = image(t_new)
            d1 = last - prev
            d2 = q - last
            n1, n2 = np.linalg.norm(d1), np.linalg.norm(d2)
            cosang = float(np.dot(d1, d2) / (n1 * n2)) if n1 > 0 and n2 > 0 else 1.0
            ang = math.acos(max(-1.0, min(1.0, cosang)))
            if (ang > alpha_max or n2 * ang > tol) and step > d_min:
                step *= 0.5
                halvings += 1
                continue
            break
        pts.append(q)
        arc.append(arc[-1] + n2)
        levels.append(halvings)
        t_pre = t_new
        if ang < alpha_max / 3 and n2 * ang < tol / 3:
            step = min(2 * step, d_max)
        if box is not None:
            x0, y0, x1, y1 = box
            if not (x0 <= q[0] <= x1 and y0 <= q[1] <= y1):
                truncated = True
                break
    return ManifoldTrace(np.array(pts), levels, arc[-1], truncated, kind)


DEFAULT_BOX = (-3.0, -3.0, 3.0, 3.0)


def trace_unstable(params: HenonParams, budget: float, tol: float = 1e-5, box=DEFAULT_BOX,
                   side: int = 1, max_points: int = 2_000_000) -> ManifoldTrace:
    """Grow one branch of W^u_P up to the given arclength."""
    if budget < 0:
        raise UsageError("budget must be >= 0")
    lam = params.eigenvalues[1]
    if abs(lam) <= 1:
        raise DomainError("P has no expanding direction")
    a, b = params.a, params.b
    if lam > 0:
        F = lambda p: henon(a, b, p)
        lam_k = lam
    else:
        F = lambda p: henon(a, b, henon(a, b, p))
        lam_k = lam * lam
    v = np.array(params.eigenvectors[1]) * (1 if side >= 0 else -1)
    return _grow(F, lam_k, params.P, v, budget, tol, box, max_points, kind="unstable")


def trace_stable(params: HenonParams, budget: float, tol: float = 1e-5, box=DEFAULT_BOX,
                 side: int = 1, max_points: int = 2_000_000) -> ManifoldTrace:
    """Grow one branch of W^s_P with the inverse map."""
    if budget < 0:
        raise UsageError("budget must be >= 0")
    lam = 1.0 / params.eigenvalues[0]
    if abs(lam) <= 1:
        raise DomainError("P has no contracting direction")
    a, b = params.a, params.b
    if lam > 0:
        F = lambda p: henon_inverse(a, b, p)
        lam_k = lam
    else:
        F = lambda p: henon_inverse(a, b, henon_inverse(a, b, p))
        lam_k = lam * lam
    v = np.array(params.eigenvectors[0]) * (1 if side >= 0 else -1)
    return _grow(F, lam_k, params.P, v, budget, tol, box, max_points, kind="stable")


# -- diagnostics ---------------------------------------------------------------------

def image_area(a: float, b: float, tri: np.ndarray) -> float:
    """Signed area of H(triangle) by Green's theorem along the curved image edges.

    Each image edge is quadratic in its parameter, so three-point Gauss-Legendre
    integrates x dy - y dx exactly.
    """
    nodes, weights = np.polynomial.legendre.leggauss(3)
    t = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    total = 0.0
    for i in range(3):
        p = tri[i]
        d = tri[(i + 1) % 3] - p
        x = p[0] + t * d[0]
        y = p[1] + t * d[1]
        X = 1.0 - a * x * x + y
        Y = b * x
        dX = -2.0 * a * x * d[0] + d[1]
        dY = b * d[0] * np.ones_like(t)
        total += float(np.sum(w * (X * dY - Y * dX)))
    return 0.5 * total


def triangle_area(tri: np.ndarray) -> float:
    (x0, y0), (x1, y1), (x2, y2) = tri
    return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))


def hausdorff_points(A: np.ndarray, B: np.ndarray) -> float:
    """Symmetric Hausdorff distance between finite point sets (chunked)."""
    if len(A) == 0 or len(B) == 0:
        return math.inf

    def directed(U, V):
        best = 0.0
        for i in range(0, len(U), 512):
            chunk = U[i:i + 512]
            d = np.sqrt(((chunk[:, None, :] - V[None, :, :]) ** 2).sum(-1)).min(1)
            best = max(best, float(d.max()))
        return best

    return max(directed(A, B), directed(B, A))


def count_crossings(pl1: np.ndarray, pl2: np.ndarray, box=None) -> int:
    """Number of proper crossings between two float polylines (optionally inside a box)."""
    A0, A1 = pl1[:-1], pl1[1:]
    count = 0
    for i in range(0, len(A0), 256):
        a0 = A0[i:i + 256][:, None, :]
        a1 = A1[i:i + 256][:, None, :]
        b0 = pl2[:-1][None, :, :]
        b1 = pl2[1:][None, :, :]

        def orient(p, q, r):
            return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

        o1 = orient(a0, a1, b0)
        o2 = orient(a0, a1, b1)
        o3 = orient(b0, b1, a0)
        o4 = orient(b0, b1, a1)
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        if box is not None:
            x0, y0, x1, y1 = box
            mid = 0.5 * (a0 + a1)
            inb = (mid[..., 0] >= x0) & (mid[..., 0] <= x1) & (mid[..., 1] >= y0) & (mid[..., 1] <= y1)
            hit &= inb
        count += int(hit.sum())
    return count
