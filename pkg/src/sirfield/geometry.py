"""NURBS surfaces: evaluation, differentiation, Bezier extraction, shape constructors.

Surfaces map the unit square to 3-space through the rational tensor-product
form.  Derivatives use the quotient rule on homogeneous sums, so normals and
Jacobian determinants are exact up to roundoff.  Constructors cover the
standard transducer shapes: planar rectangle, spherical cap (surface of
revolution, full circle built from four rational quadratic arcs), cylindrical
shell, and an optional toroidal shell.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateFrameError",
    "KnotVector",
    "NurbsSurface",
    "BezierPatch",
    "SurfaceFrame",
    "eval_bspline_basis",
    "eval_surface",
    "frames_grid",
    "decompose_to_bezier",
    "make_rectangle",
    "make_spherical_cap",
    "make_cylindrical_shell",
    "make_toroidal_shell",
    "surface_to_json",
    "surface_from_json",
]


class DegenerateFrameError(ValueError):
    """Raised when the tangent cross product vanishes at an evaluation point."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot vector on [0, 1] for B-spline bases of a given degree."""

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "knots", _readonly(self.knots))
        p, U = self.degree, self.knots
        if p < 1:
            raise ValueError("degree must be >= 1")
        if U.size < 2 * (p + 1):
            raise ValueError("knot vector too short for degree")
        if np.any(np.diff(U) < 0):
            raise ValueError("knots must be nondecreasing")
        if not (np.all(U[: p + 1] == U[0]) and np.all(U[-(p + 1):] == U[-1])):
            raise ValueError("knot vector must be clamped")

    @property
    def n_basis(self) -> int:
        return self.knots.size - self.degree - 1

    @property
    def interior_breakpoints(self) -> np.ndarray:
        interior = self.knots[self.degree + 1: -(self.degree + 1)]
        return np.unique(interior)

    def span_of(self, u: float) -> int:
        """Index k with knots[k] <= u < knots[k+1]; the last span at the right end."""
        p, U = self.degree, self.knots
        n = self.n_basis - 1
        if u >= U[n + 1]:
            return n
        if u <= U[p]:
            return p
        low, high = p, n + 1
        mid = (low + high) // 2
        while u < U[mid] or u >= U[mid + 1]:
            if u < U[mid]:
                high = mid
            else:
                low = mid
            mid = (low + high) // 2
        return mid

    def basis_and_derivatives(self, u: float):
        """Nonzero basis values and first derivatives at u.

        Returns (span, values[p+1], derivatives[p+1]) for basis indices
        span-p .. span.
        """
        p, U = self.degree, self.knots
        span = self.span_of(u)
        ndu = np.zeros((p + 1, p + 1))
        ndu[0, 0] = 1.0
        left = np.zeros(p + 1)
        right = np.zeros(p + 1)
        for j in range(1, p + 1):
            left[j] = u - U[span + 1 - j]
            right[j] = U[span + j] - u
            saved = 0.0
            for r in range(j):
                ndu[j, r] = right[r + 1] + left[j - r]
                temp = ndu[r, j - 1] / ndu[j, r]
                ndu[r, j] = saved + right[r + 1] * temp
                saved = left[j - r] * temp
            ndu[j, j] = saved
        values = ndu[:, p].copy()
        derivs = np.zeros(p + 1)
        for r in range(p + 1):
            d = 0.0
            if r > 0:
                d += ndu[r - 1, p - 1] / ndu[p, r - 1]
            if r < p:
                d -= ndu[r, p - 1] / ndu[p, r]
            derivs[r] = p * d
        return span, values, derivs


def eval_bspline_basis(kv: KnotVector, i: int, u: float) -> float:
    """Value of the i-th B-spline basis function at u (end-interpolating at u=1)."""
    if not 0 <= i < kv.n_basis:
        raise IndexError(f"basis index {i} out of range [0, {kv.n_basis})")
    span, values, _ = kv.basis_and_derivatives(u)
    offset = i - (span - kv.degree)
    if 0 <= offset <= kv.degree:
        return float(values[offset])
    return 0.0


@dataclass(frozen=True)
class SurfaceFrame:
    """Position, tangents, unit normal and area element at a parameter point."""

    position: np.ndarray
    tangent_u: np.ndarray
    tangent_v: np.ndarray
    normal: np.ndarray
    jacobian_det: float


@dataclass(frozen=True)
class NurbsSurface:
    """Rational tensor-product surface: clamped knot vectors, control net, weights."""

    knots_u: KnotVector
    knots_v: KnotVector
    control_points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        cp = _readonly(self.control_points)
        w = _readonly(self.weights)
        object.__setattr__(self, "control_points", cp)
        object.__setattr__(self, "weights", w)
        nu, nv = self.knots_u.n_basis, self.knots_v.n_basis
        if cp.shape != (nu, nv, 3):
            raise ValueError(f"control net shape {cp.shape} does not match "
                             f"basis counts ({nu}, {nv}, 3)")
        if w.shape != (nu, nv):
            raise ValueError("weight grid shape does not match control net")
        if np.any(w <= 0):
            raise ValueError("all weights must be positive")

    @property
    def degree(self):
        return self.knots_u.degree, self.knots_v.degree

    def translated(self, offset) -> "NurbsSurface":
        offset = np.asarray(offset, dtype=float)
        return NurbsSurface(self.knots_u, self.knots_v,
                            self.control_points + offset, self.weights)

    def rotated(self, matrix) -> "NurbsSurface":
        R = np.asarray(matrix, dtype=float)
        return NurbsSurface(self.knots_u, self.knots_v,
                            self.control_points @ R.T, self.weights)


@dataclass(frozen=True)
class BezierPatch(NurbsSurface):
    """A NURBS surface without interior knots, plus its parent parameter spans."""

    span_u: tuple = (0.0, 1.0)
    span_v: tuple = (0.0, 1.0)

    def __post_init__(self):
        super().__post_init__()
        if self.knots_u.interior_breakpoints.size or self.knots_v.interior_breakpoints.size:
            raise ValueError("a Bezier patch cannot have interior knots")


def _homogeneous(surface: NurbsSurface):
    w = surface.weights
    return surface.control_points * w[:, :, None], w


def _direction_basis(kv: KnotVector, params: np.ndarray):
    """Dense basis/derivative matrices (len(params) x n_basis)."""
    n = kv.n_basis
    B = np.zeros((params.size, n))
    D = np.zeros((params.size, n))
    p = kv.degree
    for idx, u in enumerate(params):
        span, vals, ders = kv.basis_and_derivatives(float(u))
        B[idx, span - p: span + 1] = vals
        D[idx, span - p: span + 1] = ders
    return B, D


def frames_grid(surface: NurbsSurface, us, vs, check: bool = True):
    """Evaluate positions, normals and Jacobian determinants on a parameter grid.

    Returns (positions, normals, jacobians) with shapes (Nu, Nv, 3) and
    (Nu, Nv).  Raises DegenerateFrameError when any cross product vanishes
    and ``check`` is set.
    """
    us = np.atleast_1d(np.asarray(us, dtype=float))
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    Pw, w = _homogeneous(surface)
    Bu, Du = _direction_basis(surface.knots_u, us)
    Bv, Dv = _direction_basis(surface.knots_v, vs)

    A = np.einsum("ua,vb,abk->uvk", Bu, Bv, Pw)
    W = np.einsum("ua,vb,ab->uv", Bu, Bv, w)
    Au = np.einsum("ua,vb,abk->uvk", Du, Bv, Pw)
    Wu = np.einsum("ua,vb,ab->uv", Du, Bv, w)
    Av = np.einsum("ua,vb,abk->uvk", Bu, Dv, Pw)
    Wv = np.einsum("ua,vb,ab->uv", Bu, Dv, w)

    pos = A / W[..., None]
    tan_u = (Au - pos * Wu[..., None]) / W[..., None]
    tan_v = (Av - pos * Wv[..., None]) / W[..., None]
    cross = np.cross(tan_u, tan_v)
    jac = np.linalg.norm(cross, axis=-1)
    if check:
        scale = np.linalg.norm(tan_u, axis=-1) * np.linalg.norm(tan_v, axis=-1)
        if np.any(jac <= 1e-14 * np.maximum(scale, np.finfo(float).tiny)):
            raise DegenerateFrameError("zero tangent cross product on the grid")
    with np.errstate(invalid="ignore", divide="ignore"):
        normals = cross / jac[..., None]
    return pos, tan_u, tan_v, normals, jac


def eval_surface(s: NurbsSurface, u: float, v: float) -> SurfaceFrame:
    """Surface frame at a single parameter point (u, v) in [0, 1]^2."""
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("parameters must lie in [0, 1]")
    pos, tu, tv, nrm, jac = frames_grid(s, [u], [v], check=True)
    return SurfaceFrame(position=pos[0, 0], tangent_u=tu[0, 0], tangent_v=tv[0, 0],
                        normal=nrm[0, 0], jacobian_det=float(jac[0, 0]))


def _insert_knot_once(knots: np.ndarray, p: int, Pw: np.ndarray, t: float):
    """Insert t once into the u-direction of a homogeneous control net (nu, nv, 4)."""
    n = knots.size - p - 2
    # rightmost span with knots[k] <= t
    k = int(np.searchsorted(knots, t, side="right") - 1)
    k = min(max(k, p), n)
    nu = Pw.shape[0]
    Q = np.empty((nu + 1,) + Pw.shape[1:])
    Q[: k - p + 1] = Pw[: k - p + 1]
    Q[k + 1:] = Pw[k:]
    for i in range(k - p + 1, k + 1):
        denom = knots[i + p] - knots[i]
        alpha = (t - knots[i]) / denom if denom > 0 else 0.0
        Q[i] = alpha * Pw[i] + (1.0 - alpha) * Pw[i - 1]
    new_knots = np.insert(knots, k + 1, t)
    return new_knots, Q


def _refine_to_bezier_u(knots: np.ndarray, p: int, Pw: np.ndarray):
    """Raise every interior knot to multiplicity p (u direction)."""
    while True:
        interior = knots[p + 1: -(p + 1)]
        values, counts = np.unique(interior, return_counts=True)
        todo = values[counts < p]
        if todo.size == 0:
            return knots, Pw
        knots, Pw = _insert_knot_once(knots, p, Pw, float(todo[0]))


def decompose_to_bezier(s: NurbsSurface):
    """Split a surface into rational Bezier patches by knot refinement.

    The union of patches reproduces the surface exactly: patch (iu, iv) covers
    the parameter box span_u x span_v, reparameterized affinely to [0, 1]^2.
    Patches are returned row-major (u-major).
    """
    p, q = s.degree
    Pw = np.concatenate([_homogeneous(s)[0], s.weights[:, :, None]], axis=2)
    ku, Pw = _refine_to_bezier_u(np.array(s.knots_u.knots), p, Pw)
    Pw = np.swapaxes(Pw, 0, 1)
    kvknots, Pw = _refine_to_bezier_u(np.array(s.knots_v.knots), q, Pw)
    Pw = np.swapaxes(Pw, 0, 1)

    breaks_u = np.unique(ku)
    breaks_v = np.unique(kvknots)
    bez_u = KnotVector(np.concatenate([np.zeros(p + 1), np.ones(p + 1)]), p)
    bez_v = KnotVector(np.concatenate([np.zeros(q + 1), np.ones(q + 1)]), q)
    patches = []
    for iu in range(breaks_u.size - 1):
        for iv in range(breaks_v.size - 1):
            block = Pw[iu * p: iu * p + p + 1, iv * q: iv * q + q + 1]
            wts = block[:, :, 3]
            ctrl = block[:, :, :3] / wts[:, :, None]
            patches.append(BezierPatch(
                knots_u=bez_u, knots_v=bez_v, control_points=ctrl, weights=wts,
                span_u=(float(breaks_u[iu]), float(breaks_u[iu + 1])),
                span_v=(float(breaks_v[iv]), float(breaks_v[iv + 1])),
            ))
    return patches


def _clamped(p: int) -> KnotVector:
    return KnotVector(np.concatenate([np.zeros(p + 1), np.ones(p + 1)]), p)


def make_rectangle(width: float, height: float) -> NurbsSurface:
    """Planar bilinear patch centered at the origin, normal +z.

    u runs along the width (x), v along the height (y).
    """
    if width <= 0 or height <= 0:
        raise ValueError("rectangle dimensions must be positive")
    hw, hh = width / 2.0, height / 2.0
    ctrl = np.array([
        [[-hw, -hh, 0.0], [-hw, hh, 0.0]],
        [[hw, -hh, 0.0], [hw, hh, 0.0]],
    ])
    return NurbsSurface(_clamped(1), _clamped(1), ctrl, np.ones((2, 2)))


# full circle as four 90-degree rational quadratic arcs
_CIRCLE_XY = np.array([
    [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 0.0],
    [-1.0, -1.0], [0.0, -1.0], [1.0, -1.0], [1.0, 0.0],
])
_CIRCLE_W = np.array([1.0, math.sqrt(0.5), 1.0, math.sqrt(0.5), 1.0,
                      math.sqrt(0.5), 1.0, math.sqrt(0.5), 1.0])
_CIRCLE_KNOTS = np.array([0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5,
                          0.75, 0.75, 1.0, 1.0, 1.0])


def make_spherical_cap(aperture_diameter: float, radius: float) -> NurbsSurface:
    """Spherical cap: a circular arc profile revolved through a full circle.

    The apex sits at the origin and the cap opens toward +z; the rim circle of
    diameter ``aperture_diameter`` lies in the plane z = radius - sqrt(radius^2
    - (aperture_diameter/2)^2).  Normals point toward the sphere center
    (0, 0, radius), i.e. into the half space the element radiates into.
    u is the profile direction (apex to rim), v the revolution direction.
    """
    a = aperture_diameter / 2.0
    if radius < a:
        raise ValueError("radius must be at least half the aperture diameter")
    theta = math.asin(a / radius)
    profile_rz = np.array([
        [0.0, 0.0],
        [radius * math.tan(theta / 2.0), 0.0],
        [radius * math.sin(theta), radius * (1.0 - math.cos(theta))],
    ])
    profile_w = np.array([1.0, math.cos(theta / 2.0), 1.0])
    ctrl = np.empty((3, 9, 3))
    ctrl[:, :, 0] = profile_rz[:, None, 0] * _CIRCLE_XY[None, :, 0]
    ctrl[:, :, 1] = profile_rz[:, None, 0] * _CIRCLE_XY[None, :, 1]
    ctrl[:, :, 2] = profile_rz[:, None, 1]
    weights = profile_w[:, None] * _CIRCLE_W[None, :]
    kv_v = KnotVector(_CIRCLE_KNOTS, 2)
    return NurbsSurface(_clamped(2), kv_v, ctrl, weights)


def make_cylindrical_shell(width: float, height: float,
                           curvature_radius: float) -> NurbsSurface:
    """Cylindrical shell of degree (1, 2): linear along the height, curved in v.

    Cylinder axis parallel to y at height z = curvature_radius; the sheet is
    concave toward +z (edges curl toward the field side) with the center line
    through the origin.  Normals point toward the cylinder axis.
    """
    if curvature_radius < width / 2.0:
        raise ValueError("curvature radius must be at least half the width")
    if width <= 0 or height <= 0:
        raise ValueError("dimensions must be positive")
    r = curvature_radius
    th = math.asin(width / (2.0 * r))
    edge_x = r * math.sin(th)
    edge_z = r * (1.0 - math.cos(th))
    mid_z = -r * (1.0 - math.cos(th)) / math.cos(th)
    # v runs from +x edge to -x edge so that tangent_u x tangent_v points +z
    arc_xz = np.array([[edge_x, edge_z], [0.0, mid_z], [-edge_x, edge_z]])
    arc_w = np.array([1.0, math.cos(th), 1.0])
    ys = np.array([-height / 2.0, height / 2.0])
    ctrl = np.empty((2, 3, 3))
    ctrl[:, :, 0] = arc_xz[None, :, 0]
    ctrl[:, :, 1] = ys[:, None]
    ctrl[:, :, 2] = arc_xz[None, :, 1]
    weights = np.ones((2, 1)) * arc_w[None, :]
    return NurbsSurface(_clamped(1), _clamped(2), ctrl, weights)


def make_toroidal_shell(width: float, height: float, width_radius: float,
                        height_radius: float) -> NurbsSurface:
    """Doubly curved degree (2, 2) shell (convex-array element geometry).

    The elevation arc (height direction, radius ``height_radius``) is revolved
    by the width angle about an axis parallel to y at z = width_radius.  Both
    curvatures bend the sheet toward +z.
    """
    if width_radius < width / 2.0 or height_radius < height / 2.0:
        raise ValueError("curvature radii must exceed half the extents")
    rw, rh = width_radius, height_radius
    th_w = math.asin(width / (2.0 * rw))
    th_h = math.asin(height / (2.0 * rh))
    # elevation profile in (y, z), center line through the origin
    prof_y = np.array([-rh * math.sin(th_h), 0.0, rh * math.sin(th_h)])
    prof_z = np.array([rh * (1.0 - math.cos(th_h)),
                       -rh * (1.0 - math.cos(th_h)) / math.cos(th_h),
                       rh * (1.0 - math.cos(th_h))])
    prof_w = np.array([1.0, math.cos(th_h), 1.0])
    sweep_w = np.array([1.0, math.cos(th_w), 1.0])
    ctrl = np.empty((3, 3, 3))
    for i in range(3):       # elevation index (u)
        rho = rw - prof_z[i]  # distance of the profile point from the sweep axis
        # v runs from the +x edge to the -x edge; the middle control point is
        # the tangent intersection at distance rho/cos(th_w) from the axis
        ctrl[i, 0] = [rho * math.sin(th_w), prof_y[i], rw - rho * math.cos(th_w)]
        ctrl[i, 1] = [0.0, prof_y[i], rw - rho / math.cos(th_w)]
        ctrl[i, 2] = [-rho * math.sin(th_w), prof_y[i], rw - rho * math.cos(th_w)]
    weights = prof_w[:, None] * sweep_w[None, :]
    return NurbsSurface(_clamped(2), _clamped(2), ctrl, weights)


def surface_to_json(s: NurbsSurface) -> dict:
    """JSON-ready description; binary64 values round-trip exactly."""
    return {
        "degree_u": s.knots_u.degree,
        "knots_u": s.knots_u.knots.tolist(),
        "degree_v": s.knots_v.degree,
        "knots_v": s.knots_v.knots.tolist(),
        "control_points": s.control_points.tolist(),
        "weights": s.weights.tolist(),
    }


def surface_from_json(doc: dict) -> NurbsSurface:
    kv_u = KnotVector(np.array(doc["knots_u"], dtype=float), int(doc["degree_u"]))
    kv_v = KnotVector(np.array(doc["knots_v"], dtype=float), int(doc["degree_v"]))
    return NurbsSurface(kv_u, kv_v,
                        np.array(doc["control_points"], dtype=float),
                        np.array(doc["weights"], dtype=float))


def save_surface(s: NurbsSurface, path) -> None:
    with open(path, "w") as fh:
        json.dump(surface_to_json(s), fh, indent=1)


def load_surface(path) -> NurbsSurface:
    with open(path) as fh:
        return surface_from_json(json.load(fh))
