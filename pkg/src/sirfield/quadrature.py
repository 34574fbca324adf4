"""Gauss-Legendre rules and their deployment on Bezier patches.

The per-direction point counts follow the heuristic of matching the spatial
node density to the temporal sampling rate: a direction of arc length L
simulated at rate fs in a medium with speed c receives enough points that the
mean node spacing does not exceed c/fs.  Arc lengths are taken as the longest
iso-curve of the patch in each direction (measured by dense polylines), with
a small safety margin on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BezierPatch, NurbsSurface, decompose_to_bezier, frames_grid

__all__ = [
    "GaussRule1D",
    "SampledSurface",
    "gauss_legendre",
    "iso_curve_length",
    "select_point_counts",
    "sample_patch",
    "sample_surface",
    "point_source",
]

# multiplicative headroom on iso-curve lengths in the count heuristic
ARC_MARGIN = 1.015
# stations of the transverse parameter over which iso-curve lengths are maximized
_TRANSVERSE_STATIONS = (0.0, 0.25, 0.5, 0.75, 1.0)
_POLYLINE_SEGMENTS = 1024
# cap on points evaluated per grid chunk to bound peak memory
_CHUNK_POINTS = 1 << 20


@dataclass(frozen=True)
class GaussRule1D:
    """Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size


def _legendre_and_derivative(n: int, x: np.ndarray):
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(n: int) -> GaussRule1D:
    """Newton iteration from Chebyshev-angle guesses; stable to n in the hundreds."""
    if n < 1:
        raise ValueError("rule size must be at least 1")
    if n == 1:
        return GaussRule1D(np.zeros(1), np.full(1, 2.0))
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # enforce exact symmetry of the computed rule
    x = (x - x[::-1]) / 2.0
    w = (w + w[::-1]) / 2.0
    order = np.argsort(x)
    return GaussRule1D(x[order], w[order])


@dataclass(frozen=True)
class SampledSurface:
    """Quadrature points of a surface: positions, unit normals, surface measure.

    ``combined_weights`` hold quadrature weight times Jacobian determinant
    (units m^2); ``distribution`` holds the surface excitation-distribution
    value at each point (1 for uniform excitation).
    """

    points: np.ndarray
    normals: np.ndarray
    combined_weights: np.ndarray
    distribution: np.ndarray

    def __post_init__(self):
        m = self.points.shape[0]
        if self.points.shape != (m, 3) or self.normals.shape != (m, 3):
            raise ValueError("points and normals must have shape (m, 3)")
        if self.combined_weights.shape != (m,) or self.distribution.shape != (m,):
            raise ValueError("weights and distribution must have shape (m,)")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def area(self) -> float:
        return float(np.sum(self.combined_weights))

    def concat(self, other: "SampledSurface") -> "SampledSurface":
        return SampledSurface(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.normals, other.normals]),
            np.concatenate([self.combined_weights, other.combined_weights]),
            np.concatenate([self.distribution, other.distribution]),
        )

    def to_csv(self, path) -> None:
        data = np.column_stack([self.points, self.normals, self.combined_weights])
        np.savetxt(path, data, delimiter=",", header="x,y,z,nx,ny,nz,weight",
                   comments="")


def iso_curve_length(surface: NurbsSurface, direction: str, station: float,
                     segments: int = _POLYLINE_SEGMENTS) -> float:
    """Polyline length of an iso-parameter curve (direction 'u' or 'v')."""
    t = np.linspace(0.0, 1.0, segments + 1)
    if direction == "u":
        pos = frames_grid(surface, t, [station], check=False)[0][:, 0, :]
    elif direction == "v":
        pos = frames_grid(surface, [station], t, check=False)[0][0, :, :]
    else:
        raise ValueError("direction must be 'u' or 'v'")
    return float(np.sum(np.linalg.norm(np.diff(pos, axis=0), axis=1)))


def _direction_length(patch: NurbsSurface, direction: str) -> float:
    return max(iso_curve_length(patch, direction, s) for s in _TRANSVERSE_STATIONS)


def select_point_counts(patch: BezierPatch, sampling_rate: float,
                        sound_speed: float) -> tuple:
    """Per-direction Gauss point counts for a spatial density matching fs.

    n - 1 spacings of at most sound_speed/sampling_rate must cover the longest
    iso-curve of the direction (plus the ARC_MARGIN headroom), hence
    n = 1 + ceil(margin * L * fs / c).
    """
    if sampling_rate <= 0 or sound_speed <= 0:
        raise ValueError("sampling rate and sound speed must be positive")
    spacing = sound_speed / sampling_rate
    counts = []
    for direction in ("u", "v"):
        length = _direction_length(patch, direction)
        counts.append(max(1, 1 + math.ceil(ARC_MARGIN * length / spacing)))
    return tuple(counts)


def sample_patch(patch: NurbsSurface, rule_u: GaussRule1D, rule_v: GaussRule1D,
                 distribution=None) -> SampledSurface:
    """Tensor-product Gauss sampling of a patch.

    Nodes are mapped affinely from [-1, 1] to [0, 1] per direction and the
    1/2 interval factors are folded into the combined weights.  Points are
    emitted row-major (u outer, v inner), so identical inputs give
    bit-identical outputs.
    """
    tu = (rule_u.nodes + 1.0) / 2.0
    tv = (rule_v.nodes + 1.0) / 2.0
    wu = rule_u.weights / 2.0
    wv = rule_v.weights / 2.0
    nu, nv = tu.size, tv.size
    m = nu * nv
    points = np.empty((m, 3))
    normals = np.empty((m, 3))
    combined = np.empty(m)
    dist = np.empty(m)
    rows_per_chunk = max(1, _CHUNK_POINTS // max(nv, 1))
    for lo in range(0, nu, rows_per_chunk):
        hi = min(nu, lo + rows_per_chunk)
        pos, _, _, nrm, jac = frames_grid(patch, tu[lo:hi], tv, check=True)
        w = wu[lo:hi, None] * wv[None, :] * jac
        sl = slice(lo * nv, hi * nv)
        points[sl] = pos.reshape(-1, 3)
        normals[sl] = nrm.reshape(-1, 3)
        combined[sl] = w.reshape(-1)
        if distribution is None:
            dist[sl] = 1.0
        else:
            uu, vv = np.meshgrid(tu[lo:hi], tv, indexing="ij")
            dist[sl] = np.asarray(distribution(uu, vv), dtype=float).reshape(-1)
    return SampledSurface(points, normals, combined, dist)


def sample_surface(surface: NurbsSurface, sampling_rate: float, sound_speed: float,
                   distribution=None) -> SampledSurface:
    """Decompose into Bezier patches, pick counts per patch, sample and merge."""
    sampled = None
    for patch in decompose_to_bezier(surface):
        n_u, n_v = select_point_counts(patch, sampling_rate, sound_speed)
        local_dist = None
        if distribution is not None:
            (a, b), (c, d) = patch.span_u, patch.span_v
            local_dist = lambda uu, vv, a=a, b=b, c=c, d=d: distribution(
                a + uu * (b - a), c + vv * (d - c))
        part = sample_patch(patch, gauss_legendre(n_u), gauss_legendre(n_v),
                            local_dist)
        sampled = part if sampled is None else sampled.concat(part)
    return sampled


def point_source(position, normal, area: float,
                 distribution: float = 1.0) -> SampledSurface:
    """Single-point surrogate surface, handy for tests and point-like sources."""
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    return SampledSurface(
        np.asarray(position, dtype=float).reshape(1, 3),
        n.reshape(1, 3),
        np.array([float(area)]),
        np.array([float(distribution)]),
    )
