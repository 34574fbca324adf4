"""Interpolation kernels and the prefiltering that turns samples into basis coefficients.

Supported kernel families: nearest-neighbor, linear, Keys (parametric cubic),
centered B-splines of arbitrary degree, and the maximal-order O-MoMS kernel of
degree three.  Non-interpolating kernels require a prefilter (the discrete
convolution-inverse of their integer samples), realized as cascaded causal and
anti-causal first-order recursions with an exact boundary correction for the
zero-extension convention: coefficients are defined to vanish outside the
sample index range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "BasisFunction",
    "Prefilter",
    "eval_basis",
    "prefilter_poles",
    "compute_coefficients",
    "reconstruct",
]

_SUPPORTED_KINDS = ("nearest", "linear", "keys", "bspline", "omoms3")

MAX_BSPLINE_DEGREE = 9


@dataclass(frozen=True)
class BasisFunction:
    """A symmetric finite-support interpolation kernel.

    ``kind`` is one of ``nearest``, ``linear``, ``keys``, ``bspline``,
    ``omoms3``.  ``degree`` is only meaningful for B-splines and ``a`` only
    for the Keys kernel.
    """

    kind: str
    degree: int = 0
    a: float = -0.5

    def __post_init__(self):
        if self.kind not in _SUPPORTED_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "bspline" and not 0 <= self.degree <= MAX_BSPLINE_DEGREE:
            raise ValueError(f"B-spline degree must be in [0, {MAX_BSPLINE_DEGREE}]")

    @classmethod
    def nearest(cls) -> "BasisFunction":
        return cls("nearest")

    @classmethod
    def linear(cls) -> "BasisFunction":
        return cls("linear")

    @classmethod
    def keys(cls, a: float = -0.5) -> "BasisFunction":
        return cls("keys", a=a)

    @classmethod
    def bspline(cls, degree: int) -> "BasisFunction":
        return cls("bspline", degree=degree)

    @classmethod
    def omoms3(cls) -> "BasisFunction":
        return cls("omoms3")

    @classmethod
    def from_name(cls, name: str) -> "BasisFunction":
        """Parse names like ``nearest``, ``keys``, ``bspline5`` or ``omoms3``."""
        name = name.strip().lower().replace("-", "").replace("_", "")
        if name in ("nearest", "linear", "keys", "omoms3"):
            return cls(name if name != "omoms3" else "omoms3")
        if name.startswith("bspline") and name[7:].isdigit():
            return cls.bspline(int(name[7:]))
        raise ValueError(f"cannot parse kernel name {name!r}")

    @property
    def name(self) -> str:
        if self.kind == "bspline":
            return f"bspline{self.degree}"
        return self.kind

    @property
    def support(self) -> float:
        """Width of the kernel in samples."""
        if self.kind == "nearest":
            return 1.0
        if self.kind == "linear":
            return 2.0
        if self.kind in ("keys", "omoms3"):
            return 4.0
        return float(self.degree + 1)

    @property
    def interpolating(self) -> bool:
        if self.kind == "bspline":
            return self.degree <= 1
        return self.kind != "omoms3"

    @property
    def order(self) -> int:
        """Approximation order (error decays as T**order)."""
        if self.kind == "nearest":
            return 1
        if self.kind == "linear":
            return 2
        if self.kind == "keys":
            return 3
        if self.kind == "omoms3":
            return 4
        return self.degree + 1

    def __call__(self, x) -> np.ndarray:
        return eval_basis(self, x)


@dataclass(frozen=True)
class Prefilter:
    """Poles and DC gain of the convolution-inverse recursions."""

    poles: tuple = ()
    gain: float = 1.0

    @property
    def trivial(self) -> bool:
        return len(self.poles) == 0


def _one_sided_power(t: np.ndarray, n: int) -> np.ndarray:
    """One-sided power function: step-like at n=0 (value 1/2 at 0), t_+^n above."""
    if n == 0:
        return np.where(t > 0.0, 1.0, np.where(t == 0.0, 0.5, 0.0))
    return np.where(t > 0.0, t, 0.0) ** n


def bspline_power_coefficients(n: int) -> np.ndarray:
    """Coefficients of the one-sided power expansion of the degree-n B-spline."""
    return np.array(
        [(-1.0) ** k * (n + 1) / (math.factorial(n + 1 - k) * math.factorial(k))
         for k in range(n + 2)]
    )


def _bspline_values(n: int, ax: np.ndarray) -> np.ndarray:
    # ax is |x|; evaluating on the magnitude makes symmetry exact bit-for-bit
    t = ax + (n + 1) / 2.0
    out = np.zeros_like(ax)
    for k, coef in enumerate(bspline_power_coefficients(n)):
        out = out + coef * _one_sided_power(t - k, n)
    if n == 0:
        return np.where(ax > 0.5, 0.0, out)
    # continuous kernels vanish at the support edge; mask the summation dust
    return np.where(ax >= (n + 1) / 2.0, 0.0, out)


def _bspline3_second_derivative(ax: np.ndarray) -> np.ndarray:
    inner = 3.0 * ax - 2.0
    outer = 2.0 - ax
    out = np.where(ax <= 1.0, inner, np.where(ax < 2.0, outer, 0.0))
    return np.where(ax == 2.0, 0.0, out)


def eval_basis(f: BasisFunction, x) -> np.ndarray:
    """Evaluate the kernel at x (scalar or array), exactly zero outside its support."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    ax = np.abs(x)
    if f.kind == "nearest":
        out = np.where(ax < 0.5, 1.0, np.where(ax == 0.5, 0.5, 0.0))
    elif f.kind == "linear":
        out = np.where(ax < 1.0, 1.0 - ax, 0.0)
    elif f.kind == "keys":
        a = f.a
        ax2 = ax * ax
        ax3 = ax2 * ax
        inner = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
        outer = a * (ax3 - 5.0 * ax2 + 8.0 * ax - 4.0)
        out = np.where(ax <= 1.0, inner, np.where(ax < 2.0, outer, 0.0))
    elif f.kind == "omoms3":
        out = _bspline_values(3, ax) + _bspline3_second_derivative(ax) / 42.0
        out = np.where(ax >= 2.0, 0.0, out)
    else:
        out = _bspline_values(f.degree, ax)
    return float(out) if scalar else out


def kernel_integer_samples(f: BasisFunction) -> np.ndarray:
    """Kernel samples at the integers -floor(s/2)..floor(s/2) (symmetric, sums to 1)."""
    half = int(math.floor(f.support / 2.0))
    if f.kind == "nearest" or (f.kind == "bspline" and f.degree == 0):
        return np.array([1.0])
    k = np.arange(-half, half + 1, dtype=float)
    return eval_basis(f, k)


_SQRT3 = math.sqrt(3.0)
_SQRT8 = math.sqrt(8.0)
_SQRT105 = math.sqrt(105.0)
_SQRT19 = math.sqrt(19.0)


def _poles_from_symmetric_sum(s: float) -> float:
    # root of z**2 - s*z + 1 inside the unit circle, s < -2
    return (s + math.sqrt(s * s - 4.0)) / 2.0


def _analytic_bspline_poles(n: int):
    if n <= 1:
        return ()
    if n == 2:
        return (_SQRT8 - 3.0,)
    if n == 3:
        return (_SQRT3 - 2.0,)
    if n == 4:
        # z + 1/z roots of s**2 + 76 s + 228 = 0, from samples {1,76,230,76,1}/384
        s1 = -38.0 + 8.0 * _SQRT19
        s2 = -38.0 - 8.0 * _SQRT19
        return (_poles_from_symmetric_sum(s1), _poles_from_symmetric_sum(s2))
    if n == 5:
        # z + 1/z roots of s**2 + 26 s + 64 = 0, from samples {1,26,66,26,1}/120
        s1 = -13.0 + _SQRT105
        s2 = -13.0 - _SQRT105
        return (_poles_from_symmetric_sum(s1), _poles_from_symmetric_sum(s2))
    return None


def _numeric_poles(samples: np.ndarray) -> tuple:
    """Roots of the symmetric integer-sample polynomial, via s = z + 1/z.

    Reciprocal root pairs collapse to single real roots s < -2 of a degree-m
    polynomial, which is much better conditioned than the degree-2m
    palindromic problem.
    """
    m = samples.size // 2
    b = samples[m:]
    poly = np.zeros(m + 1)
    poly[0] = b[0]
    r_prev = np.array([2.0])          # z**k + z**-k at k=0
    r_cur = np.array([0.0, 1.0])      # k=1
    for k in range(1, m + 1):
        poly[: k + 1] += b[k] * r_cur
        r_next = np.concatenate(([0.0], r_cur)) if k < m else None
        if r_next is not None:
            r_next[: r_prev.size] -= r_prev
            r_prev, r_cur = r_cur, r_next
    s_roots = np.roots(poly[::-1])
    if np.max(np.abs(s_roots.imag)) > 1e-10:
        raise ValueError("complex prefilter poles; kernel samples not valid")
    zs = [_poles_from_symmetric_sum(s) for s in sorted(s_roots.real)]
    if any(abs(z) >= 1.0 for z in zs):
        raise ValueError("prefilter pole on or outside the unit circle")
    return tuple(sorted(zs))


def prefilter_poles(f: BasisFunction) -> Prefilter:
    """Poles (all inside the unit circle) and DC gain of the kernel's prefilter.

    Interpolating kernels return an empty prefilter.  B-splines of degree n
    have floor(n/2) poles; degrees up to five use closed forms, higher ones
    are found numerically from the integer-sample polynomial.
    """
    if f.interpolating:
        return Prefilter()
    if f.kind == "omoms3":
        poles = ((_SQRT105 - 13.0) / 8.0,)
    else:
        poles = _analytic_bspline_poles(f.degree)
        if poles is None:
            poles = _numeric_poles(kernel_integer_samples(f))
        poles = tuple(sorted(poles))
    gain = 1.0
    for z in poles:
        gain *= -((1.0 - z) ** 2) / z
    return Prefilter(poles=poles, gain=gain)


def _spectral_factor(poles) -> np.ndarray:
    """Coefficients g of the causal factor: sum_k b[k] z^-k = G(z) G(1/z)."""
    g = np.array([1.0])
    for z in poles:
        g = np.convolve(g, [1.0, -z])
    scale = 1.0
    for z in poles:
        scale *= 1.0 - z
    return g / scale


def _causal_chain(x: np.ndarray, poles) -> np.ndarray:
    for z in poles:
        x = lfilter([1.0], [1.0, -z], x)
    return x


def _anticausal_chain(x: np.ndarray, poles) -> np.ndarray:
    for z in poles:
        x = lfilter([1.0], [1.0, -z], x[::-1])[::-1]
    return x


def compute_coefficients(samples: np.ndarray, f: BasisFunction) -> np.ndarray:
    """Basis coefficients c with zero extension: sum_k c[k] phi(k0 - k) = samples[k0].

    Solved by the causal/anti-causal recursions of the spectral factor plus a
    rank-m correction that accounts for the truncation of the index range, so
    the identity above holds at every k0 in [0, K-1], boundaries included.
    """
    v = np.asarray(samples, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("samples must be a non-empty 1-D array")
    pre = prefilter_poles(f)
    if pre.trivial:
        return v.copy()
    poles = pre.poles
    m = len(poles)
    g = _spectral_factor(poles)
    sqk = g[0]  # sqrt of the leading factorization constant

    def m_solve(x):
        y = _causal_chain(x, poles) / sqk
        return _anticausal_chain(y, poles) / sqk

    c0 = m_solve(v)
    K = v.size
    # corner correction: the truncated banded system differs from the
    # bi-infinite factorization by U U^T with U supported on the first m rows
    rows = min(m, K)
    U = np.zeros((K, m))
    for i in range(rows):
        for l in range(1, m + 1):
            if i + l <= m:
                U[i, l - 1] = g[i + l]
    W = np.column_stack([m_solve(U[:, j]) for j in range(m)])
    S = np.eye(m) + U.T @ W
    d = np.linalg.solve(S, U.T @ c0)
    return c0 - W @ d


def reconstruct(coeffs: np.ndarray, f: BasisFunction, x) -> np.ndarray:
    """Evaluate sum_k coeffs[k] * phi(x - k); coefficients outside [0, K-1] are zero."""
    c = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    half = f.support / 2.0
    width = int(math.floor(f.support)) + 1
    kmin = np.ceil(xv - half).astype(np.int64)
    out = np.zeros_like(xv)
    for off in range(width):
        k = kmin + off
        valid = (k >= 0) & (k < c.size)
        vals = eval_basis(f, xv - k)
        out += np.where(valid, c[np.clip(k, 0, c.size - 1)] * vals, 0.0)
    return float(out[0]) if scalar else out
