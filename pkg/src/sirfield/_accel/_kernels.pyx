# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled scatter-accumulate core: shifted-weighted kernels onto a time grid.

Mirrors the NumPy fallback exactly: same kernel formulas, same accumulation
order (ascending bin per point, points in input order), so the two backends
agree to the last few ulps.
"""

import numpy as np

from libc.math cimport ceil, fabs, floor


cdef inline double _pow_int(double t, int n) noexcept nogil:
    cdef double r = 1.0
    cdef int i
    for i in range(n):
        r *= t
    return r


cdef inline double _one_sided(double t, int n) noexcept nogil:
    if n == 0:
        if t > 0.0:
            return 1.0
        if t == 0.0:
            return 0.5
        return 0.0
    if t > 0.0:
        return _pow_int(t, n)
    return 0.0


cdef double _eval_bspline(double ax, int degree, const double* coefs,
                          int ncoef) noexcept nogil:
    cdef double half = (degree + 1) / 2.0
    cdef double t, out
    cdef int k
    if degree == 0:
        if ax > 0.5:
            return 0.0
    elif ax >= half:
        return 0.0
    t = ax + half
    out = 0.0
    for k in range(ncoef):
        out = out + coefs[k] * _one_sided(t - k, degree)
    return out


cdef inline double _bspline3_dd(double ax) noexcept nogil:
    if ax <= 1.0:
        return 3.0 * ax - 2.0
    if ax < 2.0:
        return 2.0 - ax
    return 0.0


cdef double _eval(int kind, double x, double a, int degree, const double* coefs,
                  int ncoef) noexcept nogil:
    cdef double ax = fabs(x)
    cdef double ax2, ax3
    if kind == 0:      # nearest
        if ax < 0.5:
            return 1.0
        if ax == 0.5:
            return 0.5
        return 0.0
    if kind == 1:      # linear
        if ax < 1.0:
            return 1.0 - ax
        return 0.0
    if kind == 2:      # keys
        if ax >= 2.0:
            return 0.0
        ax2 = ax * ax
        ax3 = ax2 * ax
        if ax <= 1.0:
            return (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
        return a * (ax3 - 5.0 * ax2 + 8.0 * ax - 4.0)
    if kind == 4:      # omoms3
        if ax >= 2.0:
            return 0.0
        return _eval_bspline(ax, 3, coefs, ncoef) + _bspline3_dd(ax) / 42.0
    return _eval_bspline(ax, degree, coefs, ncoef)


def accumulate(double[::1] out, long grid_start, double[::1] alphas,
               double[::1] taus, double inv_t, int kind, double a, int degree,
               double[::1] coefs, double half_support):
    """out[k - grid_start] += alphas[q] * inv_t * phi(k - taus[q]) over the support."""
    cdef Py_ssize_t nq = alphas.shape[0]
    cdef Py_ssize_t nout = out.shape[0]
    cdef int ncoef = <int> coefs.shape[0]
    cdef const double* cptr = NULL
    cdef Py_ssize_t q
    cdef long k, kmin, kmax, idx
    cdef double u, w
    if ncoef > 0:
        cptr = &coefs[0]
    with nogil:
        for q in range(nq):
            u = taus[q]
            w = alphas[q] * inv_t
            kmin = <long> ceil(u - half_support)
            kmax = <long> floor(u + half_support)
            for k in range(kmin, kmax + 1):
                idx = k - grid_start
                if 0 <= idx < nout:
                    out[idx] += w * _eval(kind, k - u, a, degree, cptr, ncoef)


def eval_kernel(double[::1] xs, int kind, double a, int degree, double[::1] coefs):
    """Vector kernel evaluation through the compiled path (for parity tests)."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef int ncoef = <int> coefs.shape[0]
    cdef const double* cptr = NULL
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    if ncoef > 0:
        cptr = &coefs[0]
    with nogil:
        for i in range(n):
            out[i] = _eval(kind, xs[i], a, degree, cptr, ncoef)
    return out_arr
