"""Pure NumPy fallback for the accumulation core (same contract as the extension)."""

from __future__ import annotations

import numpy as np

from ..splines import BasisFunction, eval_basis

_KIND_NAMES = {0: "nearest", 1: "linear", 2: "keys", 3: "bspline", 4: "omoms3"}
_CHUNK = 1 << 19


def _kernel_from_ids(kind: int, a: float, degree: int) -> BasisFunction:
    name = _KIND_NAMES[kind]
    if name == "bspline":
        return BasisFunction.bspline(degree)
    if name == "keys":
        return BasisFunction.keys(a)
    return BasisFunction(name)


def accumulate(out, grid_start, alphas, taus, inv_t, kind, a, degree, coefs,
               half_support):
    """out[k - grid_start] += alphas[q] * inv_t * phi(k - taus[q]) over the support.

    Bins are visited in the same (point-major, ascending-bin) order as the
    compiled loop; extra bins beyond the support evaluate to exactly zero.
    """
    f = _kernel_from_ids(kind, a, degree)
    width = int(np.floor(2.0 * half_support)) + 1
    offsets = np.arange(width, dtype=np.int64)
    for lo in range(0, alphas.size, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, alphas.size))
        u = taus[sl]
        kmin = np.ceil(u - half_support).astype(np.int64)
        bins = kmin[:, None] + offsets[None, :]
        vals = eval_basis(f, bins - u[:, None]) * (alphas[sl] * inv_t)[:, None]
        idx = bins.ravel() - grid_start
        flat = vals.ravel()
        good = (idx >= 0) & (idx < out.size)
        np.add.at(out, idx[good], flat[good])


def eval_kernel(xs, kind, a, degree, coefs):
    return eval_basis(_kernel_from_ids(kind, a, degree), np.asarray(xs, dtype=float))
