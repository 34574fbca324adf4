"""Backend selection for the accumulation core.

The compiled extension is preferred when importable; otherwise the NumPy
fallback is used.  Set SIRFIELD_BACKEND=python or =compiled to force one
(forcing `compiled` raises if the extension is missing).
"""

from __future__ import annotations

import os

import numpy as np

from ..splines import BasisFunction, bspline_power_coefficients

__all__ = ["backend_name", "accumulate_shifted_kernels", "kernel_spec"]

_KIND_IDS = {"nearest": 0, "linear": 1, "keys": 2, "bspline": 3, "omoms3": 4}

_requested = os.environ.get("SIRFIELD_BACKEND", "").strip().lower() or None
if _requested not in (None, "compiled", "python"):
    raise RuntimeError(f"SIRFIELD_BACKEND must be 'compiled' or 'python', "
                       f"got {_requested!r}")

_impl = None
backend_name = None
if _requested != "python":
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        backend_name = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
if _impl is None:
    from . import _kernels_py as _impl
    backend_name = "python"


def kernel_spec(f: BasisFunction):
    """Primitive (kind, a, degree, coefs, half_support) tuple for the backends."""
    kind = _KIND_IDS[f.kind]
    if f.kind == "bspline":
        coefs = bspline_power_coefficients(f.degree)
        degree = f.degree
    elif f.kind == "omoms3":
        coefs = bspline_power_coefficients(3)
        degree = 3
    else:
        coefs = np.empty(0)
        degree = 0
    return kind, float(f.a), degree, np.ascontiguousarray(coefs), f.support / 2.0


def accumulate_shifted_kernels(out: np.ndarray, grid_start: int, alphas, taus_samples,
                               inv_t: float, f: BasisFunction) -> None:
    """Accumulate alphas[q]*inv_t * phi(k - taus[q]) onto out (k global bin index)."""
    kind, a, degree, coefs, half = kernel_spec(f)
    _impl.accumulate(out, int(grid_start),
                     np.ascontiguousarray(alphas, dtype=float),
                     np.ascontiguousarray(taus_samples, dtype=float),
                     float(inv_t), kind, a, degree, coefs, half)


def eval_kernel_backend(xs, f: BasisFunction) -> np.ndarray:
    """Kernel evaluation through the selected backend (parity testing hook)."""
    kind, a, degree, coefs, _ = kernel_spec(f)
    return np.asarray(_impl.eval_kernel(np.ascontiguousarray(xs, dtype=float),
                                        kind, a, degree, coefs))
