"""Benchmark: compiled accumulation core against the pure NumPy fallback.

Runs the scatter-accumulate kernel on synthetic workloads and on a realistic
focused-element sampling, and prints a timing table.  The compiled backend is
skipped gracefully when the extension is not built.

Usage: python benchmarks/bench_accel.py
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sirfield._accel import _kernels_py, kernel_spec  # noqa: E402
from sirfield.splines import BasisFunction  # noqa: E402

try:
    from sirfield._accel import _kernels
except ImportError:
    _kernels = None


def time_backend(impl, out_len, alphas, taus, spec, repeats=3):
    kind, a, degree, coefs, hs = spec
    best = float("inf")
    for _ in range(repeats):
        out = np.zeros(out_len)
        t0 = time.perf_counter()
        impl.accumulate(out, 0, alphas, taus, 1.0, kind, a, degree, coefs, hs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def synthetic_rows():
    rng = np.random.default_rng(42)
    rows = []
    for n in (100_000, 1_000_000, 4_000_000):
        taus = rng.uniform(10.0, 5000.0, n)
        alphas = rng.standard_normal(n)
        for f in (BasisFunction.nearest(), BasisFunction.bspline(5)):
            spec = kernel_spec(f)
            t_py, out_py = time_backend(_kernels_py, 5200, alphas, taus, spec)
            row = {"case": f"synthetic n={n:.0e} {f.name}", "python_s": t_py}
            if _kernels is not None:
                t_c, out_c = time_backend(_kernels, 5200, alphas, taus, spec)
                row["compiled_s"] = t_c
                row["speedup"] = t_py / t_c
                row["max_abs_diff"] = float(np.abs(out_c - out_py).max())
            rows.append(row)
    return rows


def focused_element_row():
    from sirfield.experiments import SOUND_SPEED, WAVELENGTH, validation_surface
    from sirfield.quadrature import sample_surface
    from sirfield.sir import BaffleCondition, Medium, alpha_weights

    surface = validation_surface("spherical_cap")
    sampled = sample_surface(surface, 240e6, SOUND_SPEED)
    medium = Medium(sound_speed=SOUND_SPEED)
    point = np.array([0.0, 0.0, 10 * WAVELENGTH])
    alphas, delays = alpha_weights(sampled, point, medium, BaffleCondition.RIGID)
    T = 1.0 / 240e6
    taus = delays / T
    out_len = int(np.ceil(taus.max()) - np.floor(taus.min())) + 10
    start = int(np.floor(taus.min())) - 5
    spec = kernel_spec(BasisFunction.bspline(5))
    kind, a, degree, coefs, hs = spec
    rows = {"case": f"cap @240 MHz ({sampled.n_points} pts, bspline5)"}
    out = np.zeros(out_len)
    t0 = time.perf_counter()
    _kernels_py.accumulate(out, start, alphas, taus, 240e6, kind, a, degree,
                           coefs, hs)
    rows["python_s"] = time.perf_counter() - t0
    if _kernels is not None:
        out = np.zeros(out_len)
        t0 = time.perf_counter()
        _kernels.accumulate(out, start, alphas, taus, 240e6, kind, a, degree,
                            coefs, hs)
        rows["compiled_s"] = time.perf_counter() - t0
        rows["speedup"] = rows["python_s"] / rows["compiled_s"]
    return rows


def main():
    if _kernels is None:
        print("compiled extension not available; timing the fallback only\n")
    rows = synthetic_rows()
    rows.append(focused_element_row())
    header = f"{'case':42s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for row in rows:
        comp = f"{row['compiled_s']:.4f}s" if "compiled_s" in row else "-"
        speed = f"{row['speedup']:.1f}x" if "speedup" in row else "-"
        print(f"{row['case']:42s} {row['python_s']:>9.4f}s {comp:>10s} {speed:>8s}")
        if "max_abs_diff" in row:
            assert row["max_abs_diff"] < 1e-10


if __name__ == "__main__":
    main()
