"""Validation experiments: kernel convergence orders and shape error tables.

Two experiments are provided.  The convergence experiment measures the
relative two-norm error of signals synthesized from a random Dirac stream
against their exact analytic counterparts across sampling rates.  The shape
validation computes field signals radiated by canonical transducer shapes at
three characteristic field points and compares them against an oversampled
self-reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import NurbsSurface, make_rectangle, make_spherical_cap
from .quadrature import sample_surface
from .sir import (BaffleCondition, FieldSignal, Medium, accumulate_basis_sir,
                  align_signals, alpha_weights, field_signal,
                  reference_field_signal)
from .splines import BasisFunction, compute_coefficients
from .waveform import (PulseModel, default_pulse_model, envelope_fwhm,
                       eval_pulse, pulse_duration, sample_pulse)

__all__ = [
    "DiracStream",
    "make_dirac_stream",
    "relative_error",
    "dirac_stream_truth",
    "convergence_experiment",
    "convergence_table",
    "fit_loglog_slope",
    "validation_surface",
    "validation_field_points",
    "shape_validation",
    "WAVELENGTH",
    "SOUND_SPEED",
]

# characteristic center wavelength (~5.3 MHz at 1540 m/s) defining the
# validation geometry
WAVELENGTH = 291e-6
SOUND_SPEED = 1540.0

VALIDATION_SHAPES = ("spherical_cap", "rectangle")


@dataclass(frozen=True)
class DiracStream:
    """Random impulse train: uniform times, standard-normal amplitudes."""

    times: np.ndarray
    amplitudes: np.ndarray
    seed: int


def make_dirac_stream(duration: float, count: int, seed: int) -> DiracStream:
    rng = np.random.default_rng(seed)
    times = rng.uniform(0.0, duration, count)
    amplitudes = rng.standard_normal(count)
    return DiracStream(times=times, amplitudes=amplitudes, seed=seed)


def relative_error(estimate: FieldSignal, truth: FieldSignal) -> float:
    """Two-norm of the difference over the two-norm of the truth (union support)."""
    xe, xt, _ = align_signals(estimate, truth)
    denom = np.linalg.norm(xt)
    if denom == 0.0:
        raise ValueError("truth signal has zero norm")
    return float(np.linalg.norm(xt - xe) / denom)


def dirac_stream_truth(model: PulseModel, stream: DiracStream,
                       like: FieldSignal) -> FieldSignal:
    """Exact analytic signal of the stream, evaluated on the grid of ``like``."""
    T = like.sampling_interval
    n = like.samples.size
    out = np.zeros(n)
    width = int(math.floor(pulse_duration(model) / T)) + 2
    offsets = np.arange(width)
    chunk = max(1, (1 << 22) // width)
    for lo in range(0, stream.times.size, chunk):
        t_i = stream.times[lo: lo + chunk]
        a_i = stream.amplitudes[lo: lo + chunk]
        j = np.ceil(t_i / T).astype(np.int64)[:, None] + offsets[None, :]
        vals = a_i[:, None] * eval_pulse(model, j * T - t_i[:, None])
        idx = j.ravel() - like.start_index
        good = (idx >= 0) & (idx < n)
        np.add.at(out, idx[good], vals.ravel()[good])
    return FieldSignal(samples=out, sampling_interval=T,
                       start_index=like.start_index)


def convergence_table(model: PulseModel, kernels, rates, seed: int,
                      cells: float = 500.0, diracs_per_cell: float = 100.0):
    """Relative errors for several kernels over several rates, sharing one stream.

    The stream spans ``cells`` times the waveform resolution cell (its
    envelope FWHM) with ``diracs_per_cell`` impulses per cell on average.
    Returns {kernel_name: [(rate, error), ...]}.
    """
    rates = list(rates)
    if any(b <= a for a, b in zip(rates, rates[1:])):
        raise ValueError("rates must be ascending")
    cell = envelope_fwhm(model)
    duration = cells * cell
    stream = make_dirac_stream(duration, int(round(cells * diracs_per_cell)), seed)
    results = {f.name: [] for f in kernels}
    slack = max(math.ceil(f.support / 2.0) for f in kernels) + 1
    for rate in rates:
        T = 1.0 / rate
        wf = sample_pulse(model, rate)
        u = stream.times / T
        start = math.floor(np.min(u)) - slack
        count = math.ceil(np.max(u)) + slack + wf.samples.size - start
        grid = FieldSignal(np.zeros(count), T, start)
        truth = dirac_stream_truth(model, stream, grid)
        for f in kernels:
            coeffs = compute_coefficients(wf.samples, f)
            basis = accumulate_basis_sir(stream.amplitudes, stream.times, f, T)
            est = field_signal(basis, coeffs)
            results[f.name].append((rate, relative_error(est, truth)))
    return results


def convergence_experiment(model: PulseModel, f: BasisFunction, rates,
                           seed: int, cells: float = 500.0,
                           diracs_per_cell: float = 100.0):
    """Single-kernel convergence curve: list of (rate, relative error)."""
    return convergence_table(model, [f], rates, seed, cells,
                             diracs_per_cell)[f.name]


def fit_loglog_slope(points, fmin: float = 0.0, fmax: float = math.inf) -> float:
    """Least-squares slope of log(error) against log(rate) on [fmin, fmax]."""
    rates = np.array([r for r, _ in points])
    errors = np.array([e for _, e in points])
    mask = (rates >= fmin) & (rates <= fmax) & (errors > 0.0)
    if np.count_nonzero(mask) < 2:
        raise ValueError("need at least two rates in the fit window")
    return float(np.polyfit(np.log(rates[mask]), np.log(errors[mask]), 1)[0])


def validation_surface(shape: str, wavelength: float = WAVELENGTH) -> NurbsSurface:
    """Canonical validation geometry: 20-lambda f/2.4 cap or lambda x 10-lambda plate."""
    if shape == "spherical_cap":
        diameter = 20.0 * wavelength
        return make_spherical_cap(diameter, 2.4 * diameter)
    if shape == "rectangle":
        return make_rectangle(wavelength, 10.0 * wavelength)
    raise ValueError(f"unknown validation shape {shape!r}")


def validation_field_points(shape: str, wavelength: float = WAVELENGTH) -> dict:
    """Characteristic points A (axis), B (edge projection), C (outside projection)."""
    lam = wavelength
    if shape == "spherical_cap":
        depth = 10.0 * lam
        return {
            "A": np.array([0.0, 0.0, depth]),
            "B": np.array([8.1 * lam, 0.0, depth]),
            "C": np.array([16.2 * lam, 0.0, depth]),
        }
    if shape == "rectangle":
        return {
            "A": np.array([0.0, lam / 2.0, lam / 2.0]),
            "B": np.array([lam / 2.0, lam / 2.0, lam / 2.0]),
            "C": np.array([lam, lam / 2.0, lam / 2.0]),
        }
    raise ValueError(f"unknown validation shape {shape!r}")


def shape_validation(shape: str, baffle: BaffleCondition, kernels, rate: float,
                     field_points: dict | None = None, ref_multiple: int = 8,
                     model: PulseModel | None = None,
                     medium: Medium | None = None,
                     wavelength: float = WAVELENGTH,
                     ref_kernel: BasisFunction | None = None):
    """Error table of field signals against the oversampled self-reference.

    Returns a list of row dicts (shape, baffle, rate, point, kernel, error),
    ordered by field point then kernel.
    """
    model = model or default_pulse_model()
    medium = medium or Medium(sound_speed=SOUND_SPEED)
    surface = validation_surface(shape, wavelength)
    points = field_points or validation_field_points(shape, wavelength)
    sampled = sample_surface(surface, rate, medium.sound_speed)
    wf = sample_pulse(model, rate)
    coeffs = {f.name: compute_coefficients(wf.samples, f) for f in kernels}
    rows = []
    for label, point in points.items():
        reference = reference_field_signal(surface, point, model,
                                           ref_multiple * rate, rate, medium,
                                           baffle, kernel=ref_kernel)
        alphas, delays = alpha_weights(sampled, point, medium, baffle)
        for f in kernels:
            basis = accumulate_basis_sir(alphas, delays, f, 1.0 / rate)
            est = field_signal(basis, coeffs[f.name])
            rows.append({
                "shape": shape,
                "baffle": baffle.value,
                "rate": rate,
                "point": label,
                "kernel": f.name,
                "error": relative_error(est, reference),
            })
    return rows
