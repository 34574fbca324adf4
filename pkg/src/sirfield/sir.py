"""Field-signal engine.

A sampled surface, a field point and a medium yield per-point strengths
(alphas) and propagation delays.  Shifted-and-weighted kernels accumulated on
a uniform grid form the basis response; its discrete convolution with the
prefiltered waveform coefficients (scaled by the sampling interval) gives the
field signal.  Applying the prefilter recursions to the basis response
recovers the sampled classical impulse response.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from ._accel import accumulate_shifted_kernels
from .quadrature import SampledSurface, sample_surface
from .splines import BasisFunction, compute_coefficients
from .waveform import PulseModel, sample_pulse

__all__ = [
    "Medium",
    "BaffleCondition",
    "FieldSignal",
    "BasisSir",
    "SingularityError",
    "alpha_weights",
    "accumulate_basis_sir",
    "basis_sir",
    "field_signal",
    "reconstruct_sir",
    "reference_field_signal",
    "decimate_signal",
    "align_signals",
    "sum_signals",
]


class SingularityError(ValueError):
    """Field point coincides with a quadrature point."""


class BaffleCondition(enum.Enum):
    RIGID = "rigid"
    SOFT = "soft"

    @classmethod
    def from_name(cls, name: str) -> "BaffleCondition":
        return cls(name.strip().lower())


@dataclass(frozen=True)
class Medium:
    """Homogeneous propagation medium."""

    sound_speed: float
    density: float = 1000.0

    def __post_init__(self):
        if self.sound_speed <= 0 or self.density <= 0:
            raise ValueError("sound speed and density must be positive")


WATER = Medium(sound_speed=1540.0, density=1000.0)


@dataclass(frozen=True)
class FieldSignal:
    """Uniformly sampled signal; sample k sits at time (start_index + k) * T."""

    samples: np.ndarray
    sampling_interval: float
    start_index: int

    @property
    def times(self) -> np.ndarray:
        return (self.start_index + np.arange(self.samples.size)) * self.sampling_interval

    @property
    def end_index(self) -> int:
        return self.start_index + self.samples.size - 1

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.times, self.samples]),
                   delimiter=",", header="time,amplitude", comments="")

    def metadata(self) -> dict:
        return {
            "rate": 1.0 / self.sampling_interval,
            "start_index": int(self.start_index),
            "count": int(self.samples.size),
        }

    def save(self, csv_path, json_path=None) -> None:
        self.to_csv(csv_path)
        if json_path is None:
            json_path = str(csv_path) + ".json"
        with open(json_path, "w") as fh:
            json.dump(self.metadata(), fh, indent=1)


class BasisSir(FieldSignal):
    """Per-sample accumulation of shifted-weighted kernels (units of a SIR)."""


def alpha_weights(surface: SampledSurface, field_point, medium: Medium,
                  baffle: BaffleCondition):
    """Strengths and delays of every quadrature point as seen from field_point.

    alpha_q = distribution_q * Omega_q * combined_weight_q / (2 pi r_q) and
    tau_q = r_q / c.  The soft-baffle obliquity cosine is not clamped;
    surfaces facing away contribute negatively.
    """
    x = np.asarray(field_point, dtype=float)
    diff = x[None, :] - surface.points
    r = np.linalg.norm(diff, axis=1)
    if np.any(r <= 0.0) or np.min(r) < 1e-15 * np.max(r):
        raise SingularityError("field point coincides with a quadrature point")
    if baffle is BaffleCondition.SOFT:
        omega = np.einsum("ij,ij->i", surface.normals, diff) / r
    else:
        omega = 1.0
    alphas = surface.distribution * omega * surface.combined_weights / (2.0 * math.pi * r)
    delays = r / medium.sound_speed
    return alphas, delays


def accumulate_basis_sir(alphas, delays, f: BasisFunction,
                         sampling_interval: float) -> BasisSir:
    """Accumulate (alpha_q / T) * phi(t/T - tau_q/T) on the minimal integer grid."""
    alphas = np.asarray(alphas, dtype=float)
    delays = np.asarray(delays, dtype=float)
    if alphas.size == 0:
        raise ValueError("no contributions to accumulate")
    T = float(sampling_interval)
    u = delays / T
    slack = math.ceil(f.support / 2.0)
    start = math.floor(np.min(u)) - slack
    end = math.ceil(np.max(u)) + slack
    out = np.zeros(end - start + 1)
    accumulate_shifted_kernels(out, start, alphas, u, 1.0 / T, f)
    return BasisSir(samples=out, sampling_interval=T, start_index=start)


def basis_sir(surface: SampledSurface, field_point, medium: Medium,
              baffle: BaffleCondition, f: BasisFunction,
              sampling_interval: float) -> BasisSir:
    alphas, delays = alpha_weights(surface, field_point, medium, baffle)
    return accumulate_basis_sir(alphas, delays, f, sampling_interval)


def field_signal(basis: BasisSir, coeffs, sampling_interval=None) -> FieldSignal:
    """T-scaled full discrete convolution of waveform coefficients with the basis.

    coeffs must come from the waveform sampled at the basis grid's interval
    (index 0 of coeffs is t = 0).
    """
    if sampling_interval is not None and not math.isclose(
            sampling_interval, basis.sampling_interval, rel_tol=1e-12):
        raise ValueError("sampling-interval mismatch between coefficients and basis")
    coeffs = np.asarray(coeffs, dtype=float)
    y = np.convolve(coeffs, basis.samples) * basis.sampling_interval
    return FieldSignal(samples=y, sampling_interval=basis.sampling_interval,
                       start_index=basis.start_index)


def reconstruct_sir(basis: BasisSir, f: BasisFunction) -> FieldSignal:
    """Sampled classical impulse response: convolution-inverse applied to the basis.

    Identity for interpolating kernels; for the others this runs the same
    causal/anti-causal recursions as the waveform prefiltering.
    """
    values = compute_coefficients(basis.samples, f)
    return FieldSignal(samples=values, sampling_interval=basis.sampling_interval,
                       start_index=basis.start_index)


def decimate_signal(sig: FieldSignal, factor: int) -> FieldSignal:
    """Keep samples whose global index is a multiple of factor (no filtering)."""
    factor = int(factor)
    if factor < 1:
        raise ValueError("decimation factor must be a positive integer")
    first = math.ceil(sig.start_index / factor)
    last = math.floor(sig.end_index / factor)
    idx = np.arange(first, last + 1) * factor - sig.start_index
    return FieldSignal(samples=sig.samples[idx],
                       sampling_interval=sig.sampling_interval * factor,
                       start_index=first)


def reference_field_signal(surface, field_point, model: PulseModel,
                           reference_rate: float, output_rate: float,
                           medium: Medium, baffle: BaffleCondition,
                           kernel: BasisFunction | None = None,
                           distribution=None) -> FieldSignal:
    """Oversampled self-reference, decimated to the output rate.

    The surface is quadrature-sampled at counts matching reference_rate, the
    field signal computed at reference_rate, and the result decimated by the
    integer rate ratio.  A high-order kernel (default degree-five B-spline)
    makes the residual reference error negligible against the signals under
    test; pass the nearest-neighbor kernel for a plain binned reference.
    """
    ratio = reference_rate / output_rate
    factor = round(ratio)
    if abs(ratio - factor) > 1e-9 or factor < 1:
        raise ValueError("reference rate must be an integer multiple of output rate")
    if kernel is None:
        kernel = BasisFunction.bspline(5)
    sampled = sample_surface(surface, reference_rate, medium.sound_speed,
                             distribution)
    wf = sample_pulse(model, reference_rate)
    coeffs = compute_coefficients(wf.samples, kernel)
    basis = basis_sir(sampled, field_point, medium, baffle, kernel,
                      1.0 / reference_rate)
    y = field_signal(basis, coeffs)
    return decimate_signal(y, factor)


def align_signals(a: FieldSignal, b: FieldSignal):
    """Zero-pad both signals to their union support; returns (xa, xb, start)."""
    if not math.isclose(a.sampling_interval, b.sampling_interval, rel_tol=1e-12):
        raise ValueError("signals have different sampling intervals")
    start = min(a.start_index, b.start_index)
    end = max(a.end_index, b.end_index)
    n = end - start + 1
    xa = np.zeros(n)
    xb = np.zeros(n)
    xa[a.start_index - start: a.start_index - start + a.samples.size] = a.samples
    xb[b.start_index - start: b.start_index - start + b.samples.size] = b.samples
    return xa, xb, start

def sum_signals(signals) -> FieldSignal:
    """Superpose signals on the union grid."""
    signals = list(signals)
    if not signals:
        raise ValueError("nothing to sum")
    T = signals[0].sampling_interval
    start = min(s.start_index for s in signals)
    end = max(s.end_index for s in signals)
    total = np.zeros(end - start + 1)
    for s in signals:
        if not math.isclose(s.sampling_interval, T, rel_tol=1e-12):
            raise ValueError("signals have different sampling intervals")
        total[s.start_index - start: s.start_index - start + s.samples.size] += s.samples
    return FieldSignal(samples=total, sampling_interval=T, start_index=start)
