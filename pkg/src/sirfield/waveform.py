"""Excitation pulse model: differentiated log-normal-windowed sinusoid.

The analytic waveform is d/dt [ L(t) sin(2 pi f t) ] with L the log-normal
probability density.  The time derivative guarantees a vanishing DC component.
Truncation is decided on the trailing log-normal window level; the envelope
used for bandwidth-style measurements is the analytic-signal magnitude
sqrt(L'(t)^2 + (2 pi f L(t))^2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PulseModel",
    "Waveform",
    "default_pulse_model",
    "eval_pulse",
    "pulse_envelope",
    "pulse_duration",
    "envelope_fwhm",
    "sample_pulse",
    "spectrum_stats",
    "save_waveform",
    "load_waveform",
]


@dataclass(frozen=True)
class PulseModel:
    """Log-normal location/scale, carrier frequency, trailing truncation level."""

    mu: float
    sigma: float
    carrier_frequency: float
    truncation_level_db: float = -320.0

    def __post_init__(self):
        if self.sigma <= 0 or self.carrier_frequency <= 0:
            raise ValueError("sigma and carrier frequency must be positive")
        if self.truncation_level_db >= 0:
            raise ValueError("truncation level must be negative (dB)")


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled excitation signal."""

    samples: np.ndarray
    sampling_interval: float
    start_time: float = 0.0

    def __post_init__(self):
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("waveform needs at least one sample")
        if self.sampling_interval <= 0:
            raise ValueError("sampling interval must be positive")

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.samples.size) * self.sampling_interval


def default_pulse_model() -> PulseModel:
    """Pulse used throughout the validation experiments (center ~5.3 MHz)."""
    return PulseModel(mu=-14.802665843192596, sigma=0.25551258495020857,
                      carrier_frequency=4.75e6)


def _window_and_derivative(model: PulseModel, t: np.ndarray):
    """Log-normal density L(t) and dL/dt, both 0 for t <= 0."""
    t = np.asarray(t, dtype=float)
    pos = t > 0.0
    L = np.zeros_like(t)
    dL = np.zeros_like(t)
    ts = np.where(pos, t, 1.0)
    x = np.log(ts)
    z = (x - model.mu) / model.sigma
    dens = np.exp(-0.5 * z * z) / (ts * model.sigma * math.sqrt(2.0 * math.pi))
    L[pos] = dens[pos]
    dL[pos] = (-dens * (z / model.sigma + 1.0) / ts)[pos]
    return L, dL


def eval_pulse(model: PulseModel, t) -> np.ndarray:
    """Analytic waveform value(s): L'(t) sin(2 pi f t) + 2 pi f L(t) cos(2 pi f t)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    L, dL = _window_and_derivative(model, np.atleast_1d(t))
    w = 2.0 * math.pi * model.carrier_frequency
    tv = np.atleast_1d(t)
    out = dL * np.sin(w * tv) + w * L * np.cos(w * tv)
    return float(out[0]) if scalar else out


def pulse_envelope(model: PulseModel, t) -> np.ndarray:
    """Slowly-varying amplitude of the waveform: sqrt(L'^2 + (2 pi f L)^2)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    L, dL = _window_and_derivative(model, np.atleast_1d(t))
    w = 2.0 * math.pi * model.carrier_frequency
    out = np.hypot(dL, w * L)
    return float(out[0]) if scalar else out


def pulse_duration(model: PulseModel) -> float:
    """Time at which the trailing window falls to the truncation level.

    Closed form: the log of the window is quadratic in log t, so the crossing
    solves y^2/(2 sigma^2) + y + sigma^2/2 = D with y = log t - mu and
    D the level drop in nats.
    """
    drop = -model.truncation_level_db / 20.0 * math.log(10.0)
    s2 = model.sigma * model.sigma
    y = -s2 + model.sigma * math.sqrt(2.0 * drop - s2)
    return math.exp(model.mu + y)


def envelope_fwhm(model: PulseModel, resolution: int = 1 << 16) -> float:
    """Full width at half maximum of the waveform envelope."""
    t_end = pulse_duration(model)
    t = np.linspace(t_end / resolution, t_end, resolution)
    env = pulse_envelope(model, t)
    imax = int(np.argmax(env))
    half = env[imax] / 2.0
    left = t[: imax + 1]
    right = t[imax:]
    t_lo = np.interp(half, env[: imax + 1], left)
    t_hi = np.interp(-half, -env[imax:], right)
    return float(t_hi - t_lo)


def sample_pulse(model: PulseModel, sampling_rate: float) -> Waveform:
    """Sample from t = 0 until the trailing window crosses the truncation level."""
    if sampling_rate <= 0:
        raise ValueError("sampling rate must be positive")
    t_end = pulse_duration(model)
    count = int(math.floor(t_end * sampling_rate)) + 1
    t = np.arange(count) / sampling_rate
    return Waveform(samples=eval_pulse(model, t),
                    sampling_interval=1.0 / sampling_rate)


def spectrum_stats(model: PulseModel, rate: float = 4.0e9) -> dict:
    """Spectral peak, -6 dB edges, center (edge midpoint) and fractional bandwidth."""
    wf = sample_pulse(model, rate)
    n = int(2 ** math.ceil(math.log2(wf.samples.size * 4)))
    mag = np.abs(np.fft.rfft(wf.samples, n))
    freqs = np.fft.rfftfreq(n, wf.sampling_interval)
    ipk = int(np.argmax(mag))
    peak = mag[ipk]
    half = peak / 10.0 ** (6.0 / 20.0)
    lo = ipk
    while lo > 0 and mag[lo] > half:
        lo -= 1
    f_lo = np.interp(half, mag[lo: lo + 2], freqs[lo: lo + 2])
    hi = ipk
    while hi < mag.size - 1 and mag[hi] > half:
        hi += 1
    f_hi = np.interp(-half, -mag[hi - 1: hi + 1], freqs[hi - 1: hi + 1])
    center = 0.5 * (f_lo + f_hi)
    return {
        "peak_frequency": float(freqs[ipk]),
        "f_low": float(f_lo),
        "f_high": float(f_hi),
        "center_frequency": float(center),
        "fractional_bandwidth": float((f_hi - f_lo) / center),
    }


def save_waveform(wf: Waveform, csv_path, json_path=None) -> None:
    """Two-column CSV (time, amplitude) plus a JSON header."""
    np.savetxt(csv_path, np.column_stack([wf.times, wf.samples]), delimiter=",",
               header="time,amplitude", comments="")
    if json_path is None:
        json_path = str(csv_path) + ".json"
    header = {
        "rate": 1.0 / wf.sampling_interval,
        "start_time": wf.start_time,
        "count": int(wf.samples.size),
    }
    with open(json_path, "w") as fh:
        json.dump(header, fh, indent=1)


def load_waveform(csv_path, json_path=None) -> Waveform:
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    if json_path is None:
        json_path = str(csv_path) + ".json"
    with open(json_path) as fh:
        header = json.load(fh)
    if int(header["count"]) != data.shape[0]:
        raise ValueError("JSON header count does not match CSV rows")
    return Waveform(samples=data[:, 1], sampling_interval=1.0 / header["rate"],
                    start_time=float(header["start_time"]))
