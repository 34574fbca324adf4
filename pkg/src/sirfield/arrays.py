"""Multi-element arrays: per-element delays, apodization, pulse-echo synthesis.

Element delays are applied inside the kernel argument (continuous shifts of
the propagation delays), never by resampling signals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import surface_from_json, surface_to_json
from .quadrature import SampledSurface, sample_surface
from .sir import (BaffleCondition, FieldSignal, Medium, accumulate_basis_sir,
                  alpha_weights, basis_sir, field_signal, sum_signals)
from .splines import BasisFunction

__all__ = [
    "ArrayElement",
    "TransducerArray",
    "array_field_signal",
    "pulse_echo_signal",
    "linear_array",
    "focus_delays",
    "array_to_json",
    "array_from_json",
    "sample_array",
]


@dataclass(frozen=True)
class ArrayElement:
    """A sampled element surface, optionally with its own waveform coefficients."""

    surface: SampledSurface
    coeffs: np.ndarray | None = None


@dataclass(frozen=True)
class TransducerArray:
    elements: tuple
    delays: np.ndarray
    apodization: np.ndarray

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=float))
        object.__setattr__(self, "apodization",
                           np.asarray(self.apodization, dtype=float))
        n = len(elements)
        if self.delays.shape != (n,) or self.apodization.shape != (n,):
            raise ValueError("delays and apodization must match the element count")

    @property
    def n_elements(self) -> int:
        return len(self.elements)


def array_field_signal(array: TransducerArray, field_point, medium: Medium,
                       baffle: BaffleCondition, f: BasisFunction,
                       shared_coeffs, sampling_interval: float) -> FieldSignal:
    """Delayed, apodized superposition of the element responses.

    Elements without their own coefficients share shared_coeffs; their
    weighted contributions are pooled into a single basis accumulation so the
    shared convolution runs once.
    """
    T = float(sampling_interval)
    pool_alphas = []
    pool_taus = []
    parts = []
    for element, delay, apod in zip(array.elements, array.delays,
                                    array.apodization):
        alphas, taus = alpha_weights(element.surface, field_point, medium, baffle)
        taus = taus + delay
        if element.coeffs is None:
            pool_alphas.append(apod * alphas)
            pool_taus.append(taus)
        else:
            basis = accumulate_basis_sir(apod * alphas, taus, f, T)
            parts.append(field_signal(basis, element.coeffs, T))
    if pool_alphas:
        if shared_coeffs is None:
            raise ValueError("elements without coefficients need shared_coeffs")
        basis = accumulate_basis_sir(np.concatenate(pool_alphas),
                                     np.concatenate(pool_taus), f, T)
        parts.append(field_signal(basis, shared_coeffs, T))
    return sum_signals(parts)


def pulse_echo_signal(tx: TransducerArray, rx_surface: SampledSurface,
                      scatterer, amplitude: float, medium: Medium,
                      baffle: BaffleCondition, f: BasisFunction,
                      tx_coeffs, rx_coeffs,
                      sampling_interval: float) -> FieldSignal:
    """Echo of an ideal point scatterer: conv of transmit and receive signals.

    The transmit field signal of the array at the scatterer is convolved with
    the receive element's field signal at the scatterer and scaled by the
    scattering amplitude; transmit and receive waveforms may differ.
    """
    T = float(sampling_interval)
    y_tx = array_field_signal(tx, scatterer, medium, baffle, f, tx_coeffs, T)
    rx_basis = basis_sir(rx_surface, scatterer, medium, baffle, f, T)
    y_rx = field_signal(rx_basis, rx_coeffs, T)
    echo = amplitude * T * np.convolve(y_tx.samples, y_rx.samples)
    return FieldSignal(samples=echo, sampling_interval=T,
                       start_index=y_tx.start_index + y_rx.start_index)


def linear_array(n_elements: int, pitch: float, width: float, height: float,
                 elevation_radius: float | None = None):
    """Element surfaces of a linear array centered at the origin along x."""
    from .geometry import make_cylindrical_shell, make_rectangle

    if n_elements < 1:
        raise ValueError("need at least one element")
    if width > pitch:
        raise ValueError("element width cannot exceed the pitch")
    if elevation_radius is None:
        proto = make_rectangle(width, height)
    else:
        proto = make_cylindrical_shell(width, height, elevation_radius)
    offset0 = -(n_elements - 1) * pitch / 2.0
    return [proto.translated([offset0 + i * pitch, 0.0, 0.0])
            for i in range(n_elements)]


def focus_delays(element_centers, focus_point, sound_speed: float) -> np.ndarray:
    """Transmit delays so all element contributions arrive together at the focus."""
    centers = np.asarray(element_centers, dtype=float)
    focus = np.asarray(focus_point, dtype=float)
    r = np.linalg.norm(centers - focus[None, :], axis=1)
    return (np.max(r) - r) / sound_speed


def array_to_json(surfaces, delays, apodization) -> dict:
    return {
        "elements": [surface_to_json(s) for s in surfaces],
        "delays": np.asarray(delays, dtype=float).tolist(),
        "apodization": np.asarray(apodization, dtype=float).tolist(),
    }


def array_from_json(doc: dict):
    surfaces = [surface_from_json(e) for e in doc["elements"]]
    delays = np.array(doc["delays"], dtype=float)
    apod = np.array(doc["apodization"], dtype=float)
    if len(surfaces) != delays.size or len(surfaces) != apod.size:
        raise ValueError("element, delay and apodization counts disagree")
    return surfaces, delays, apod


def save_array(surfaces, delays, apodization, path) -> None:
    with open(path, "w") as fh:
        json.dump(array_to_json(surfaces, delays, apodization), fh, indent=1)


def load_array(path):
    with open(path) as fh:
        return array_from_json(json.load(fh))


def sample_array(surfaces, delays, apodization, sampling_rate: float,
                 sound_speed: float, element_coeffs=None) -> TransducerArray:
    """Quadrature-sample each element geometry at counts for sampling_rate."""
    elements = []
    for i, s in enumerate(surfaces):
        coeffs = None if element_coeffs is None else element_coeffs[i]
        elements.append(ArrayElement(
            surface=sample_surface(s, sampling_rate, sound_speed),
            coeffs=coeffs))
    return TransducerArray(elements=tuple(elements), delays=delays,
                           apodization=apodization)
