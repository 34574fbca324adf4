"""Transient acoustic field simulation for arbitrarily shaped transducers.

Surfaces are exact rational (NURBS) geometry decomposed into smooth Bezier
patches carrying Gauss-Legendre quadrature points.  Field signals at a point
are synthesized as the discrete convolution of prefiltered excitation-waveform
coefficients with a basis impulse response assembled from shifted-and-weighted
interpolation kernels at the quadrature delays.
"""

from ._accel import backend_name as accel_backend
from .arrays import (ArrayElement, TransducerArray, array_field_signal,
                     array_from_json, array_to_json, focus_delays, linear_array,
                     load_array, pulse_echo_signal, sample_array, save_array)
from .experiments import (DiracStream, convergence_experiment, convergence_table,
                          fit_loglog_slope, make_dirac_stream, relative_error,
                          shape_validation, validation_field_points,
                          validation_surface)
from .geometry import (BezierPatch, DegenerateFrameError, KnotVector,
                       NurbsSurface, SurfaceFrame, decompose_to_bezier,
                       eval_bspline_basis, eval_surface, frames_grid,
                       load_surface, make_cylindrical_shell, make_rectangle,
                       make_spherical_cap, make_toroidal_shell, save_surface,
                       surface_from_json, surface_to_json)
from .quadrature import (GaussRule1D, SampledSurface, gauss_legendre,
                         point_source, sample_patch, sample_surface,
                         select_point_counts)
from .sir import (WATER, BaffleCondition, BasisSir, FieldSignal, Medium,
                  SingularityError, accumulate_basis_sir, align_signals,
                  alpha_weights, basis_sir, decimate_signal, field_signal,
                  reconstruct_sir, reference_field_signal, sum_signals)
from .splines import (BasisFunction, Prefilter, compute_coefficients,
                      eval_basis, prefilter_poles, reconstruct)
from .waveform import (PulseModel, Waveform, default_pulse_model, envelope_fwhm,
                       eval_pulse, load_waveform, pulse_duration,
                       pulse_envelope, sample_pulse, save_waveform,
                       spectrum_stats)

__version__ = "0.1.0"
