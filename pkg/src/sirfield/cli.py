"""Command-line interface: reproducible experiment runs with CSV + manifest output.

Subcommands: ``convergence`` (kernel order study), ``validate-shape`` (error
tables against the oversampled self-reference), ``field`` (single-point field
signal), ``describe-surface`` (geometry report).  Any long flag can also be
supplied through a ``key = value`` config file via --config; explicit flags
win.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend_name
from .experiments import (SOUND_SPEED, WAVELENGTH, convergence_table,
                          fit_loglog_slope, shape_validation,
                          validation_field_points, validation_surface)
from .geometry import decompose_to_bezier, surface_to_json
from .quadrature import sample_surface, select_point_counts
from .sir import (BaffleCondition, Medium, basis_sir, field_signal,
                  reference_field_signal)
from .splines import BasisFunction, compute_coefficients
from .waveform import default_pulse_model, sample_pulse

_SHAPE_NAMES = {"spherical-cap": "spherical_cap", "spherical_cap": "spherical_cap",
                "rectangle": "rectangle"}


def _parse_kernels(text: str):
    return [BasisFunction.from_name(tok) for tok in text.split(",") if tok.strip()]


def _parse_rates(text: str):
    if ":" in text:
        lo, hi, n = text.split(":")
        return np.geomspace(float(lo), float(hi), int(n)).tolist()
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_point(text: str):
    vals = [float(tok) for tok in text.split(",")]
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("point must be x,y,z")
    return np.array(vals)


def _load_config(path: str) -> dict:
    """Read 'key = value' lines; '#' starts a comment."""
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (need key = value): {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _write_manifest(outdir: Path, command: str, params: dict, outputs: list):
    manifest = {
        "command": command,
        "parameters": params,
        "versions": {
            "sirfield": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "backend": backend_name,
        "outputs": [str(o) for o in outputs],
    }
    try:
        import scipy
        manifest["versions"]["scipy"] = scipy.__version__
    except ImportError:
        pass
    path = outdir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1)
    return path


def _write_rows(path: Path, rows, fieldnames):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def _cmd_convergence(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    kernels = _parse_kernels(args.kernels)
    rates = sorted(_parse_rates(args.rates))
    model = default_pulse_model()
    table = convergence_table(model, kernels, rates, seed=args.seed,
                              cells=args.cells, diracs_per_cell=args.per_cell)
    rows = []
    for name, points in table.items():
        for rate, err in points:
            rows.append({"kernel": name, "rate": rate, "error": err})
    csv_path = outdir / "convergence.csv"
    _write_rows(csv_path, rows, ["kernel", "rate", "error"])
    for name, points in table.items():
        try:
            slope = fit_loglog_slope(points)
            print(f"{name}: measured order {-slope:.2f} over "
                  f"[{rates[0]:.3g}, {rates[-1]:.3g}] Hz")
        except ValueError:
            pass
    params = {"kernels": args.kernels, "rates": rates, "seed": args.seed,
              "cells": args.cells, "per_cell": args.per_cell}
    _write_manifest(outdir, "convergence", params, [csv_path])
    print(f"wrote {csv_path}")
    return 0


def _cmd_validate_shape(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    shape = _SHAPE_NAMES[args.shape]
    kernels = _parse_kernels(args.kernels)
    baffle = BaffleCondition.from_name(args.baffle)
    rows = shape_validation(shape, baffle, kernels, args.rate,
                            ref_multiple=args.ref_multiple)
    csv_path = outdir / "validation.csv"
    _write_rows(csv_path, rows, ["shape", "baffle", "rate", "point", "kernel",
                                 "error"])
    for row in rows:
        print(f"{row['point']} {row['kernel']}: {row['error']:.3e}")
    params = {"shape": shape, "baffle": args.baffle, "kernels": args.kernels,
              "rate": args.rate, "ref_multiple": args.ref_multiple}
    _write_manifest(outdir, "validate-shape", params, [csv_path])
    print(f"wrote {csv_path}")
    return 0


def _cmd_field(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    shape = _SHAPE_NAMES[args.shape]
    surface = validation_surface(shape)
    medium = Medium(sound_speed=SOUND_SPEED)
    baffle = BaffleCondition.from_name(args.baffle)
    kernel = BasisFunction.from_name(args.kernel)
    if args.point is not None:
        point = _parse_point(args.point)
    else:
        point = validation_field_points(shape)["A"]
    model = default_pulse_model()
    if args.reference_multiple > 1:
        sig = reference_field_signal(surface, point, model,
                                     args.reference_multiple * args.rate,
                                     args.rate, medium, baffle, kernel=kernel)
    else:
        sampled = sample_surface(surface, args.rate, medium.sound_speed)
        wf = sample_pulse(model, args.rate)
        coeffs = compute_coefficients(wf.samples, kernel)
        basis = basis_sir(sampled, point, medium, baffle, kernel, 1.0 / args.rate)
        sig = field_signal(basis, coeffs)
    csv_path = outdir / "field.csv"
    json_path = outdir / "field.csv.json"
    sig.save(csv_path, json_path)
    params = {"shape": shape, "baffle": args.baffle, "kernel": args.kernel,
              "rate": args.rate, "point": point.tolist(),
              "reference_multiple": args.reference_multiple}
    _write_manifest(outdir, "field", params, [csv_path, json_path])
    print(f"wrote {csv_path} ({sig.samples.size} samples, "
          f"start index {sig.start_index})")
    return 0


def _cmd_describe_surface(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    shape = _SHAPE_NAMES[args.shape]
    surface = validation_surface(shape)
    patches = decompose_to_bezier(surface)
    counts = [select_point_counts(p, args.rate, SOUND_SPEED) for p in patches]
    sampled = sample_surface(surface, args.rate, SOUND_SPEED)
    doc = {
        "shape": shape,
        "wavelength": WAVELENGTH,
        "surface": surface_to_json(surface),
        "patch_count": len(patches),
        "quadrature_counts": counts,
        "quadrature_points": sampled.n_points,
        "area": sampled.area,
    }
    json_path = outdir / "surface.json"
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=1)
    print(f"{shape}: {len(patches)} patch(es), counts {counts}, "
          f"area {sampled.area:.6e} m^2")
    params = {"shape": shape, "rate": args.rate}
    _write_manifest(outdir, "describe-surface", params, [json_path])
    print(f"wrote {json_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirfield",
        description="Transient acoustic field simulation experiments")
    parser.add_argument("--config", default=None,
                        help="key = value file supplying defaults for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convergence", help="kernel convergence-order study")
    p.add_argument("--kernels", default="nearest,linear,keys,bspline2,bspline3,"
                                        "bspline4,bspline5,omoms3")
    p.add_argument("--rates", default="20e6:1e9:15",
                   help="comma list of Hz, or lo:hi:n log spacing")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cells", type=float, default=500.0,
                   help="signal duration in waveform resolution cells")
    p.add_argument("--per-cell", type=float, default=100.0,
                   help="average impulses per resolution cell")
    p.add_argument("--output", default="results/convergence")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("validate-shape", help="error table against self-reference")
    p.add_argument("--shape", choices=sorted(_SHAPE_NAMES), required=True)
    p.add_argument("--baffle", choices=["rigid", "soft"], default="rigid")
    p.add_argument("--kernels", default="nearest,linear,keys,bspline3,omoms3,"
                                        "bspline5")
    p.add_argument("--rate", type=float, default=30e6)
    p.add_argument("--ref-multiple", type=int, default=8)
    p.add_argument("--output", default="results/validation")
    p.set_defaults(func=_cmd_validate_shape)

    p = sub.add_parser("field", help="field signal at a single point")
    p.add_argument("--shape", choices=sorted(_SHAPE_NAMES), required=True)
    p.add_argument("--baffle", choices=["rigid", "soft"], default="rigid")
    p.add_argument("--kernel", default="bspline5")
    p.add_argument("--rate", type=float, default=30e6)
    p.add_argument("--point", default=None, help="x,y,z in meters")
    p.add_argument("--reference-multiple", type=int, default=1,
                   help=">1 computes the oversampled decimated reference")
    p.add_argument("--output", default="results/field")
    p.set_defaults(func=_cmd_field)

    p = sub.add_parser("describe-surface", help="geometry and quadrature report")
    p.add_argument("--shape", choices=sorted(_SHAPE_NAMES), required=True)
    p.add_argument("--rate", type=float, default=30e6)
    p.add_argument("--output", default="results/surface")
    p.set_defaults(func=_cmd_describe_surface)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # apply config-file values as defaults, so explicit flags override them
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        config = _load_config(cfg_path)
        for action in parser._subparsers._group_actions[0].choices.values():
            known = {a.dest for a in action._actions}
            action.set_defaults(**{k: v for k, v in config.items() if k in known})
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
