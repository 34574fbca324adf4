"""CLI subcommands, config-file handling, manifest output."""

import csv
import json

import numpy as np
import pytest

from sirfield.cli import main


def _read_manifest(outdir):
    with open(outdir / "manifest.json") as fh:
        return json.load(fh)


def test_convergence_command(tmp_path):
    out = tmp_path / "conv"
    rc = main(["convergence", "--kernels", "nearest,bspline3",
               "--rates", "50e6,100e6,200e6", "--seed", "5",
               "--cells", "20", "--per-cell", "5", "--output", str(out)])
    assert rc == 0
    with open(out / "convergence.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    kernels = {row["kernel"] for row in rows}
    assert kernels == {"nearest", "bspline3"}
    errors = [float(row["error"]) for row in rows if row["kernel"] == "bspline3"]
    assert errors == sorted(errors, reverse=True)
    manifest = _read_manifest(out)
    assert manifest["command"] == "convergence"
    assert manifest["parameters"]["seed"] == 5
    assert manifest["backend"] in ("compiled", "python")
    assert "numpy" in manifest["versions"]


def test_validate_shape_command(tmp_path):
    out = tmp_path / "val"
    rc = main(["validate-shape", "--shape", "rectangle", "--baffle", "rigid",
               "--kernels", "nearest,bspline3", "--rate", "30e6",
               "--ref-multiple", "4", "--output", str(out)])
    assert rc == 0
    with open(out / "validation.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6  # 3 points x 2 kernels
    for row in rows:
        assert 0.0 < float(row["error"]) < 1.0
    by_point = {}
    for row in rows:
        by_point.setdefault(row["point"], {})[row["kernel"]] = float(row["error"])
    for errs in by_point.values():
        assert errs["bspline3"] < errs["nearest"]


def test_field_command_and_reference(tmp_path):
    out = tmp_path / "field"
    rc = main(["field", "--shape", "rectangle", "--baffle", "soft",
               "--kernel", "bspline5", "--rate", "30e6",
               "--point", "0,0.0001455,0.0001455", "--output", str(out)])
    assert rc == 0
    data = np.loadtxt(out / "field.csv", delimiter=",", skiprows=1)
    assert data.shape[1] == 2
    meta = json.loads((out / "field.csv.json").read_text())
    assert meta["count"] == data.shape[0]
    assert meta["rate"] == 30e6

    out2 = tmp_path / "field-ref"
    rc = main(["field", "--shape", "rectangle", "--baffle", "soft",
               "--kernel", "bspline5", "--rate", "30e6",
               "--point", "0,0.0001455,0.0001455",
               "--reference-multiple", "4", "--output", str(out2)])
    assert rc == 0
    ref = np.loadtxt(out2 / "field.csv", delimiter=",", skiprows=1)
    meta_ref = json.loads((out2 / "field.csv.json").read_text())
    # align the two runs on their shared global sample indices
    lo = max(meta["start_index"], meta_ref["start_index"])
    hi = min(meta["start_index"] + len(data), meta_ref["start_index"] + len(ref))
    da = data[lo - meta["start_index"]: hi - meta["start_index"], 1]
    db = ref[lo - meta_ref["start_index"]: hi - meta_ref["start_index"], 1]
    assert np.linalg.norm(da - db) < 0.02 * np.linalg.norm(db)


def test_describe_surface_command(tmp_path):
    out = tmp_path / "surf"
    rc = main(["describe-surface", "--shape", "spherical-cap", "--rate", "30e6",
               "--output", str(out)])
    assert rc == 0
    doc = json.loads((out / "surface.json").read_text())
    assert doc["patch_count"] == 4
    assert len(doc["quadrature_counts"]) == 4
    lam = doc["wavelength"]
    R = 48 * lam
    analytic = 2 * np.pi * R * (R - np.sqrt(R * R - (10 * lam) ** 2))
    assert doc["area"] == pytest.approx(analytic, rel=1e-9)


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment configuration\n"
                   "kernels = nearest\n"
                   "rates = 50e6,100e6\n"
                   "cells = 10\n"
                   "per_cell = 4\n"
                   f"output = {tmp_path / 'fromcfg'}\n")
    rc = main(["--config", str(cfg), "convergence", "--seed", "9"])
    assert rc == 0
    with open(tmp_path / "fromcfg" / "convergence.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert {row["kernel"] for row in rows} == {"nearest"}
    assert len(rows) == 2
    # explicit flags beat config values
    rc = main(["--config", str(cfg), "convergence", "--seed", "9",
               "--rates", "50e6", "--output", str(tmp_path / "override")])
    assert rc == 0
    with open(tmp_path / "override" / "convergence.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1


def test_bad_config_line_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("rates 50e6\n")
    with pytest.raises(ValueError):
        main(["--config", str(cfg), "convergence", "--output",
              str(tmp_path / "x")])
