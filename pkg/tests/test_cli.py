import json
import math

import numpy as np
import pytest
import yaml

from dipsim.cli import main, run_experiment
from dipsim.configio import ConfigError, load_config, validate_config


def _write(tmp_path, name, cfg):
    path = tmp_path / name
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh)
    return path


def _scan_cfg(tmp_path, outname="out_scan"):
    return _write(
        tmp_path,
        "scan.yaml",
        {
            "experiment": "scan-j2",
            "output_dir": str(tmp_path / outname),
            "scan": {
                "L": 8,
                "j1_2piMHz": 1.0,
                "j2_over_j1": [0.1, 0.3, 0.5, 0.7],
            },
        },
    )


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    for kind in ("scan-j2", "ramp", "coupling-map"):
        assert kind in out


def test_validate_ok(tmp_path, capsys):
    path = _scan_cfg(tmp_path)
    assert main(["validate", str(path)]) == 0


def test_missing_field_names_the_field(tmp_path, capsys):
    path = _write(
        tmp_path,
        "bad.yaml",
        {"experiment": "scan-j2", "output_dir": str(tmp_path / "o"), "scan": {"L": 8}},
    )
    code = main(["run", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "scan.j1_2piMHz" in err


def test_oversized_system_rejected_before_running(tmp_path):
    cfg = {
        "experiment": "ramp",
        "output_dir": str(tmp_path / "o"),
        "system": {"L": 12, "j1_2piMHz": 1.0},
    }
    with pytest.raises(ConfigError) as exc:
        validate_config(cfg)
    assert "system.L" in str(exc.value)


def test_scan_j2_outputs(tmp_path):
    path = _scan_cfg(tmp_path)
    manifest = run_experiment(path)
    outdir = tmp_path / "out_scan"
    assert (outdir / "manifest.json").exists()
    data = np.genfromtxt(outdir / "bond_order.csv", delimiter=",", names=True)
    assert data.shape[0] == 4
    assert set(data.dtype.names) >= {"j2_over_j1", "Bz", "Bzz", "Dz_per_dimer"}
    # dimer point row matches the exact product-state values
    row = data[np.isclose(data["j2_over_j1"], 0.5)]
    assert row["Bz"][0] == pytest.approx(-0.25, abs=1e-9)
    assert manifest["outputs"] == ["bond_order.csv"]


def test_rerun_is_bitwise_identical(tmp_path):
    path = _scan_cfg(tmp_path)
    run_experiment(path)
    first = (tmp_path / "out_scan" / "bond_order.csv").read_bytes()
    run_experiment(path)
    second = (tmp_path / "out_scan" / "bond_order.csv").read_bytes()
    assert first == second


def test_manifest_hash_stable_and_config_identifying(tmp_path):
    path = _scan_cfg(tmp_path)
    m1 = run_experiment(path)
    m2 = run_experiment(path)
    assert m1["config_sha256"] == m2["config_sha256"]
    other = _write(
        tmp_path,
        "scan2.yaml",
        {
            "experiment": "scan-j2",
            "output_dir": str(tmp_path / "out_scan"),
            "scan": {"L": 8, "j1_2piMHz": 1.0, "j2_over_j1": [0.2, 0.5]},
        },
    )
    m3 = run_experiment(other)
    assert m3["config_sha256"] != m1["config_sha256"]


def test_coupling_map_experiment(tmp_path):
    path = _write(
        tmp_path,
        "map.yaml",
        {
            "experiment": "coupling-map",
            "output_dir": str(tmp_path / "out_map"),
            "model": {"cavity_enabled": False},
            "grid": {
                "x_min_mm": 0.4,
                "x_max_mm": 3.0,
                "y_min_mm": 0.4,
                "y_max_mm": 3.0,
                "resolution": 21,
            },
        },
    )
    run_experiment(path)
    outdir = tmp_path / "out_map"
    data = np.genfromtxt(outdir / "map.csv", delimiter=",", names=True)
    assert data.shape[0] == 21 * 21
    contour = np.genfromtxt(outdir / "contour.csv", delimiter=",", names=True)
    assert contour.shape[0] > 5


def test_fit_dipole_experiment(tmp_path):
    samples = []
    for r in np.linspace(1.0, 4.0, 8):
        samples.append({"r_mm": float(r), "J_2piMHz": float(-47.0 / (r - 0.15) ** 3)})
    path = _write(
        tmp_path,
        "fit.yaml",
        {
            "experiment": "fit-dipole",
            "output_dir": str(tmp_path / "out_fit"),
            "samples": samples,
            "emit_curve": {"r_min_mm": 0.8, "r_max_mm": 4.5, "points": 50},
        },
    )
    run_experiment(path)
    with open(tmp_path / "out_fit" / "fit.json") as fh:
        fit = json.load(fh)
    assert fit["J0_2piMHz_mm3"] == pytest.approx(47.0, rel=1e-6)
    assert fit["r_m_mm_per_length"]["1.0"] == pytest.approx(0.15, abs=1e-6)
    assert (tmp_path / "out_fit" / "fit_curve.csv").exists()


def test_circuit_extract_experiment(tmp_path):
    path = _write(
        tmp_path,
        "circ.yaml",
        {
            "experiment": "circuit-extract",
            "output_dir": str(tmp_path / "out_circ"),
            "network": {"C_Q_fF": 0.7, "L2_nH": 10.0},
            "sweep": {"L1_min_nH": 9.0, "L1_max_nH": 11.0, "points": 41},
        },
    )
    run_experiment(path)
    with open(tmp_path / "out_circ" / "result.json") as fh:
        res = json.load(fh)
    assert res["J_2piMHz"] == pytest.approx(res["lambda12_2piMHz"], rel=0.02)
    table = np.genfromtxt(tmp_path / "out_circ" / "mode_table.csv", delimiter=",", names=True)
    assert table.shape[0] == 41
    assert "mode1_2piGHz" in table.dtype.names


def test_disorder_scan_experiment(tmp_path):
    path = _write(
        tmp_path,
        "dis.yaml",
        {
            "experiment": "disorder-scan",
            "output_dir": str(tmp_path / "out_dis"),
            "seed": 11,
            "scan": {
                "L": 6,
                "j1_2piMHz": 1.0,
                "axis": "spread_over_j1",
                "values": [0.0, 0.2],
                "realizations": 4,
            },
        },
    )
    run_experiment(path)
    data = np.genfromtxt(
        tmp_path / "out_dis" / "disorder_scan.csv",
        delimiter=",",
        names=True,
        dtype=None,
        encoding="utf-8",
    )
    assert data.shape[0] == 2 * 4  # two grid points, four observables
    assert set(np.unique(data["observable"])) == {"Dz", "Bz", "Bx", "Bzz"}
    clean = data[(data["axis_value"] == 0.0) & (data["observable"] == "Bz")]
    assert clean["stderr"][0] == pytest.approx(0.0, abs=1e-15)


def test_ramp_experiment_small(tmp_path):
    path = _write(
        tmp_path,
        "ramp.yaml",
        {
            "experiment": "ramp",
            "output_dir": str(tmp_path / "out_ramp"),
            "seed": 4,
            "system": {"L": 4, "j1_2piMHz": 1.0, "j2_over_j1": 0.5},
            "schedule": {"T_over_j1": 5.0},
            "noise": {"kappa_2pikHz": 1000.0, "gamma_2pikHz": 1000.0},
            "disorder": {"spread_over_j1": 0.2, "realizations": 2},
            "samples": 5,
        },
    )
    manifest = run_experiment(path)
    outdir = tmp_path / "out_ramp"
    mean = np.genfromtxt(outdir / "ramp_mean.csv", delimiter=",", names=True)
    assert mean.shape[0] == 5
    for col in ("t_us", "mean_sz", "bz", "bx", "bzz", "trace", "purity"):
        assert col in mean.dtype.names
    assert np.all(np.abs(mean["trace"] - 1.0) < 1e-7)
    ideal = np.genfromtxt(outdir / "ramp_ideal.csv", delimiter=",", names=True)
    assert ideal["purity"][-1] == pytest.approx(1.0, abs=1e-7)
    finals = np.genfromtxt(outdir / "ramp_finals.csv", delimiter=",", names=True)
    assert finals.shape[0] == 2
    assert manifest["kernel_backend"] in ("cython", "python")


def test_unknown_kind_rejected(tmp_path):
    path = _write(
        tmp_path, "x.yaml", {"experiment": "teleport", "output_dir": str(tmp_path / "o")}
    )
    with pytest.raises(ConfigError) as exc:
        validate_config(load_config(path))
    assert "experiment" in str(exc.value)
