"""Command-line runner: one config file, one experiment, one output directory.

    dipsim run <config.yaml>        execute and write CSV/JSON outputs
    dipsim validate <config.yaml>   schema-check only
    dipsim list-experiments         show the experiment kinds

Reruns with an identical config produce bitwise-identical data files
(floats printed with 17 significant digits); the manifest records the
resolved config, its hash, seeds, versions and wall time.  Worker count
for ensembles comes from DIPSIM_WORKERS (default: all cores).
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND as KERNEL_BACKEND
from .configio import ConfigError, EXPERIMENT_KINDS, config_hash, load_config, validate_config
from .coupling import (
    CouplingModel,
    FitSample,
    coupling_map,
    dipole_coupling,
    fit_dipole_model,
)
from .circuit import TwoQubitCircuit, extract_coupling, normal_modes, quantize, effective_coupling
from .disorder import DisorderSpec, disorder_scan
from .edsolver import ground_state
from .geometry import PairGeometry, QubitSite
from .hamiltonian import build_ladder_hamiltonian
from .lindblad import (
    ENSEMBLE_COLUMNS,
    NoiseParams,
    default_ramp,
    ensemble_ramp,
    evolve,
)
from .observables import full_bond_report
from .units import TWO_PI


def _fmt(value):
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _site_from_dict(d):
    return QubitSite(
        position=(d["x_mm"], d["y_mm"]),
        dipole_angle=math.radians(d["angle_deg"]),
        antenna_length=d["d_m"],
        cavity_angle=math.radians(d["phi_deg"]),
    )


def _run_coupling_map(block, outdir):
    mb = block["model"]
    model = CouplingModel(
        J0=mb["J0_2piMHz_mm3"],
        r_m=mb["r_m_mm"],
        g_max=mb["g_max_2piMHz"],
        Delta=mb["Delta_2piMHz"],
        cavity_enabled=mb["cavity_enabled"],
    )
    fixed = _site_from_dict(block["fixed_site"])
    probe = block["probe"]
    grid = block["grid"]
    m = coupling_map(
        fixed,
        model,
        x_range=(grid["x_min_mm"], grid["x_max_mm"]),
        y_range=(grid["y_min_mm"], grid["y_max_mm"]),
        resolution=grid["resolution"],
        probe_angle=math.radians(probe["angle_deg"]),
        probe_length=probe["d_m"],
        probe_cavity_angle=math.radians(probe["phi_deg"]),
    )
    rows = []
    for iy, yv in enumerate(m.y):
        for ix, xv in enumerate(m.x):
            rows.append((float(xv), float(yv), float(m.J[iy, ix])))
    write_csv(outdir / "map.csv", ("x_mm", "y_mm", "J_2piMHz"), rows)
    write_csv(outdir / "contour.csv", ("x_mm", "y_mm"), [tuple(map(float, p)) for p in m.contour])
    return ["map.csv", "contour.csv"]


def _run_fit_dipole(block, outdir):
    samples = []
    for s in block["samples"]:
        pg = PairGeometry(
            r=s["r_mm"],
            theta1=math.radians(s["theta1_deg"]),
            theta2=math.radians(s["theta2_deg"]),
            theta=math.radians(s["theta_deg"]),
        )
        samples.append(
            FitSample(
                pair=pg,
                J=s["J_2piMHz"],
                d_a=s["d_a"],
                d_b=s["d_b"],
                g_a=s["g_a_2piMHz"],
                g_b=s["g_b_2piMHz"],
                sin_phi_a=s["sin_phi_a"],
                sin_phi_b=s["sin_phi_b"],
                length_key=s["length_key"],
            )
        )
    j0, rms, residual = fit_dipole_model(samples, Delta=block["Delta_2piMHz"])
    result = {
        "J0_2piMHz_mm3": j0,
        "r_m_mm_per_length": {str(k): v for k, v in sorted(rms.items())},
        "relative_residual": residual,
        "n_samples": len(samples),
    }
    with open(outdir / "fit.json", "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
    outputs = ["fit.json"]
    if "emit_curve" in block:
        spec = block["emit_curve"]
        rows = []
        rs = np.linspace(spec["r_min_mm"], spec["r_max_mm"], spec["points"])
        for key in sorted(rms):
            model = CouplingModel(J0=j0, r_m=rms[key], cavity_enabled=False)
            ref = [s for s in samples if s.length_key == key][0]
            for r in rs:
                if r <= rms[key]:
                    continue
                pg = PairGeometry(r=float(r), theta1=ref.pair.theta1, theta2=ref.pair.theta2, theta=ref.pair.theta)
                site_a = QubitSite(position=(0, 0), antenna_length=ref.d_a)
                site_b = QubitSite(position=(r, 0), antenna_length=ref.d_b)
                j = dipole_coupling(pg, site_a, site_b, model)
                if block["Delta_2piMHz"]:
                    j += ref.g_a * ref.g_b * ref.d_a * ref.d_b * ref.sin_phi_a * ref.sin_phi_b / (
                        2.0 * block["Delta_2piMHz"]
                    )
                rows.append((float(key), float(r), float(j)))
        write_csv(outdir / "fit_curve.csv", ("length_key", "r_mm", "J_2piMHz"), rows)
        outputs.append("fit_curve.csv")
    return outputs


def _circuit_from_block(net, L1_nH=None):
    kwargs = dict(
        C1_fF=net["C1_fF"],
        C2_fF=net["C2_fF"],
        L1_nH=net["L1_nH"],
        L2_nH=net["L2_nH"],
    )
    if "C_Q_fF" in net:
        kwargs["C_Q_fF"] = net["C_Q_fF"]
    else:
        pads = net["pads"]
        kwargs.update(
            pad_separation_mm=pads["separation_mm"],
            pad_a_fF_mm2=pads["a_fF_mm2"],
            q2_offset_mm=(pads["q2_x_mm"], pads["q2_y_mm"]),
            q1_angle=math.radians(pads["q1_angle_deg"]),
            q2_angle=math.radians(pads["q2_angle_deg"]),
        )
    cav = net["cavity"]
    if cav["enabled"]:
        kwargs.update(
            cavity_enabled=True,
            cavity_C_fF=cav["C_fF"],
            cavity_L_nH=cav["L_nH"],
            cavity_C0_fF=cav["C0_fF"],
        )
    params = TwoQubitCircuit(**kwargs)
    return params.build(L1_nH=L1_nH) if L1_nH is not None else params


def _run_circuit_extract(block, outdir):
    net = block["network"]
    sweep = block["sweep"]
    params = _circuit_from_block(net)
    j, l1_star = extract_coupling(
        lambda l: params.build(L1_nH=l),
        (sweep["L1_min_nH"], sweep["L1_max_nH"]),
        n_scan=sweep["points"],
    )
    q = quantize(params.build(L1_nH=l1_star))
    lam12 = float(q.lam_2piMHz[0, 1])
    result = {
        "J_2piMHz": float(j),
        "crossing_L1_nH": float(l1_star),
        "lambda12_2piMHz": lam12,
        "mode_freqs_2piGHz_at_crossing": [float(v) for v in sorted(q.mode_freqs_2piGHz)],
    }
    if params.cavity_enabled:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            eff = effective_coupling(q)
        result["J_dispersive_formula_2piMHz"] = float(eff.J_2piMHz)
        result["dispersive_epsilon"] = [float(v) for v in eff.epsilon]
    with open(outdir / "result.json", "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
    rows = []
    grid = np.linspace(sweep["L1_min_nH"], sweep["L1_max_nH"], sweep["points"])
    for l1 in grid:
        freqs = normal_modes(params.build(L1_nH=float(l1)))
        rows.append((float(l1),) + tuple(float(f) for f in freqs))
    n_modes = len(rows[0]) - 1
    header = ("L1_nH",) + tuple("mode%d_2piGHz" % (k + 1) for k in range(n_modes))
    write_csv(outdir / "mode_table.csv", header, rows)
    return ["result.json", "mode_table.csv"]


def _run_scan_j2(block, outdir):
    rows = []
    L = block["L"]
    for ratio in block["j2_over_j1"]:
        h = build_ladder_hamiltonian(
            L,
            block["j1_2piMHz"],
            ratio * block["j1_2piMHz"],
            fields=None,
            sector=L // 2,
        )
        gs = ground_state(h).ground_state
        rep = full_bond_report(gs, L, sector=L // 2)
        rows.append(
            (
                float(ratio),
                L,
                rep.normalized,
                rep.per_dimer,
                rep.raw_sum,
                rep.bz,
                rep.bx,
                rep.bzz,
                rep.chosen_bond,
            )
        )
    write_csv(
        outdir / "bond_order.csv",
        (
            "j2_over_j1",
            "L",
            "Dz_per_bond",
            "Dz_per_dimer",
            "Dz_raw",
            "Bz",
            "Bx",
            "Bzz",
            "chosen_bond_index",
        ),
        rows,
    )
    return ["bond_order.csv"]


def _run_disorder_scan(block, outdir):
    spec = DisorderSpec(
        mean=block["mean_over_j1"] * block["j1_2piMHz"],
        spread=block["spread_over_j1"] * block["j1_2piMHz"],
        realizations=block["realizations"],
        master_seed=block["master_seed"],
    )
    result = disorder_scan(
        block["axis"],
        block["values"],
        L=block["L"],
        j1=block["j1_2piMHz"],
        spec=spec,
        j2_over_j1=block["j2_over_j1"],
    )
    write_csv(
        outdir / "disorder_scan.csv",
        ("axis_value", "observable", "mean", "stderr", "n_ok", "n_fail"),
        result.csv_rows(),
    )
    return ["disorder_scan.csv"]


def _run_ramp(block, outdir):
    sysb = block["system"]
    j1 = sysb["j1_2piMHz"]
    j2 = sysb["j2_over_j1"] * j1
    L = sysb["L"]
    sched_b = block["schedule"]
    T = sched_b["T_over_j1"] / (TWO_PI * j1)
    schedule = default_ramp(
        L,
        j1,
        T=T,
        omega_peak=sched_b["omega_peak_over_j1"] * j1,
        delta_init=sched_b["delta_init_over_j1"] * j1,
    )
    noise = NoiseParams(
        kappa_2pikHz=block["noise"]["kappa_2pikHz"],
        gamma_2pikHz=block["noise"]["gamma_2pikHz"],
        decay_direction=block["noise"]["decay_direction"],
    )
    spec = DisorderSpec(
        mean=block["disorder"]["mean_over_j1"] * j1,
        spread=block["disorder"]["spread_over_j1"] * j1,
        realizations=block["disorder"]["realizations"],
        master_seed=block["disorder"]["master_seed"],
    )
    ts = np.linspace(0.0, T, block["samples"])
    outputs = []
    header = ("t_us",) + tuple(ENSEMBLE_COLUMNS)
    if block["include_noiseless_reference"]:
        from .hamiltonian import SpinSystem

        ideal = evolve(
            None, SpinSystem(L=L, coupling=(j1, j2)), schedule, None, ts, backend=block["backend"]
        )
        rows = ideal.rows()  # t, mean_sz, bz, bx, bzz, trace, purity
        write_csv(outdir / "ramp_ideal.csv", header, [tuple(r) for r in rows])
        outputs.append("ramp_ideal.csv")
    ens = ensemble_ramp(
        L,
        (j1, j2),
        schedule,
        noise,
        spec,
        sample_times=ts,
        backend=block["backend"],
    )
    rows = np.column_stack([ens.times] + [ens.mean_columns[k] for k in ENSEMBLE_COLUMNS])
    write_csv(outdir / "ramp_mean.csv", header, [tuple(r) for r in rows])
    outputs.append("ramp_mean.csv")
    finals_header = ("realization",) + tuple(ENSEMBLE_COLUMNS)
    finals = [(k,) + tuple(row) for k, row in enumerate(ens.final_rows)]
    write_csv(outdir / "ramp_finals.csv", finals_header, finals)
    outputs.append("ramp_finals.csv")
    if block["per_realization_files"]:
        # re-run each realization alone (deterministic by counter seeding)
        from .disorder import sample_fields
        from .hamiltonian import SpinSystem

        for idx in range(spec.realizations):
            fields = sample_fields(spec, L, idx)
            traj = evolve(
                None,
                SpinSystem(L=L, coupling=(j1, j2), fields=fields),
                schedule,
                noise,
                ts,
                backend=block["backend"],
            )
            name = "ramp_real_%04d.csv" % idx
            write_csv(outdir / name, header, [tuple(r) for r in traj.rows()])
            outputs.append(name)
    return outputs


_RUNNERS = {
    "coupling-map": _run_coupling_map,
    "fit-dipole": _run_fit_dipole,
    "circuit-extract": _run_circuit_extract,
    "scan-j2": _run_scan_j2,
    "disorder-scan": _run_disorder_scan,
    "ramp": _run_ramp,
}


def run_experiment(config_path):
    """Validate, execute, and write outputs + manifest; returns the manifest."""
    resolved = validate_config(load_config(config_path))
    kind = resolved["experiment"]
    outdir = Path(resolved["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    outputs = _RUNNERS[kind](resolved[kind.replace("-", "_")], outdir)
    wall = time.time() - t0
    manifest = {
        "experiment": kind,
        "resolved_config": resolved,
        "config_sha256": config_hash(resolved),
        "tool_version": __version__,
        "kernel_backend": KERNEL_BACKEND,
        "outputs": outputs,
        "wall_time_s": wall,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dipsim", description="dipolar XY spin-model experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="YAML config path")
    p_val = sub.add_parser("validate", help="schema-check a config")
    p_val.add_argument("config", help="YAML config path")
    sub.add_parser("list-experiments", help="print the known experiment kinds")
    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for kind in EXPERIMENT_KINDS:
            print(kind)
        return 0
    try:
        if args.command == "validate":
            validate_config(load_config(args.config))
            print("config ok")
            return 0
        manifest = run_experiment(args.config)
        print(
            "wrote %s (%s) in %.1fs"
            % (
                ", ".join(manifest["outputs"]),
                manifest["resolved_config"]["output_dir"],
                manifest["wall_time_s"],
            )
        )
        return 0
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print("error: %r" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
