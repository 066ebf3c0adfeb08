"""Command line interface.

Subcommands cover the one-shot remesh-and-transfer workflow plus the
experiment pipelines; every failure exits nonzero with a single
machine-parsable line on stderr: ``error: <category>: <message>``.
"""

import argparse
import os
import sys

from . import harness
from .errors import (
    ConfigurationError,
    DegenerateElementError,
    FileFormatError,
    GeometryError,
    HistremeshError,
    MeshBuildError,
    SearchError,
    SimulationDivergedError,
    TransferError,
)
from .fileio import load_mesh_pair, save_mesh_pair
from .membrane import SkalakParams
from .mesh import aspect_ratios
from .remesh import remesh_mesh
from .transfer import transfer_initial_configuration

_CATEGORIES = (
    (ConfigurationError, "config", 2),
    (MeshBuildError, "mesh-build", 3),
    (GeometryError, "geometry", 4),
    (DegenerateElementError, "degenerate-element", 5),
    (SearchError, "search", 6),
    (TransferError, "transfer", 7),
    (SimulationDivergedError, "diverged", 8),
    (FileFormatError, "file-format", 9),
)


def _write_aspect_ratio_table(path, meshes):
    lines = ["mesh,element,aspect_ratio"]
    for label, mesh, config in meshes:
        ar = aspect_ratios(mesh, config=config)
        for j in range(ar.shape[0]):
            lines.append(f"{label},{j},{format(ar[j], '.17g')}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_remesh(args):
    old = load_mesh_pair(args.old_initial, args.old_current)
    new = remesh_mesh(old, args.target_edge_length, seed=args.seed)
    transferred, report = transfer_initial_configuration(old, new)
    prefix = args.out_prefix
    out_dir = os.path.dirname(prefix)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    save_mesh_pair(transferred, prefix + "_initial.off",
                   prefix + "_current.off")
    report.to_csv(prefix + "_report.csv")
    _write_aspect_ratio_table(prefix + "_aspect_ratios.csv", [
        ("old_initial", old, "initial"),
        ("old_current", old, "current"),
        ("new_current", transferred, "current"),
        ("new_initial", transferred, "initial"),
    ])
    for suffix in ("_initial.off", "_current.off", "_report.csv",
                   "_aspect_ratios.csv"):
        print(f"wrote {prefix}{suffix}")
    return 0


def _out_dir(args):
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def _emit(rows, out_dir, name):
    path = os.path.join(out_dir, name)
    harness.write_results(rows, path)
    print(f"wrote {path}")


def _cmd_exp_square(args):
    cfg = harness.load_config(args.config, {
        "old_levels": (0.5, 0.25, 0.1),
        "fixed_new": 0.1,
        "new_levels": (0.5, 0.25, 0.1),
        "fixed_old": 0.1,
        "size": 3.0,
    })
    out = harness.run_square_spatial_experiment(
        old_levels=cfg["old_levels"], fixed_new=cfg["fixed_new"],
        new_levels=cfg["new_levels"], fixed_old=cfg["fixed_old"],
        seed=args.seed, size=cfg["size"])
    d = _out_dir(args)
    _emit(out["old_sweep"], d, "square_old_sweep.csv")
    _emit(out["new_sweep"], d, "square_new_sweep.csv")
    return 0


def _cmd_exp_cylinder(args):
    cfg = harness.load_config(args.config, {
        "old_levels": (0.4, 0.2, 0.1, 0.05),
        "fixed_new": 0.2,
        "new_levels": (0.4, 0.2, 0.1),
        "fixed_old": 0.1,
    })
    out = harness.run_cylinder_spatial_experiment(
        old_levels=cfg["old_levels"], fixed_new=cfg["fixed_new"],
        new_levels=cfg["new_levels"], fixed_old=cfg["fixed_old"],
        seed=args.seed)
    d = _out_dir(args)
    _emit(out["old_sweep"], d, "cylinder_old_sweep.csv")
    _emit(out["new_sweep"], d, "cylinder_new_sweep.csv")
    return 0


def _cmd_exp_strain(args):
    cfg = harness.load_config(args.config, {
        "levels": (0.5, 0.25, 0.1, 0.05),
        "size": 3.0,
        "kappa_shear": 0.01,
        "kappa_area": 1.0e-6,
    })
    params = SkalakParams(cfg["kappa_shear"], cfg["kappa_area"])
    out = harness.run_strain_experiment(
        levels=cfg["levels"], seed=args.seed, size=cfg["size"],
        params=params)
    d = _out_dir(args)
    _emit(out["fixed"], d, "strain_fixed.csv")
    _emit(out["remeshed"], d, "strain_remeshed.csv")
    return 0


def _cmd_exp_frequency(args):
    cfg = harness.load_config(args.config, {
        "counts": (0, 1, 2, 3, 5, 10, 20),
        "edge_length": 0.1,
        "t_end": 60.0,
        "size": 3.0,
        "kappa_shear": 0.01,
        "kappa_area": 1.0e-6,
    })
    params = SkalakParams(cfg["kappa_shear"], cfg["kappa_area"])
    out = harness.run_frequency_experiment(
        counts=cfg["counts"], edge_length=cfg["edge_length"],
        t_end=cfg["t_end"], seed=args.seed, size=cfg["size"], params=params)
    d = _out_dir(args)
    _emit(out["spatial"], d, "frequency_spatial.csv")
    _emit(out["strain"], d, "frequency_strain.csv")
    return 0


def _cmd_simulate(args):
    cfg = harness.load_config(args.config, {
        "pressure": 1.5e-2,
        "dt": 0.005,
        "t_end": 60.0,
        "remesh_interval": 0.6,
        "target_edge_length": 0.1,
        "major_radius": 1.0,
        "minor_radius": 0.4,
        "reference_minor_radius": 0.25,
        "mobility": 1000.0,
        "log_interval": 0.6,
        "kappa_shear": 0.01,
        "kappa_area": 1.0e-6,
    })
    params = SkalakParams(cfg["kappa_shear"], cfg["kappa_area"])
    out = harness.run_pressure_simulation(
        pressure=cfg["pressure"], dt=cfg["dt"], t_end=cfg["t_end"],
        remesh_interval=cfg["remesh_interval"],
        target_edge_length=cfg["target_edge_length"],
        major_radius=cfg["major_radius"], minor_radius=cfg["minor_radius"],
        reference_minor_radius=cfg["reference_minor_radius"],
        mobility=cfg["mobility"], log_interval=cfg["log_interval"],
        seed=args.seed, params=params)
    d = _out_dir(args)
    for label, name in (("fixed", "sim_fixed.csv"),
                        ("remeshed", "sim_remeshed.csv")):
        samples, status = out[label]
        path = os.path.join(d, name)
        harness.write_series(samples, path, status=status)
        print(f"wrote {path}" + (f" ({status})" if status else ""))
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="histremesh",
        description="History-preserving surface remeshing and experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("remesh",
                       help="remesh a mesh pair and transfer its history")
    p.add_argument("--old-initial", required=True,
                   help="mesh file with the initial (reference) positions")
    p.add_argument("--old-current", required=True,
                   help="mesh file with the current (deformed) positions")
    p.add_argument("--target-edge-length", type=float, required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_remesh)

    for name, func, blurb in (
        ("exp-square", _cmd_exp_square,
         "planar spatial-error sweeps on the deformed square"),
        ("exp-cylinder", _cmd_exp_cylinder,
         "surface spatial-error sweeps on the bent cylinder"),
        ("exp-strain", _cmd_exp_strain,
         "strain-energy error sweep, fixed vs remeshed"),
        ("exp-frequency", _cmd_exp_frequency,
         "error vs number of remeshing events"),
        ("simulate", _cmd_simulate,
         "pressurized-membrane relaxation, fixed vs remeshed"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", default=None,
                       help="key = value file overriding the defaults")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default=".")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HistremeshError as exc:
        for klass, category, code in _CATEGORIES:
            if isinstance(exc, klass):
                print(f"error: {category}: {exc}", file=sys.stderr)
                return code
        print(f"error: internal: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 10


if __name__ == "__main__":
    sys.exit(main())
