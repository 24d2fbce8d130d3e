"""Command-line driver.

Subcommands:

    phantom       generate a test field and write it to a field file
    simulate      forward-project a field to a measurement dataset
    reconstruct   invert a dataset (three-axis, two-axis potential, or
                  alternative-diagonal mode)
    compare       error report between two tensor fields
    export-slice  dump one plane of one component as PGM or CSV

Runs are reproducible: identical flags and seeds give bit-identical outputs.
The TRT_THREADS environment variable caps the parallelism degree; the
numerical stages are vectorised single-process, so any positive cap is
honoured trivially and results never depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import fileio, metrics, phantoms, reconstruct
from .core import COMPONENT_NAMES, SymTensorField3, VoxelGrid3
from .projector import AcquisitionConfig, simulate_acquisition

_PHANTOM_KINDS = ("smooth", "sharp", "potential", "null1", "null2")


def _threads_cap() -> int:
    raw = os.environ.get("TRT_THREADS", "")
    if not raw:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"TRT_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise ValueError(f"TRT_THREADS must be >= 1, got {cap}")
    return cap


def _parse_axes(text: str) -> tuple:
    names = {"e1": 1, "e2": 2, "e3": 3, "1": 1, "2": 2, "3": 3}
    try:
        return tuple(names[part.strip()] for part in text.split(",") if part.strip())
    except KeyError as exc:
        raise ValueError(f"unknown axis {exc.args[0]!r} (use e1,e2,e3)")


def _parse_component(text: str) -> int:
    name = text.lower().lstrip("f")
    if name in COMPONENT_NAMES:
        return COMPONENT_NAMES.index(name)
    raise ValueError(f"unknown component {text!r} (use f11, f12, f13, f22, f23, f33)")


def _cmd_phantom(args) -> int:
    grid = VoxelGrid3(args.n, args.extent)
    if args.kind == "smooth":
        field = phantoms.smooth_phantom(grid)
    elif args.kind == "sharp":
        field = phantoms.sharp_phantom(grid)
    elif args.kind == "potential":
        field = phantoms.potential_field(grid, phantoms.GaussianDisplacement())
    elif args.kind == "null1":
        field = phantoms.one_axis_null_field(grid)
    else:
        field = phantoms.two_axis_null_field(grid)
    fileio.write_field(args.out, field)
    print(f"wrote {args.kind} phantom ({args.n}^3, extent {args.extent}) to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    field = fileio.read_tensor_field(args.field)
    cfg = AcquisitionConfig.for_grid(
        field.grid, n_angles=args.angles, axes=_parse_axes(args.axes),
        bin_factor=args.bin, noise_pct=args.noise, seed=args.seed)
    data = simulate_acquisition(field, cfg)
    fileio.write_dataset(args.out, data)
    print(f"wrote dataset {data.data.shape} (axes {cfg.axes}, "
          f"{cfg.n_angles} angles, bin {cfg.bin_factor}, noise {cfg.noise_pct}) "
          f"to {args.out}")
    return 0


def _cmd_reconstruct(args) -> int:
    data = fileio.read_dataset(args.data, extent=args.extent)
    if args.mode == "three-axis":
        field = reconstruct.reconstruct_three_axis(data, pad_factor=args.pad)
    elif args.mode == "two-axis-potential":
        result = reconstruct.reconstruct_two_axis_potential(data, pad_factor=args.pad)
        for note in result.warnings:
            print(f"warning: {note}", file=sys.stderr)
        field = result.field
        if args.out_displacement:
            fileio.write_field(args.out_displacement, result.displacement, field.grid)
            print(f"wrote displacement to {args.out_displacement}")
    else:  # diagonals-alt
        lam = reconstruct.assemble_lambda_triple(data, args.pad)
        mu = reconstruct.assemble_mu_triple(data, args.pad)
        diag_specs = reconstruct.recover_diagonals_alternative(lam, mu)
        off_specs = reconstruct.solve_offdiagonals(lam)
        grid = data.recon_grid
        vals = np.empty(grid.shape + (6,))
        order = ((1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3))
        for (i, j), spec in zip(order, (*diag_specs, *off_specs)):
            comp, _ = reconstruct._spectrum_to_component(spec, grid, args.pad)
            vals[..., reconstruct.COMPONENT_INDEX[(i, j)]] = comp
        field = SymTensorField3(grid, vals)
        fbp = reconstruct.recover_diagonals_fbp(data)
        alt = tuple(field.component(i, i) for i in (1, 2, 3))
        res = reconstruct.consistency_residual(fbp, alt)
        print("diagonal consistency residual (FBP vs alternative): "
              + ", ".join(f"{k}={v:.4f}" for k, v in res.items()))
    fileio.write_field(args.out, field)
    print(f"wrote reconstruction ({args.mode}) to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    fa = fileio.read_tensor_field(args.a)
    fb = fileio.read_tensor_field(args.b)
    report = metrics.field_error_report(fa, fb, band_fraction=args.band,
                                        interior_fraction=args.interior)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
        print(f"wrote report to {args.report}")
    for name, entry in report["components"].items():
        print(f"{name}: rel_l2 = {entry['relative_l2']:.6f}, "
              f"banded = {entry['banded_relative_l2']:.6f}")
    print(f"aggregate rel_l2 = {report['aggregate_relative_l2']:.6f}")
    return 0


def _cmd_export_slice(args) -> int:
    values, grid = fileio.read_field(args.field)
    if values.ndim == 4:
        comp = values[..., _parse_component(args.component)]
    else:
        comp = values
    fileio.export_slice(comp, args.axis, args.index, args.out, fmt=args.format,
                        vmin=args.min, vmax=args.max)
    print(f"wrote {args.format} slice to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trtrecon",
        description="Tensor-field tomography from transverse ray integrals")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a test field")
    p.add_argument("--kind", required=True, choices=_PHANTOM_KINDS)
    p.add_argument("--n", type=int, required=True, help="voxels per edge")
    p.add_argument("--extent", type=float, default=1.0, help="domain half-width")
    p.add_argument("--out", required=True, help="output field file")
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("simulate", help="forward-project a field")
    p.add_argument("--field", required=True, help="input tensor field file")
    p.add_argument("--axes", default="e1,e2,e3", help="rotation axes, e.g. e1,e2")
    p.add_argument("--angles", type=int, default=120, help="angles per axis")
    p.add_argument("--noise", type=float, default=0.0,
                   help="gaussian noise sigma as fraction of data max")
    p.add_argument("--bin", type=int, default=1, help="detector binning factor")
    p.add_argument("--seed", type=int, default=0, help="noise RNG seed")
    p.add_argument("--out", required=True, help="output dataset file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct", help="invert a dataset")
    p.add_argument("--data", required=True, help="input dataset file")
    p.add_argument("--mode", required=True,
                   choices=("three-axis", "two-axis-potential", "diagonals-alt"))
    p.add_argument("--out", required=True, help="output field file")
    p.add_argument("--extent", type=float, default=1.0,
                   help="domain half-width (dataset files do not store it)")
    p.add_argument("--pad", type=int, default=2,
                   help="spectral assembly padding factor")
    p.add_argument("--out-displacement", default=None,
                   help="also write the displacement field (two-axis mode)")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("compare", help="error report between two tensor fields")
    p.add_argument("--a", required=True, help="field under test")
    p.add_argument("--b", required=True, help="reference field")
    p.add_argument("--report", default=None, help="write JSON report here")
    p.add_argument("--band", type=float, default=0.8,
                   help="band-limit fraction of Nyquist for banded errors")
    p.add_argument("--interior", type=float, default=0.9,
                   help="interior fraction for banded errors")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("export-slice", help="dump one plane of one component")
    p.add_argument("--field", required=True, help="input field file")
    p.add_argument("--component", default="f11", help="tensor component, e.g. f12")
    p.add_argument("--axis", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--index", type=int, required=True, help="plane index")
    p.add_argument("--format", default="pgm", choices=("pgm", "csv"))
    p.add_argument("--min", type=float, default=None, help="window minimum")
    p.add_argument("--max", type=float, default=None, help="window maximum")
    p.add_argument("--out", required=True, help="output file")
    p.set_defaults(func=_cmd_export_slice)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _threads_cap()
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
