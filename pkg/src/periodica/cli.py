"""Command-line interface.

Commands read a document from a file argument (or stdin when the argument is
omitted or ``-``) and write data to stdout or the ``-o`` target; diagnostics
go to stderr.  Exit codes: 0 on success, 1 for input and schema problems,
2 for numerical failures (rank ambiguity, search budget, corrector
divergence).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import errors
from .auxetics import (
    affine_invariance_check,
    apply_affine,
    basis_gram_velocities,
    strict_direction,
)
from .builders import build_gallery
from .documents import export_obj, parse_document, serialize
from .geometry import FiniteLinkage, PeriodicFramework
from .quotient import to_periodic
from .rigidity import deformation_basis
from .trace import TraceConfig, TraceTermination, auxetic_interval, trace

_INPUT_ERRORS = (
    errors.SchemaError,
    errors.VersionUnsupported,
    errors.ZeroLengthEdge,
    errors.DuplicateEdge,
    errors.Disconnected,
    errors.MarkedPairsNotBasis,
    errors.WrongPairCount,
    errors.DuplicateOrbit,
    errors.SingularMatrix,
    errors.UnsupportedDimension,
    errors.DimensionMismatch,
    errors.NotOneDof,
    errors.NotAuxeticAtStart,
    errors.DegeneratePlacement,
    ValueError,
    OSError,
)

_NUMERIC_ERRORS = (errors.RankToleranceAmbiguous, errors.BudgetExhausted)


def _read_structure(path: str):
    if path == "-":
        return parse_document(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as handle:
        return parse_document(handle.read())


def _write(text: str, target):
    if target in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8") as handle:
            handle.write(text)


def _default_seed() -> int:
    return int(os.environ.get("PERIODICA_SEED", "42"))


# ---------------------------------------------------------------------------
# commands


def _cmd_convert(args) -> int:
    structure = _read_structure(args.input)
    if not isinstance(structure, FiniteLinkage):
        raise ValueError("convert expects a linkage document")
    _write(serialize(to_periodic(structure)), args.output)
    return 0


def _analysis_report(structure) -> dict:
    space = deformation_basis(structure)
    report = {
        "dof": space.dof,
        "rank": space.constraint_rank,
        "independent": space.independent,
        "strict_direction": {
            "found": False,
            "lambda_min": None,
            "coefficients": None,
            "seed": _default_seed(),
        },
        "eigenvalues": None,
    }
    if space.dof >= 1:
        result = strict_direction(space, seed=_default_seed())
        tangents = basis_gram_velocities(space)
        combined = sum(c * t.matrix for c, t in zip(result.coefficients, tangents))
        report["strict_direction"].update(
            found=result.found,
            lambda_min=result.lambda_min,
            coefficients=[float(c) for c in result.coefficients],
        )
        report["eigenvalues"] = [float(x) for x in np.linalg.eigvalsh(combined)]
    return report


def _cmd_analyze(args) -> int:
    structure = _read_structure(args.input)
    report = _analysis_report(structure)
    if args.json:
        _write(json.dumps(report) + "\n", args.output)
        return 0
    if isinstance(structure, PeriodicFramework):
        shape = (f"framework: {structure.orbit_count} vertex orbits, "
                 f"{structure.edge_orbit_count} edge orbits, dimension {structure.dimension}")
    else:
        shape = (f"linkage: {structure.vertex_count} vertices, "
                 f"{structure.edge_count} edges, dimension {structure.dimension}")
    lines = [
        shape,
        f"dof: {report['dof']} (constraint rank {report['rank']}, "
        f"independent: {report['independent']})",
    ]
    sd = report["strict_direction"]
    if sd["coefficients"] is None:
        lines.append("strict direction: not applicable (rigid)")
    elif sd["found"]:
        lines.append(f"strict direction: found, lambda_min = {sd['lambda_min']:.6g} "
                     f"(seed {sd['seed']})")
    else:
        lines.append(f"strict direction: none found, best lambda_min = "
                     f"{sd['lambda_min']:.6g} (seed {sd['seed']})")
    if report["eigenvalues"] is not None:
        eigs = ", ".join(f"{x:.6g}" for x in report["eigenvalues"])
        lines.append(f"gram tangent eigenvalues: [{eigs}]")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_trace(args) -> int:
    structure = _read_structure(args.input)
    if not isinstance(structure, PeriodicFramework):
        raise ValueError("trace expects a framework document")
    config = TraceConfig(step=args.step, steps=args.steps, seed=args.seed)
    path = trace(structure, config)
    rows = []
    for s in path.samples:
        rows.append(json.dumps({
            "tau": s.tau,
            "omega": [list(map(float, row)) for row in s.gram.matrix],
            "omega_dot_eigenvalues": [float(x) for x in s.verdict.eigenvalues],
            "verdict": s.verdict.kind.value,
        }))
    if args.interval:
        interval = auxetic_interval(path)
        rows.append(json.dumps({"interval": {
            "tau_lo": interval.tau_lo,
            "tau_hi": interval.tau_hi,
            "lo_kind": interval.lo_kind.value,
            "hi_kind": interval.hi_kind.value,
        }}))
    _write("\n".join(rows) + "\n", args.output)
    diverged = TraceTermination.CORRECTOR_DIVERGENCE in (
        path.termination_backward, path.termination_forward)
    if diverged:
        print("trace: corrector divergence", file=sys.stderr)
        return 2
    return 0


def _cmd_gallery(args) -> int:
    params = {}
    for key in ("k", "d", "height", "notch", "floor_edge", "h1", "h2",
                "radius", "perturbation", "variant"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    structure = build_gallery(args.selector, **params)
    _write(serialize(structure), args.output)
    return 0


def _cmd_affine(args) -> int:
    structure = _read_structure(args.input)
    if not isinstance(structure, PeriodicFramework):
        raise ValueError("affine expects a framework document")
    d = structure.dimension
    entries = [float(x) for x in args.matrix.split(",")]
    if len(entries) != d * d:
        raise ValueError(f"--matrix needs {d * d} comma-separated numbers (row-major)")
    matrix = np.array(entries).reshape(d, d)
    transformed, _ = apply_affine(structure, matrix)
    _write(serialize(transformed), args.output)
    if args.check_invariance:
        space = deformation_basis(structure)
        worst = 0.0
        for flex in space.basis:
            ok, deviation = affine_invariance_check(structure, matrix, flex)
            worst = max(worst, deviation)
            if not ok:
                print(f"affine: invariance check failed, deviation {deviation:.3e}",
                      file=sys.stderr)
                return 2
        print(f"affine: invariance holds over {len(space.basis)} basis flexes, "
              f"max deviation {worst:.3e}", file=sys.stderr)
    return 0


def _cmd_export(args) -> int:
    structure = _read_structure(args.input)
    if not isinstance(structure, PeriodicFramework):
        raise ValueError("export expects a framework document")
    _write(export_obj(structure, args.cells), args.output)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_io(parser, output=True):
    parser.add_argument("input", nargs="?", default="-",
                        help="input document ('-' or omitted for stdin)")
    if output:
        parser.add_argument("-o", "--output", default=None,
                            help="output target (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periodica",
        description="Periodic frameworks from finite linkages: conversion, "
                    "freedom analysis, auxetic certification, path tracing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="linkage document -> framework document")
    _add_io(p)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("analyze", help="degrees of freedom and strict-direction search")
    _add_io(p)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("trace", help="follow a one-dof motion and sample its Gram curve")
    _add_io(p)
    p.add_argument("--steps", type=int, default=200, help="steps per direction")
    p.add_argument("--step", type=float, default=1e-2, help="arclength step size")
    p.add_argument("--seed", type=int, default=1, choices=(-1, 1),
                   help="initial direction: +1 opening, -1 closing")
    p.add_argument("--interval", action="store_true",
                   help="append the auxetic interval around tau = 0")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("gallery", help="emit a built-in example document")
    p.add_argument("selector", choices=("double-arrowhead", "paneled-simplex",
                                        "cadelniza", "roofed-cadelniza", "lk"))
    p.add_argument("--k", type=int, default=None, help="lk: ring parameter (>= 3)")
    p.add_argument("--d", type=int, default=None, help="dimension where applicable")
    p.add_argument("--height", type=float, default=None, help="double-arrowhead apex height")
    p.add_argument("--notch", type=float, default=None, help="double-arrowhead reflex height")
    p.add_argument("--floor-edge", dest="floor_edge", type=float, default=None,
                   help="cadelniza floor edge length")
    p.add_argument("--h1", type=float, default=None, help="cadelniza lower apex height")
    p.add_argument("--h2", type=float, default=None, help="cadelniza upper apex height")
    p.add_argument("--variant", choices=("default", "alternate"), default=None,
                   help="roofed-cadelniza edge-orbit preset")
    p.add_argument("--radius", type=float, default=None, help="lk ring radius (>= 1)")
    p.add_argument("--perturbation", type=float, default=None,
                   help="lk ring-joint perturbation magnitude")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_gallery)

    p = sub.add_parser("affine", help="apply an invertible linear map to a framework")
    _add_io(p)
    p.add_argument("--matrix", required=True,
                   help="d*d comma-separated entries, row-major")
    p.add_argument("--check-invariance", action="store_true",
                   help="verify the Gram tangents of all basis flexes are preserved")
    p.set_defaults(func=_cmd_affine)

    p = sub.add_parser("export", help="write an OBJ wireframe fragment")
    _add_io(p)
    p.add_argument("--cells", type=int, required=True, help="cells per lattice direction")
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"periodica {args.command}: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"periodica {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
