"""Command line interface: list catalog entries, evaluate tensors at a
point, run the verification suite.

Exit codes: 0 all non-skipped checks pass (or informational command), 1 a
check failed, 2 usage error, 3 input/load error.  Human output prints
residuals with three significant digits; JSON output carries full doubles
and is byte-identical for identical configurations.  Index labels in human
output are 1-based (mathematical style); file formats are 0-based.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import catalog, geometry, theorems
from .connections import (
    LEVI_CIVITA,
    PROJECTIVE,
    connection_at,
    nonmetricity_components,
    torsion_components,
)
from .curvature import projective_at, ricci_at, riemann_at, theta_beta_at
from .geometry import GateError, NotSPDError, SpecError

__all__ = ["main", "run"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

TENSOR_IDS = (
    "gamma",
    "gamma_tilde",
    "torsion",
    "nonmetricity",
    "riemann",
    "riemann_tilde",
    "ricci",
    "ricci_tilde",
    "theta",
    "beta",
    "projective",
    "projective_tilde",
)


class _UsageError(Exception):
    pass


class _InputError(Exception):
    pass


def _load_manifold(args) -> geometry.ManifoldSpec:
    if getattr(args, "file", None):
        try:
            return geometry.load_spec(Path(args.file))
        except (SpecError, OSError) as err:
            raise _InputError(f"cannot load manifold file: {err}") from err
    name = getattr(args, "manifold", None)
    if not name:
        raise _UsageError("one of --manifold or --file is required")
    try:
        return catalog.builtin(name).spec
    except KeyError as err:
        raise _InputError(str(err)) from err


def _parse_point(text: str, spec) -> tuple[float, ...]:
    try:
        point = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise _UsageError(f"--point must be comma separated reals, got {text!r}") from None
    if len(point) != spec.n:
        raise _UsageError(
            f"--point has {len(point)} coordinates, chart {spec.name!r} has {spec.n}"
        )
    if not geometry.in_box(spec, point):
        raise _UsageError(f"point {text} is outside the sampling box of {spec.name!r}")
    return point


def _parse_tolerances(pairs) -> dict:
    overrides = {}
    for pair in pairs or ():
        key, _, value = pair.partition("=")
        if not value:
            raise _UsageError(f"--tol expects <check>=<value>, got {pair!r}")
        if key not in theorems.REGISTRY:
            raise _UsageError(f"unknown check id in --tol: {key!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise _UsageError(f"--tol value for {key!r} is not a number") from None
    return overrides


def _emit(text: str, out_path: str | None):
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")
    if out_path:
        Path(out_path).write_text(
            text if text.endswith("\n") else text + "\n", encoding="utf-8"
        )


# ---------------------------------------------------------------------------
# list


def _cmd_list(args) -> int:
    entries = []
    for name in catalog.catalog_names():
        entry = catalog.builtin(name)
        spec = entry.spec
        entries.append(
            {
                "name": name,
                "dim": spec.n,
                "parallel_xi": spec.parallel_xi_expected,
                "structure": spec.phi is not None,
                "provenance": entry.provenance,
            }
        )
    if args.json or args.format == "json":
        _emit(json.dumps(entries, indent=2), args.out)
        return EXIT_OK
    lines = []
    for e in entries:
        flags = "parallel xi" if e["parallel_xi"] else "non-parallel xi"
        if e["structure"]:
            flags += ", almost-contact structure"
        lines.append(f"{e['name']} (n={e['dim']}, {flags})")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval


def _component_lines(label: str, array: np.ndarray, index_names: str) -> list[str]:
    """Nonzero components with 1-based index labels."""
    lines = []
    for idx in np.ndindex(array.shape):
        value = array[idx]
        if abs(value) > 1e-14:
            tags = ",".join(
                f"{name}={pos + 1}" for name, pos in zip(index_names, idx)
            )
            lines.append(f"{label}[{tags}] = {value:.10g}")
    if not lines:
        lines.append(f"{label}: all components zero")
    return lines


def _eval_tensor(spec, tensor: str, point):
    if tensor == "gamma":
        arr = connection_at(spec, LEVI_CIVITA, point, order=0).Gamma
        return arr, "kij", {}
    if tensor == "gamma_tilde":
        arr = connection_at(spec, PROJECTIVE, point, order=0).Gamma
        return arr, "kij", {}
    if tensor == "torsion":
        return torsion_components(spec, point), "kij", {}
    if tensor == "nonmetricity":
        closed, direct = nonmetricity_components(spec, point)
        return direct, "ijk", {
            "two_path_discrepancy": float(np.max(np.abs(closed - direct)))
        }
    if tensor == "riemann":
        return riemann_at(spec, LEVI_CIVITA, point).R, "lijk", {}
    if tensor == "riemann_tilde":
        return riemann_at(spec, PROJECTIVE, point).R, "lijk", {}
    if tensor == "ricci":
        rv = ricci_at(spec, point)
        return rv.S, "jk", {"scalar_curvature": rv.r}
    if tensor == "ricci_tilde":
        rv = ricci_at(spec, point)
        return rv.S_tilde, "jk", {
            "scalar_curvature": rv.r_tilde,
            "lambda": rv.lam,
        }
    if tensor == "theta":
        return theta_beta_at(spec, point).theta, "ij", {}
    if tensor == "beta":
        return theta_beta_at(spec, point).beta, "ij", {}
    if tensor == "projective":
        return projective_at(spec, LEVI_CIVITA, point), "lijk", {}
    if tensor == "projective_tilde":
        return projective_at(spec, PROJECTIVE, point), "lijk", {}
    raise _UsageError(f"unknown tensor id {tensor!r}; known: {', '.join(TENSOR_IDS)}")


def _cmd_eval(args) -> int:
    spec = _load_manifold(args)
    if not args.tensor:
        raise _UsageError("--tensor is required")
    if not args.point:
        raise _UsageError("--point is required")
    point = _parse_point(args.point, spec)
    try:
        array, index_names, extras = _eval_tensor(spec, args.tensor, point)
    except (NotSPDError, GateError, SpecError) as err:
        raise _InputError(str(err)) from err
    if args.json:
        payload = {
            "manifold": spec.name,
            "tensor": args.tensor,
            "point": list(point),
            "indices": list(index_names),
            "components": array.tolist(),
        }
        payload.update(extras)
        _emit(json.dumps(payload, indent=2), args.out)
        return EXIT_OK
    lines = [f"{args.tensor} on {spec.name} at ({args.point})"]
    lines += _component_lines(args.tensor, array, index_names)
    for key, value in extras.items():
        lines.append(f"{key} = {value:.10g}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> int:
    spec = _load_manifold(args)
    tolerances = _parse_tolerances(args.tol)
    selected = None
    if args.check:
        selected = [c.strip() for c in args.check.split(",") if c.strip()]
    try:
        reports = theorems.run_checks(
            spec,
            count=args.samples,
            seed=args.seed,
            tolerances=tolerances,
            selected=selected,
        )
    except KeyError as err:
        raise _UsageError(str(err)) from None
    except (NotSPDError, SpecError) as err:
        raise _InputError(str(err)) from err
    if args.json:
        text = json.dumps([r.to_dict() for r in reports], indent=2)
    else:
        header = (
            f"verification of {spec.name}: samples={args.samples} seed={args.seed}"
        )
        text = "\n".join([header] + [r.human_line() for r in reports])
    _emit(text, args.out)
    failures = [r for r in reports if not r.skipped and not r.passed]
    return EXIT_CHECK_FAILED if failures else EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _add_manifold_options(parser):
    parser.add_argument("--manifold", help="builtin catalog entry name")
    parser.add_argument("--file", help="path to a manifold file")
    parser.add_argument("--out", help="also write the output to this path")
    parser.add_argument("--json", action="store_true", help="JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projconn",
        description=(
            "Evaluate tensors of the projective semi-symmetric connection on "
            "built-in or user manifolds and verify its curvature identities."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list catalog entries")
    p_list.add_argument("--format", choices=("human", "json"), default="human")
    p_list.add_argument("--json", action="store_true")
    p_list.add_argument("--out")

    p_eval = sub.add_parser("eval", help="evaluate a tensor at a point")
    _add_manifold_options(p_eval)
    p_eval.add_argument("--tensor", help=f"one of: {', '.join(TENSOR_IDS)}")
    p_eval.add_argument("--point", help="comma separated coordinates")

    p_verify = sub.add_parser("verify", help="run verification checks")
    _add_manifold_options(p_verify)
    p_verify.add_argument("--samples", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument(
        "--check", help="comma separated check ids (default: all applicable)"
    )
    p_verify.add_argument(
        "--tol", action="append", metavar="CHECK=VALUE",
        help="tolerance override, repeatable",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    handlers = {"list": _cmd_list, "eval": _cmd_eval, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except _InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


def run():
    sys.exit(main())
