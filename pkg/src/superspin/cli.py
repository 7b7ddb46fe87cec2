"""Command-line front end: JSON in, JSON out, deterministic under --seed.

Exit codes: 0 success, 1 domain violation (membership, singular body,
convergence domain, ...), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import selftest
from .clifford import (
    ExtendedSuperbivector,
    Supervector,
    apply_matrix,
    bivector_to_matrix,
    inner,
    matrix_to_bivector,
    reflect,
    reflection_matrix,
)
from .exceptions import AlgebraError
from .grassmann import DEFAULT_TOL
from .orthosymplectic import check_o0, check_so0, check_so0_algebra, decompose_rotation
from .spin import SpinElement, action_matrix, fractional_fourier, lift_rotation, oscillator_exp
from .supermatrix import Supermatrix, expm, logm


class InputError(Exception):
    """Malformed input: bad JSON, wrong schema, non-finite numbers."""


def _reject_constant(name: str):
    raise InputError(f"non-finite JSON constant {name!r}")


def _load_json(path: str | None):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        return json.loads(text, parse_constant=_reject_constant)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input: {exc}") from exc


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def _parse(kind, data):
    """Decode a payload; any decoding failure is malformed input, not a
    domain violation."""
    try:
        return kind.from_dict(data)
    except (AlgebraError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"cannot decode {kind.__name__}: {exc}") from exc


def _parse_supermatrix(data) -> Supermatrix:
    return _parse(Supermatrix, data)


def _parse_supervector(data) -> Supervector:
    return _parse(Supervector, data)


def _group_payload(report, key: str) -> dict:
    return {
        key: report.ok,
        "defining_residual": report.defining_residual,
        "block_residual": report.block_residual,
        "sdet": report.sdet.to_dict() if report.sdet is not None else None,
        "sdet_deviation": (report.sdet_deviation
                           if math.isfinite(report.sdet_deviation) else None),
    }


def _cmd_check_o0(args):
    report = check_o0(_parse_supermatrix(_load_json(args.input)), args.tol)
    _emit(_group_payload(report, "is_o0"))
    return 0


def _cmd_check_so0(args):
    report = check_so0(_parse_supermatrix(_load_json(args.input)), args.tol)
    _emit(_group_payload(report, "is_so0"))
    return 0


def _cmd_check_so0_algebra(args):
    report = check_so0_algebra(_parse_supermatrix(_load_json(args.input)), args.tol)
    _emit({
        "is_so0_algebra": report.ok,
        "defining_residual": report.defining_residual,
        "block_residual": report.block_residual,
    })
    return 0


def _cmd_sdet(args):
    _emit(_parse_supermatrix(_load_json(args.input)).sdet().to_dict())
    return 0


def _cmd_exp(args):
    _emit(expm(_parse_supermatrix(_load_json(args.input))).to_dict())
    return 0


def _cmd_ln(args):
    _emit(logm(_parse_supermatrix(_load_json(args.input))).to_dict())
    return 0


def _cmd_decompose(args):
    dec = decompose_rotation(_parse_supermatrix(_load_json(args.input)), args.tol)
    _emit({
        "X": dec.compact.to_dict(),
        "Y": dec.symmetric.to_dict(),
        "Z": dec.nilpotent.to_dict(),
        "residual": dec.residual,
    })
    return 0


def _cmd_lift(args):
    mat = _parse_supermatrix(_load_json(args.input))
    element = lift_rotation(mat, args.tol)
    residual = (action_matrix(element) - mat).norm() / max(1.0, mat.norm())
    print(f"covering residual: {residual:.3e}", file=sys.stderr)
    _emit(element.to_dict())
    return 0


def _cmd_act(args):
    data = _load_json(args.input)
    vector = _parse_supervector(data["vector"])
    if "matrix" in data:
        mat = _parse_supermatrix(data["matrix"])
    elif "spin" in data:
        mat = action_matrix(_parse(SpinElement, data["spin"]))
    else:
        raise InputError("act expects a 'matrix' or 'spin' key")
    _emit(apply_matrix(mat, vector).to_dict())
    return 0


def _cmd_reflect(args):
    data = _load_json(args.input)
    axis = _parse_supervector(data["w"])
    mirror = reflection_matrix(axis)
    payload = {"matrix": mirror.to_dict(), "sdet": mirror.sdet().to_dict()}
    if "x" in data:
        payload["reflected"] = reflect(axis, _parse_supervector(data["x"])).to_dict()
    _emit(payload)
    return 0


def _cmd_inner(args):
    data = _load_json(args.input)
    _emit(inner(_parse_supervector(data["x"]), _parse_supervector(data["y"])).to_dict())
    return 0


def _cmd_phi(args):
    biv = _parse(ExtendedSuperbivector, _load_json(args.input))
    _emit(bivector_to_matrix(biv).to_dict())
    return 0


def _cmd_phi_inv(args):
    mat = _parse_supermatrix(_load_json(args.input))
    _emit(matrix_to_bivector(mat, args.tol).to_dict())
    return 0


def _cmd_osc_exp(args):
    expansion = oscillator_exp(args.theta, args.plane, args.m, args.n,
                               args.grassmann_order, cap=args.cap)
    _emit({
        "element": expansion.element.to_dict(),
        "truncation_bound": expansion.truncation_bound,
    })
    return 0


def _cmd_frft(args):
    thetas = [float(t) for t in args.thetas.split(",") if t.strip()]
    if not all(math.isfinite(t) for t in thetas):
        raise InputError("thetas must be finite")
    element = fractional_fourier(thetas, args.m, args.grassmann_order)
    _emit({
        "element": element.to_dict(),
        "matrix": action_matrix(element).to_dict(),
    })
    return 0


def _cmd_selftest(args):
    only = None
    if args.only:
        only = [int(t) for t in args.only.split(",") if t.strip()]
    results = selftest.run_all(seed=args.seed, only=only)
    print(selftest.format_table(results), file=sys.stderr)
    _emit({
        "seed": args.seed,
        "results": [
            {"index": r.index, "name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    })
    return 0 if all(r.passed for r in results) else 1


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("value must be finite")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_finite_float, default=DEFAULT_TOL,
                        help="comparison tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=selftest.DEFAULT_SEED,
                        help="seed for randomized commands")
    common.add_argument("--cap", type=int, default=8,
                        help="fermionic degree cap")
    common.add_argument("--m", type=int, default=3, help="bosonic dimension")
    common.add_argument("--n", type=int, default=1,
                        help="number of fermionic planes (q = 2n)")
    common.add_argument("--N", dest="grassmann_order", type=int, default=4,
                        help="Grassmann algebra order")
    common.add_argument("--strict", action="store_true",
                        help="error out instead of truncating over-cap terms")
    parser = argparse.ArgumentParser(
        prog="superspin",
        description="Superspace rotations, spin lifts and Grassmann-valued "
                    "linear algebra; JSON on stdin/stdout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, needs_input=True, **extra):
        cmd = sub.add_parser(name, parents=[common], **extra)
        if needs_input:
            cmd.add_argument("--input", "-i", default=None,
                             help="input JSON path (default: stdin)")
        cmd.set_defaults(handler=handler)
        return cmd

    add("check-o0", _cmd_check_o0, help="inner-product-preservation test")
    add("check-so0", _cmd_check_so0, help="superrotation membership test")
    add("check-so0-algebra", _cmd_check_so0_algebra,
        help="Lie algebra membership test")
    add("sdet", _cmd_sdet, help="Berezinian of a supermatrix")
    add("exp", _cmd_exp, help="supermatrix exponential")
    add("ln", _cmd_ln, help="supermatrix logarithm near the identity")
    add("decompose", _cmd_decompose,
        help="three-exponential decomposition of a superrotation")
    add("lift", _cmd_lift, help="spin element covering a superrotation")
    add("act", _cmd_act, help="apply a supermatrix or spin element to a vector")
    add("reflect", _cmd_reflect, help="reflection along a supersphere vector")
    add("inner", _cmd_inner, help="generalized inner product of supervectors")
    add("phi", _cmd_phi, help="supermatrix of a superbivector's commutator action")
    add("phi-inv", _cmd_phi_inv, help="superbivector of an algebra supermatrix")
    osc = add("osc-exp", _cmd_osc_exp, needs_input=False,
              help="normal-ordered oscillator exponential")
    osc.add_argument("--theta", type=_finite_float, required=True)
    osc.add_argument("--plane", type=int, default=1)
    frft = add("frft", _cmd_frft, needs_input=False,
               help="fractional Fourier spin element")
    frft.add_argument("--thetas", required=True,
                      help="comma-separated orders, one per plane")
    st = add("selftest", _cmd_selftest, needs_input=False,
             help="run the acceptance suite")
    st.add_argument("--only", default=None,
                    help="comma-separated criterion indices to run")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except AlgebraError as exc:
        print(f"domain violation: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        print(f"malformed input: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
