"""Command line front end.

Problem files are JSON objects with four keys::

    {"version": 1, "command": "<name>", "cone": {...}, "payload": {...}}

where ``command`` names the subcommand the file is meant for ("contains",
"solve", "lyap-rank", "check.project", ...).  Reports go to stdout either as
canonical JSON (sorted keys, two-space indent, trailing newline) or as flat
``key: value`` text; given the same file and flags the bytes are identical
run to run.

Exit codes: 0 success, 2 malformed problem file, 3 dimension mismatch or
unsupported cone, 4 iteration did not converge, 5 a checked property failed
to hold.  Reports echo the command, the settings that influenced the run,
and the exit status.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__, lyapunov, micp_solver, order, projections
from .cones import (
    CYLINDER,
    CYLINDER_DUAL,
    KINDS,
    MESOC,
    CompPair,
    ConeSpec,
    Tolerances,
    contains,
    decompose_mesoc,
    in_complementarity_set,
    membership_slacks,
)
from .errors import (
    DimensionError,
    MembershipError,
    MesocKitError,
    OracleError,
    SchemaError,
    UnsupportedConeError,
)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_DIMENSION = 3
EXIT_NO_CONVERGENCE = 4
EXIT_CHECK_FAILED = 5


# --------------------------------------------------------------------------
# problem file handling


def cone_from_json(obj) -> ConeSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("cone must be an object with a 'kind' key")
    kind = obj["kind"]
    if kind not in KINDS:
        raise SchemaError(f"unknown cone kind {kind!r}")
    inner = None
    if kind in (CYLINDER, CYLINDER_DUAL):
        if "inner" not in obj:
            raise SchemaError("cylinder cones need an 'inner' cone")
        inner = cone_from_json(obj["inner"])
    try:
        return ConeSpec(
            kind,
            int(obj.get("p", 1)),
            int(obj.get("q", inner.dim if inner is not None else 0)),
            inner=inner,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad cone description: {exc}") from exc


def cone_to_json(cone: ConeSpec) -> dict:
    out = {"kind": cone.kind, "p": cone.p}
    if cone.inner is not None:
        out["inner"] = cone_to_json(cone.inner)
    elif cone.q:
        out["q"] = cone.q
    return out


def map_from_json(obj) -> micp_solver.StructuredMap:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("map must be an object with a 'kind' key")
    try:
        if obj["kind"] == "scalar_combo":
            fields = tuple(
                micp_solver.ScalarField(
                    linear=f["linear"],
                    norm_coeff=float(f["norm_coeff"]),
                    offset=float(f["offset"]),
                )
                for f in obj["fields"]
            )
            return micp_solver.ScalarComboMap(
                p=int(obj["p"]),
                q=int(obj["q"]),
                fields=fields,
                directions=np.asarray(obj["directions"], dtype=float),
            )
        if obj["kind"] == "affine":
            return micp_solver.AffineMap(
                p=int(obj["p"]),
                q=int(obj["q"]),
                matrix=np.asarray(obj["matrix"], dtype=float),
                offset=np.asarray(obj["offset"], dtype=float),
            )
    except DimensionError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad map description: {exc}") from exc
    raise SchemaError(f"unknown map kind {obj['kind']!r}")


def map_to_json(m: micp_solver.StructuredMap) -> dict:
    if isinstance(m, micp_solver.ScalarComboMap):
        return {
            "kind": "scalar_combo",
            "p": m.p,
            "q": m.q,
            "fields": [
                {
                    "linear": f.linear.tolist(),
                    "norm_coeff": f.norm_coeff,
                    "offset": f.offset,
                }
                for f in m.fields
            ],
            "directions": m.directions.tolist(),
        }
    return {
        "kind": "affine",
        "p": m.p,
        "q": m.q,
        "matrix": m.matrix.tolist(),
        "offset": m.offset.tolist(),
    }


def load_problem(path: str, command: str) -> tuple[ConeSpec, dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"problem file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("problem file must hold a JSON object")
    for key in ("version", "command", "cone", "payload"):
        if key not in doc:
            raise SchemaError(f"problem file is missing the {key!r} key")
    if doc["version"] != 1:
        raise SchemaError(f"unsupported problem version {doc['version']!r}")
    if doc["command"] != command:
        raise SchemaError(
            f"problem file is for {doc['command']!r}, invoked as {command!r}"
        )
    if not isinstance(doc["payload"], dict):
        raise SchemaError("payload must be a JSON object")
    return cone_from_json(doc["cone"]), doc["payload"]


def _payload_vector(payload: dict, key: str):
    if key not in payload:
        raise SchemaError(f"payload is missing the {key!r} key")
    value = payload[key]
    if not isinstance(value, list):
        raise SchemaError(f"payload key {key!r} must be a list of numbers")
    return value


# --------------------------------------------------------------------------
# output


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def _flatten(prefix: str, value, lines: list[str]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], lines)
    elif isinstance(value, list):
        lines.append(f"{prefix}: [{', '.join(json.dumps(v) for v in value)}]")
    else:
        lines.append(f"{prefix}: {json.dumps(value)}")


def emit(report: dict, output: str, command: str, code: int, settings: dict) -> int:
    """Write the report (with command echo, settings, exit status) and pass
    the exit code through."""
    report = dict(report, command=command, exit_status=code, settings=settings)
    report = _jsonable(report)
    if output == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        lines: list[str] = []
        _flatten("", report, lines)
        sys.stdout.write("\n".join(lines) + "\n")
    return code


def write_trace(path: str, p: int, q: int, trace: micp_solver.IterationTrace) -> None:
    header = (
        ["iter"]
        + [f"x_{i + 1}" for i in range(p)]
        + [f"u_{j + 1}" for j in range(q)]
        + ["step_norm", "order_ok"]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, z in enumerate(trace.iterates):
            step = 0.0 if i == 0 else float(trace.step_norms[i - 1])
            ok = 1 if i == 0 else int(trace.order_certificates[i - 1])
            writer.writerow([i] + [repr(float(v)) for v in z] + [repr(step), ok])


# --------------------------------------------------------------------------
# subcommands


def _tolerances(args) -> Tolerances:
    if args.tol is None:
        return Tolerances()
    return Tolerances(membership=args.tol, orthogonality=args.tol)


def cmd_contains(args) -> int:
    cone, payload = load_problem(args.problem, "contains")
    point = _payload_vector(payload, "point")
    slacks = membership_slacks(cone, point)
    tol = _tolerances(args)
    return emit(
        {
            "cone": cone_to_json(cone),
            "contains": contains(cone, point, tol),
            "min_slack": float(slacks.min()) if slacks.size else None,
            "slacks": slacks,
        },
        args.output,
        "contains",
        EXIT_OK,
        {"tol": tol.membership},
    )


def cmd_solve(args) -> int:
    cone, payload = load_problem(args.problem, "solve")
    if cone.kind != CYLINDER:
        raise SchemaError("solve expects a cylinder cone")
    map_ = map_from_json(payload.get("map"))
    start = payload.get("start")
    instance = micp_solver.MicpInstance(
        map=map_,
        inner=cone.inner,
        start=start,
        max_iter=args.max_iter,
        conv_tol=args.tol if args.tol is not None else 1e-12,
    )
    solution, trace = micp_solver.picard_solve(instance)
    if args.trace:
        write_trace(args.trace, map_.p, map_.q, trace)
    verify = micp_solver.verify_solution(instance, trace.final)
    code = EXIT_OK if trace.status == "converged" else EXIT_NO_CONVERGENCE
    return emit(
        {
            "status": trace.status,
            "iterations": trace.n_steps,
            "solution": {"x": solution.x, "u": solution.u},
            "final_step_norm": float(trace.step_norms[-1]) if trace.n_steps else 0.0,
            "order_certificates_all_ok": bool(trace.order_certificates.all())
            if trace.n_steps
            else True,
            "verify": {
                "ok": verify.ok,
                "g_norm": verify.g_norm,
                "inner_slack": verify.inner_slack,
                "dual_slack": verify.dual_slack,
                "orthogonality": verify.orthogonality,
                "failed": list(verify.failed),
            },
        },
        args.output,
        "solve",
        code,
        {"conv_tol": instance.conv_tol, "max_iter": instance.max_iter},
    )


def cmd_lyap_rank(args) -> int:
    cone, payload = load_problem(args.problem, "lyap-rank")
    if cone.dim > 10:
        raise UnsupportedConeError(
            "lyap-rank enumerates dim^2 x dim^2 constraints; dimension must be <= 10"
        )
    n_pairs = int(payload.get("n_pairs", args.samples))
    result = lyapunov.lyapunov_rank_numeric(cone, n_pairs=n_pairs, seed=args.seed)
    try:
        predicted = lyapunov.predicted_rank(cone)
    except UnsupportedConeError:
        predicted = None
    return emit(
        {
            "cone": cone_to_json(cone),
            "rank": result.rank,
            "predicted": predicted,
            "agree": None if predicted is None else result.rank == predicted,
            "matrix_dim": result.matrix_dim,
            "n_pairs": result.n_pairs,
            "singular_gap": result.singular_gap,
        },
        args.output,
        "lyap-rank",
        EXIT_OK,
        {"n_pairs": n_pairs, "seed": args.seed},
    )


def cmd_check_project(args) -> int:
    cone, payload = load_problem(args.problem, "check.project")
    point = _payload_vector(payload, "point")
    fast = projections.project(cone, point)
    oracle = projections.project_oracle(cone, point)
    gap = float(np.abs(fast.point - oracle.point).max())
    tol = args.tol if args.tol is not None else 1e-8
    ok = gap <= tol
    return emit(
        {
            "point": fast.point,
            "distance": fast.distance,
            "oracle_distance": oracle.distance,
            "oracle_gap": gap,
            "ok": ok,
        },
        args.output,
        "check.project",
        EXIT_OK if ok else EXIT_CHECK_FAILED,
        {"tol": tol},
    )


def cmd_check_isotone(args) -> int:
    cone, payload = load_problem(args.problem, "check.isotone")
    tol = _tolerances(args)
    settings = {"samples": args.samples, "seed": args.seed, "tol": tol.membership}
    if "normal" in payload:
        report = order.hyperplane_isotone_test(
            cone, _payload_vector(payload, "normal"), args.samples, args.seed, tol
        )
        out = {
            "mode": "hyperplane",
            "held": report.held,
            "checked": report.checked,
            "min_margin": report.min_margin,
        }
        if report.witness is not None:
            out["witness"] = {"x": report.witness.lo, "y": report.witness.hi}
        return emit(
            out,
            args.output,
            "check.isotone",
            EXIT_OK if report.held else EXIT_CHECK_FAILED,
            settings,
        )
    map_ = map_from_json(payload.get("map"))
    extra = []
    for entry in payload.get("pairs", []):
        if not isinstance(entry, dict) or "lo" not in entry or "hi" not in entry:
            raise SchemaError("each extra pair needs 'lo' and 'hi' lists")
        extra.append(order.OrderedPairSample(np.asarray(entry["lo"], dtype=float),
                                             np.asarray(entry["hi"], dtype=float)))
    report = order.check_isotone(
        map_, cone, args.samples, args.seed, tol, extra_pairs=tuple(extra)
    )
    out = {
        "mode": "map",
        "held": report.ok,
        "checked": report.checked,
        "violations": len(report.violations),
    }
    if report.violations:
        worst = min(report.violations, key=lambda v: v.margin)
        out["witness"] = {
            "lo": worst.pair.lo,
            "hi": worst.pair.hi,
            "image_diff": worst.image_diff,
            "failed_inequality": worst.failed_inequality,
            "margin": worst.margin,
        }
    return emit(
        out,
        args.output,
        "check.isotone",
        EXIT_OK if report.ok else EXIT_CHECK_FAILED,
        settings,
    )


def cmd_check_complementarity(args) -> int:
    cone, payload = load_problem(args.problem, "check.complementarity")
    pair = CompPair(
        primal=_payload_vector(payload, "primal"),
        dual=_payload_vector(payload, "dual"),
    )
    tol = _tolerances(args)
    report = in_complementarity_set(cone, pair, tol)
    return emit(
        {
            "member": report.member,
            "mode": report.mode,
            "residuals": report.residuals,
            "failed": list(report.failed),
            "scaling": report.scaling,
        },
        args.output,
        "check.complementarity",
        EXIT_OK if report.member else EXIT_CHECK_FAILED,
        {"tol": tol.membership},
    )


def cmd_check_verify(args) -> int:
    cone, payload = load_problem(args.problem, "check.verify")
    if cone.kind != CYLINDER:
        raise SchemaError("check.verify expects a cylinder cone")
    map_ = map_from_json(payload.get("map"))
    instance = micp_solver.MicpInstance(map=map_, inner=cone.inner)
    point = _payload_vector(payload, "point")
    tol = args.tol if args.tol is not None else 1e-8
    report = micp_solver.verify_solution(instance, point, tol=tol)
    region = micp_solver.region_membership(instance, point)
    return emit(
        {
            "ok": report.ok,
            "g_norm": report.g_norm,
            "inner_slack": report.inner_slack,
            "dual_slack": report.dual_slack,
            "orthogonality": report.orthogonality,
            "failed": list(report.failed),
            "region": {
                "in_feasible": region.in_feasible,
                "in_descent": region.in_descent,
                "reasons": list(region.reasons),
            },
        },
        args.output,
        "check.verify",
        EXIT_OK if report.ok else EXIT_CHECK_FAILED,
        {"tol": tol},
    )


def cmd_check_decompose(args) -> int:
    cone, payload = load_problem(args.problem, "check.decompose")
    if cone.kind != MESOC:
        raise SchemaError("check.decompose expects a mesoc cone")
    point = _payload_vector(payload, "point")
    tol = _tolerances(args)
    dec = decompose_mesoc(cone.p, cone.q, point, tol)
    residual = float(np.abs(dec.reconstruct() - np.asarray(point, dtype=float)).max())
    gap_tol = args.tol if args.tol is not None else 1e-10
    ok = residual <= gap_tol
    return emit(
        {
            "weights": dec.weights,
            "first_summand": dec.first_summand,
            "second_summand": dec.second_summand,
            "reconstruction_gap": residual,
            "ok": ok,
        },
        args.output,
        "check.decompose",
        EXIT_OK if ok else EXIT_CHECK_FAILED,
        {"tol": gap_tol},
    )


_CHECKS = {
    "project": cmd_check_project,
    "isotone": cmd_check_isotone,
    "complementarity": cmd_check_complementarity,
    "verify": cmd_check_verify,
    "decompose": cmd_check_decompose,
}


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="path to a JSON problem file")
    common.add_argument("--tol", type=float, default=None, help="override tolerance")
    common.add_argument("--max-iter", type=int, default=2000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--trace", default=None, metavar="PATH", help="write a CSV iteration trace")
    common.add_argument("--output", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(
        prog="mesoc-kit",
        description="Ordered-cone calculus and an isotone fixed-point solver.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("contains", parents=[common], help="membership slacks of a point")
    sub.add_parser("solve", parents=[common], help="run the fixed-point iteration")
    sub.add_parser("lyap-rank", parents=[common], help="numeric Lyapunov rank of a cone")
    check = sub.add_parser("check", help="pass/fail property checks")
    check_sub = check.add_subparsers(dest="check_command", required=True)
    for name in _CHECKS:
        check_sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "contains":
            return cmd_contains(args)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "lyap-rank":
            return cmd_lyap_rank(args)
        return _CHECKS[args.check_command](args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (DimensionError, UnsupportedConeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (MembershipError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except MesocKitError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
