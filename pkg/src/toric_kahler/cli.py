"""Command-line front end: solve, curvature, validate, dim2, transform, demo.

Reports are JSON documents with a "schema": 1 field, exact rationals as
"p/q" strings, and deterministic ordering, so a fixed input and seed give
byte-identical output.  Curvature samples can additionally be written as
CSV (columns x_1..x_n, r, Sc_general, Sc_closed, rel_err) for plotting
Sc against r.

Exit codes: 0 success, 2 malformed input (argument or schema), 3 math
failure (the report carries the diagnostic), 4 validation verdict fail.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .calabi import (
    ConstraintError,
    PoleError,
    PolytopeSpec,
    build_potential,
    classification_to_json_dict,
    classify,
    profile_to_json_dict,
    scalar_curvature_radial,
    solve_parameters,
    spec_to_json_dict,
)
from .curvature import cross_validate, verify_extremal
from .dim2 import classify_dim2, family_to_json_dict, gauss_curvature_check
from .polytope import DomainError, LinearChange
from .potential import (
    potential_from_json_dict,
    potential_to_json_dict,
    transform_potential,
)
from .rational import format_rational, parse_rational
from .validate import validate_potential

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_MATH = 3
EXIT_VALIDATION = 4

# math-layer failures carry diagnostics in the report; schema failures abort
MATH_ERRORS = (DomainError, PoleError, ConstraintError, ArithmeticError, ValueError, ZeroDivisionError)


class SchemaError(Exception):
    """Malformed input document or option set."""


@dataclass
class JobSpec:
    """One CLI invocation: a command plus its parsed input document."""

    command: str
    input: dict = field(default_factory=dict)
    output: str | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# document plumbing
# ---------------------------------------------------------------------------


def _load_document(text_or_path: str) -> dict:
    """Inline JSON (starts with '{') or a path to a JSON file."""
    text = text_or_path
    if not text_or_path.lstrip().startswith("{"):
        try:
            with open(text_or_path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read input document: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"input is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("input document must be a JSON object")
    return doc


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing required field '{key}'")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{where}: field '{key}' has the wrong type")
    return value


def _number(doc: dict, key: str, where: str, required=True):
    """Exact number: int, or rational/decimal string."""
    if key not in doc or doc[key] is None:
        if required:
            raise SchemaError(f"{where}: missing required field '{key}'")
        return None
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise SchemaError(f"{where}: field '{key}' must be a number or 'p/q' string")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: field '{key}': {exc}") from exc


def _parse_spec(doc: dict, where: str) -> tuple[PolytopeSpec, list]:
    spec_doc = _require(doc, "spec", dict, where)
    n = _require(spec_doc, "n", int, f"{where}.spec")
    m = _number(spec_doc, "m", f"{where}.spec")
    a = _number(spec_doc, "a", f"{where}.spec")
    b = _number(spec_doc, "b", f"{where}.spec", required=False)
    constraints = doc.get("constraints", [])
    if not isinstance(constraints, list) or not all(isinstance(c, str) for c in constraints):
        raise SchemaError(f"{where}: 'constraints' must be a list of strings")
    return PolytopeSpec(n, m, a, b), constraints


def _emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_text(text: str, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _step_override(job: JobSpec):
    step = job.tolerances.get("step")
    if step is None:
        return None
    try:
        return float(step)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"tolerances.step must be a number: {step!r}") from exc


# ---------------------------------------------------------------------------
# command runners
# ---------------------------------------------------------------------------


def _run_solve(job: JobSpec) -> tuple[dict, int]:
    spec, constraints = _parse_spec(job.input, "solve")
    profile = solve_parameters(spec, tuple(constraints))
    report = {
        "schema": SCHEMA_VERSION,
        "command": "solve",
        "spec": spec_to_json_dict(spec),
        "constraints": list(constraints),
        "profile": profile_to_json_dict(profile),
        "classification": classification_to_json_dict(classify(profile)),
    }
    return report, EXIT_OK


def _run_curvature(job: JobSpec) -> tuple[dict, int]:
    doc = job.input
    samples = doc.get("samples", 30)
    if not isinstance(samples, int) or samples < 1:
        raise SchemaError("curvature: 'samples' must be a positive integer")
    step = _step_override(job)
    inputs: dict = {"samples": samples, "seed": job.seed}
    if "potential" in doc:
        pot_doc = _require(doc, "potential", dict, "curvature")
        try:
            s = potential_from_json_dict(pot_doc)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"curvature: bad potential document: {exc}") from exc
        report_obj = verify_extremal(s, s.sampling_domain(), samples, seed=job.seed, step=step)
        inputs["potential"] = potential_to_json_dict(s)
    elif "spec" in doc:
        spec, constraints = _parse_spec(doc, "curvature")
        profile = solve_parameters(spec, tuple(constraints))
        report_obj = cross_validate(profile, spec, samples, seed=job.seed, step=step)
        inputs["spec"] = spec_to_json_dict(spec)
        inputs["constraints"] = list(constraints)
        inputs["profile"] = profile_to_json_dict(profile)
    else:
        raise SchemaError("curvature: document needs either 'spec' or 'potential'")
    report = {
        "schema": SCHEMA_VERSION,
        "command": "curvature",
        "inputs": inputs,
        "report": report_obj.to_json_dict(),
    }
    csv_path = doc.get("csv")
    if csv_path is not None:
        if not isinstance(csv_path, str):
            raise SchemaError("curvature: 'csv' must be a path string")
        _write_text(report_obj.to_csv(), csv_path)
        report["csv"] = csv_path
    return report, EXIT_OK


def _run_validate(job: JobSpec) -> tuple[dict, int]:
    doc = job.input
    mesh = doc.get("mesh", 8)
    if not isinstance(mesh, int) or mesh < 4:
        raise SchemaError("validate: 'mesh' must be an integer >= 4")
    if "potential" in doc:
        pot_doc = _require(doc, "potential", dict, "validate")
        try:
            s = potential_from_json_dict(pot_doc)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"validate: bad potential document: {exc}") from exc
        inputs = {"potential": potential_to_json_dict(s), "mesh": mesh}
    elif "spec" in doc:
        spec, constraints = _parse_spec(doc, "validate")
        profile = solve_parameters(spec, tuple(constraints))
        s = build_potential(profile, spec)
        inputs = {
            "spec": spec_to_json_dict(spec),
            "constraints": list(constraints),
            "profile": profile_to_json_dict(profile),
            "mesh": mesh,
        }
    else:
        raise SchemaError("validate: document needs either 'spec' or 'potential'")
    # validate on the region the potential itself claims (pole caps included)
    region = s.sampling_domain()
    result = validate_potential(s, region, mesh=mesh)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "validate",
        "inputs": inputs,
        "report": result.to_json_dict(),
    }
    return report, EXIT_OK if result.passed else EXIT_VALIDATION


def _run_dim2(job: JobSpec) -> tuple[dict, int]:
    doc = job.input
    k = _number(doc, "k", "dim2")
    b = _number(doc, "b", "dim2")
    c = _number(doc, "c", "dim2")
    family = classify_dim2(k, b, c)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "dim2",
        "family": family_to_json_dict(family),
    }
    points = doc.get("curvature_at", [])
    if points:
        if not isinstance(points, list):
            raise SchemaError("dim2: 'curvature_at' must be a list of numbers")
        checks = []
        for raw in points:
            x = float(parse_rational(raw))
            checks.append({"x": x, "Sc": gauss_curvature_check(family, x)})
        report["curvature_checks"] = checks
    return report, EXIT_OK


def _run_transform(job: JobSpec) -> tuple[dict, int]:
    doc = job.input
    pot_doc = _require(doc, "potential", dict, "transform")
    matrix = _require(doc, "matrix", list, "transform")
    try:
        s = potential_from_json_dict(pot_doc)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"transform: bad potential document: {exc}") from exc
    try:
        rows = [[parse_rational(v) for v in row] for row in matrix]
        change = LinearChange(rows)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"transform: bad matrix: {exc}") from exc
    transformed = transform_potential(s, change)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "transform",
        "matrix": [[format_rational(v) for v in row] for row in rows],
        "potential": potential_to_json_dict(transformed),
    }
    return report, EXIT_OK


# the demo table: one row per closed-form family solve
_DEMO_FAMILIES = (
    ("scalar_flat", ("C=0", "D=0"), (2, 1, 1, None)),
    ("scalar_flat", ("C=0", "D=0"), (3, 2, 1, None)),
    ("kahler_einstein", ("B=0", "D=0"), (2, 1, 1, None)),
    ("kahler_einstein", ("B=0", "D=0"), (3, 1, 2, None)),
    ("ricci_flat", ("B=0", "D=0"), (2, 2, 1, None)),
    ("ricci_flat", ("B=0", "D=0"), (3, 3, 1, None)),
    ("constant_negative", ("D=0", "C=-1"), (2, 1, 1, None)),
    ("bounded_extremal", (), (2, 1, 1, 2)),
)

_DEMO_SURFACES = (
    ("0", "0", "1"),
    ("0", "1", "0"),
    ("0", "1/2", "0"),
    ("1", "0", "1"),
    ("-1", "0", "1"),
    ("-1", "0", "-1"),
    ("-1", "0", "0"),
)


def _run_demo(job: JobSpec) -> tuple[dict, int]:
    families = []
    for label, constraints, (n, m, a, b) in _DEMO_FAMILIES:
        spec = PolytopeSpec(n, m, a, b)
        profile = solve_parameters(spec, constraints)
        midpoint = (spec.a + spec.b) / 2 if spec.bounded else spec.a + 1
        families.append(
            {
                "family": label,
                "spec": spec_to_json_dict(spec),
                "constraints": list(constraints),
                "profile": profile_to_json_dict(profile),
                "classification": classification_to_json_dict(classify(profile)),
                "Sc_at_midpoint": format_rational(scalar_curvature_radial(profile, midpoint)),
            }
        )
    surfaces = []
    for k, b, c in _DEMO_SURFACES:
        family = classify_dim2(k, b, c)
        surfaces.append(family_to_json_dict(family))
    report = {
        "schema": SCHEMA_VERSION,
        "command": "demo",
        "parameter_solutions": families,
        "surface_catalogue": surfaces,
    }
    return report, EXIT_OK


_RUNNERS = {
    "solve": _run_solve,
    "curvature": _run_curvature,
    "validate": _run_validate,
    "dim2": _run_dim2,
    "transform": _run_transform,
    "demo": _run_demo,
}


def run(job: JobSpec) -> int:
    """Execute one job, write its report, and return the process exit code."""
    runner = _RUNNERS.get(job.command)
    if runner is None:
        raise SchemaError(f"unknown command: {job.command}")
    try:
        report, code = runner(job)
    except SchemaError:
        raise
    except MATH_ERRORS as exc:
        report = {
            "schema": SCHEMA_VERSION,
            "command": job.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        _emit(report, job.output)
        return EXIT_MATH
    _emit(report, job.output)
    return code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric-kahler",
        description="Toric Kahler metrics from symplectic potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output", "-o", help="write the JSON report here (default stdout)")
        p.add_argument("--spec", help="input document: JSON file path or inline JSON object")

    def add_family(p):
        p.add_argument("--n", type=int, help="complex dimension")
        p.add_argument("--m", help="facet label (rational)")
        p.add_argument("--a", help="inner boundary value (rational)")
        p.add_argument("--b", help="outer boundary value (rational, omit for unbounded)")
        p.add_argument(
            "--constraint",
            action="append",
            default=[],
            metavar="EXPR",
            help="extra parameter constraint, e.g. C=0 (repeatable)",
        )

    p = sub.add_parser("solve", help="solve the radial-profile parameters on a polytope")
    add_common(p)
    add_family(p)

    p = sub.add_parser("curvature", help="scalar curvature report (two routes when radial)")
    add_common(p)
    add_family(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--step", type=float, help="finite-difference step override")
    p.add_argument("--csv", help="also write samples as CSV here")

    p = sub.add_parser("validate", help="positive definiteness and boundary delta law")
    add_common(p)
    add_family(p)
    p.add_argument("--mesh", type=int)

    p = sub.add_parser("dim2", help="classify a constant-curvature surface potential")
    add_common(p)
    p.add_argument("--k", help="curvature parameter (rational)")
    p.add_argument("--b", help="linear coefficient (rational)")
    p.add_argument("--c", help="constant coefficient (rational)")
    p.add_argument(
        "--curvature-at",
        action="append",
        default=[],
        metavar="X",
        help="numerically check the curvature at this point (repeatable)",
    )

    p = sub.add_parser("transform", help="apply a linear change of coordinates to a potential")
    add_common(p)
    p.add_argument("--matrix", help="invertible matrix as JSON rows, e.g. [[1,1],[0,1]]")

    p = sub.add_parser("demo", help="parameter-solution table plus the surface catalogue")
    add_common(p)

    return parser


def _merge_args(args: argparse.Namespace) -> JobSpec:
    """Fold CLI flags into the input document; flags win over the document."""
    doc = _load_document(args.spec) if getattr(args, "spec", None) else {}
    command = args.command

    if command in ("solve", "curvature", "validate"):
        spec_doc = dict(doc.get("spec") or {})
        for key in ("n", "m", "a", "b"):
            value = getattr(args, key, None)
            if value is not None:
                spec_doc[key] = value
        if spec_doc:
            doc["spec"] = spec_doc
        if getattr(args, "constraint", None):
            doc["constraints"] = list(doc.get("constraints", [])) + args.constraint
    if command == "curvature":
        if args.samples is not None:
            doc["samples"] = args.samples
        if args.csv is not None:
            doc["csv"] = args.csv
    if command == "validate" and args.mesh is not None:
        doc["mesh"] = args.mesh
    if command == "dim2":
        for key in ("k", "b", "c"):
            value = getattr(args, key, None)
            if value is not None:
                doc[key] = value
        if args.curvature_at:
            doc["curvature_at"] = list(doc.get("curvature_at", [])) + args.curvature_at
    if command == "transform" and args.matrix is not None:
        try:
            doc["matrix"] = json.loads(args.matrix)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"--matrix is not valid JSON: {exc}") from exc

    tolerances = dict(doc.get("tolerances") or {})
    if getattr(args, "step", None) is not None:
        tolerances["step"] = args.step
    seed = doc.get("seed", 0)
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    if not isinstance(seed, int):
        raise SchemaError("'seed' must be an integer")
    return JobSpec(command, doc, args.output, seed, tolerances)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        job = _merge_args(args)
        return run(job)
    except SchemaError as exc:
        print(f"toric-kahler: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
