"""Command line interface.

Subcommands work on a measure specification JSON (omega, rank, null,
moments, capcheck, marginal) or on a block payload JSON (favard). Output is
canonical JSON by default: keys sorted, floats rendered with 17 significant
digits, rationals as "p/q" strings, so identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from .errors import (
    DepthExceededError,
    InconsistentMomentsError,
    InternalConsistencyError,
    NotFinitelySupportedError,
    SpecFormatError,
    ValidationFailedError,
)
from .favard import FockInput, reconstruct_discrete, validate
from .fock import (
    adjointness_residuals,
    assemble_fock,
    azero_symmetry_residuals,
    check_commutation,
    vacuum_moment,
)
from .gradation import build_gradations
from .marginal import MarginalSpec, jacobi_1d, marginal_functional
from .measures import (
    DiscreteMeasure,
    JacobiPair1D,
    circle_functional,
    discrete_functional,
    jacobi_to_moments,
    product_functional,
    table_functional,
)
from .nullideal import base_generators, rank_sequence
from .polynomial import monomials_up_to
from .scalars import Tolerances, format_scalar, is_rational, parse_scalar

DEFAULT_DEPTH_ENV = "MVOP_DEFAULT_DEPTH"


# ---------------------------------------------------------------------------
# canonical output


def _render_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, Fraction):
        return json.dumps(f"{value.numerator}/{value.denominator}")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise ValueError("non-finite value in output")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def render_json(obj, indent: int = 0) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {render_json(v, indent + 2)}"
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{render_json(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _render_scalar(obj)


def _flatten(obj, prefix: str, rows: list):
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k), rows)
    elif isinstance(obj, (list, tuple)):
        for j, v in enumerate(obj):
            _flatten(v, f"{prefix}.{j}" if prefix else str(j), rows)
    else:
        rows.append((prefix, _render_scalar(obj).strip('"')))


def render_csv(obj) -> str:
    rows: list = []
    _flatten(obj, "", rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def render_pretty(obj, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list, tuple)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_pretty(v, indent + 2))
            else:
                flat = _render_scalar(v) if not isinstance(v, (dict, list, tuple)) else "[]"
                lines.append(f"{pad}{k}: {flat}")
        return "\n".join(lines)
    if isinstance(obj, (list, tuple)):
        lines = []
        for v in obj:
            if isinstance(v, (dict, list, tuple)) and v:
                lines.append(f"{pad}-")
                lines.append(render_pretty(v, indent + 2))
            else:
                flat = _render_scalar(v) if not isinstance(v, (dict, list, tuple)) else "[]"
                lines.append(f"{pad}- {flat}")
        return "\n".join(lines)
    return f"{pad}{_render_scalar(obj)}"


def emit(obj, fmt: str) -> str:
    if fmt == "json":
        return render_json(obj)
    if fmt == "csv":
        return render_csv(obj)
    if fmt == "pretty":
        return render_pretty(obj)
    raise ValueError(f"unknown format {fmt!r}")


def _dump_matrix(mat, exact: bool) -> list:
    return [[format_scalar(v, exact) for v in row] for row in np.asarray(mat).tolist()]


def _dump_value(v):
    return format_scalar(v, is_rational(v))


# ---------------------------------------------------------------------------
# measure specification payloads


def _require(payload: dict, key: str):
    if key not in payload:
        raise SpecFormatError(f"measure spec is missing {key!r}")
    return payload[key]


def functional_from_payload(payload, needed_depth: int):
    if not isinstance(payload, dict):
        raise SpecFormatError("measure spec must be a JSON object")
    version = payload.get("spec_version", 1)
    if version != 1:
        raise SpecFormatError(f"unsupported spec_version {version!r}")
    mtype = _require(payload, "type")
    try:
        if mtype == "discrete":
            atoms = tuple(
                tuple(parse_scalar(v) for v in row) for row in _require(payload, "atoms")
            )
            weights = tuple(parse_scalar(v) for v in _require(payload, "weights"))
            return discrete_functional(DiscreteMeasure(atoms=atoms, weights=weights))
        if mtype == "product":
            factors = [
                functional_from_payload(sub, needed_depth)
                for sub in _require(payload, "factors")
            ]
            return product_functional(factors)
        if mtype in ("circle", "half_circle"):
            depth = int(payload.get("max_degree", needed_depth))
            return circle_functional(half=mtype == "half_circle", max_degree=depth)
        if mtype == "moments_table":
            dimension = int(_require(payload, "dimension"))
            depth = int(_require(payload, "depth"))
            entries = {}
            for key, value in _require(payload, "entries").items():
                try:
                    alpha = tuple(int(part) for part in str(key).split(","))
                except ValueError:
                    raise SpecFormatError(f"bad moment table key {key!r}") from None
                entries[alpha] = parse_scalar(value)
            return table_functional(dimension, entries, depth)
        if mtype == "jacobi_1d":
            pair = JacobiPair1D(
                omegas=tuple(parse_scalar(v) for v in _require(payload, "omegas")),
                alphas=tuple(parse_scalar(v) for v in _require(payload, "alphas")),
            )
            depth = int(payload.get("depth", needed_depth))
            return jacobi_to_moments(pair, max(depth, needed_depth))
    except (TypeError, ValueError) as exc:
        raise SpecFormatError(f"bad {mtype} spec: {exc}") from None
    raise SpecFormatError(f"unknown measure type {mtype!r}")


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_functional(args, needed_depth: int):
    if not args.spec:
        raise SpecFormatError("this command needs --spec FILE")
    return functional_from_payload(_load_json(args.spec), needed_depth)


# ---------------------------------------------------------------------------
# commands


def cmd_omega(args, tol: Tolerances):
    n = args.max_degree
    f = _load_functional(args, 2 * n)
    g = build_gradations(f, n, mode=args.mode, tol=tol)
    blocks = [
        {"degree": m, "omega": _dump_matrix(g.level(m).omega(), g.exact)}
        for m in range(n + 1)
    ]
    return (
        {
            "command": "omega",
            "dimension": g.dimension,
            "depth": n,
            "mode": g.mode,
            "blocks": blocks,
        },
        0,
    )


def cmd_rank(args, tol: Tolerances):
    n = args.max_degree
    f = _load_functional(args, 2 * n)
    g = build_gradations(f, n, mode=args.mode, tol=tol)
    rs = rank_sequence(g)
    rows = [
        {"degree": deg, "dimension": dim, "rank": rank, "nullity": nullity}
        for deg, dim, rank, nullity in zip(rs.degrees, rs.dims, rs.ranks, rs.nullities)
    ]
    return (
        {
            "command": "rank",
            "dimension": g.dimension,
            "depth": n,
            "mode": g.mode,
            "table": rows,
            "has_deficiency": rs.has_deficiency,
            "first_deficient_degree": rs.first_deficient_degree,
        },
        0,
    )


def _dump_polynomial(f, exact: bool) -> list:
    return [
        {"exponents": list(alpha), "coefficient": format_scalar(c, exact)}
        for alpha, c in f.sorted_terms()
    ]


def cmd_null(args, tol: Tolerances):
    n = args.max_degree
    f = _load_functional(args, 2 * n)
    g = build_gradations(f, n, mode=args.mode, tol=tol)
    basis = base_generators(g)
    gens = [
        {"degree": gen.degree, "terms": _dump_polynomial(gen, g.exact)}
        for gen in basis.generators
    ]
    return (
        {
            "command": "null",
            "dimension": g.dimension,
            "depth": n,
            "mode": g.mode,
            "generators": gens,
            "reduction": basis.reduction_log,
        },
        0,
    )


def cmd_moments(args, tol: Tolerances):
    n = args.max_degree
    f = _load_functional(args, 2 * n + 2)
    g = build_gradations(f, n, mode=args.mode, tol=tol)
    fock = assemble_fock(g, tol=tol)
    rows = []
    worst = 0.0
    for alpha in monomials_up_to(g.dimension, n):
        word = vacuum_moment(fock, alpha)
        direct = g.functional.moment(alpha)
        dev = abs(float(word) - float(direct))
        worst = max(worst, dev)
        rows.append(
            {
                "alpha": list(alpha),
                "word_value": _dump_value(word),
                "direct_value": _dump_value(direct),
            }
        )
    return (
        {
            "command": "moments",
            "dimension": g.dimension,
            "depth": n,
            "mode": g.mode,
            "moments": rows,
            "max_deviation": worst,
        },
        0,
    )


def cmd_capcheck(args, tol: Tolerances):
    n = args.max_degree
    f = _load_functional(args, 2 * n + 2)
    g = build_gradations(f, n, mode=args.mode, tol=tol)
    fock = assemble_fock(g, tol=tol)
    report = check_commutation(fock, tol=tol)
    adjoint = [
        {"coordinate": i, "degree": m, "residual": float(r)}
        for (i, m), r in sorted(adjointness_residuals(fock).items())
    ]
    symmetry = [
        {"coordinate": i, "degree": m, "residual": float(r)}
        for (i, m), r in sorted(azero_symmetry_residuals(fock).items())
    ]
    relations = [
        {
            "relation": e.relation,
            "pair": list(e.pair),
            "degree": e.degree,
            "residual": float(e.residual),
            "tolerance": float(e.tolerance),
            "passed": e.passed,
        }
        for e in report.entries
    ]
    passed = report.passed
    return (
        {
            "command": "capcheck",
            "dimension": g.dimension,
            "depth": n,
            "mode": g.mode,
            "adjointness": adjoint,
            "preservation_symmetry": symmetry,
            "commutation": relations,
            "max_commutation_residual": report.max_residual,
            "passed": passed,
        },
        0 if passed else 3,
    )


def cmd_marginal(args, tol: Tolerances):
    n = args.max_degree
    if not args.coords:
        raise SpecFormatError("marginal needs --coords, e.g. --coords 1 or --coords 1,2")
    try:
        coords = tuple(int(part) - 1 for part in args.coords.split(","))
    except ValueError:
        raise SpecFormatError(f"bad --coords value {args.coords!r}") from None
    f = _load_functional(args, 2 * n)
    spec = MarginalSpec(source=f, coords=coords)
    out = {
        "command": "marginal",
        "coords": [c + 1 for c in coords],
        "depth": n,
    }
    if len(coords) == 1:
        pair = jacobi_1d(marginal_functional(spec), n, mode=args.mode, tol=tol)
        exact = pair.is_exact
        out["omegas"] = [format_scalar(v, exact) for v in pair.omegas]
        out["alphas"] = [format_scalar(v, exact) for v in pair.alphas]
        out["mode"] = "exact" if exact else "float"
    else:
        g = build_gradations(marginal_functional(spec), n, mode=args.mode, tol=tol)
        out["mode"] = g.mode
        out["blocks"] = [
            {"degree": m, "omega": _dump_matrix(g.level(m).omega(), g.exact)}
            for m in range(n + 1)
        ]
    return out, 0


def cmd_favard(args, tol: Tolerances):
    if not args.fock:
        raise SpecFormatError("favard needs --fock FILE")
    fi = FockInput.from_json_dict(_load_json(args.fock))
    report = validate(fi, mode=args.mode, tol=tol)
    checks = [
        {
            "name": c.name,
            "detail": c.detail,
            "residual": float(c.residual),
            "tolerance": float(c.tolerance),
            "passed": c.passed,
        }
        for c in report.checks
    ]
    out = {
        "command": "favard",
        "dimension": fi.dimension,
        "depth": fi.depth,
        "checks": checks,
        "validation_passed": report.passed,
    }
    if not report.passed:
        out["status"] = "invalid"
        out["reason"] = report.summary()
        return out, 3
    try:
        measure = reconstruct_discrete(fi, seed=args.seed, mode=args.mode, tol=tol)
    except NotFinitelySupportedError as exc:
        out["status"] = "refused"
        out["reason"] = str(exc)
        return out, 0
    out["status"] = "reconstructed"
    out["measure"] = {
        "atoms": [[_dump_value(c) for c in atom] for atom in measure.atoms],
        "weights": [_dump_value(w) for w in measure.weights],
        "raw_atoms": [list(a) for a in measure.raw_atoms],
        "raw_weights": list(measure.raw_weights),
    }
    return out, 0


COMMANDS = {
    "omega": cmd_omega,
    "rank": cmd_rank,
    "null": cmd_null,
    "moments": cmd_moments,
    "capcheck": cmd_capcheck,
    "marginal": cmd_marginal,
    "favard": cmd_favard,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvop",
        description="Orthogonal gradations, block operators, and reconstructions "
        "of multivariate moment functionals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("omega", "form generators per degree"),
        ("rank", "dimension, rank, and nullity per degree"),
        ("null", "generators of the null ideal"),
        ("moments", "moments recovered from vacuum words versus direct values"),
        ("capcheck", "adjointness, symmetry, and commutation residuals"),
        ("marginal", "marginal recurrence coefficients or form generators"),
        ("favard", "validate external blocks and reconstruct a discrete measure"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", help="measure specification JSON file")
        p.add_argument("--fock", help="block payload JSON file (favard)")
        p.add_argument(
            "--max-degree",
            type=int,
            default=None,
            help=f"maximal degree (default: ${DEFAULT_DEPTH_ENV} or 6)",
        )
        p.add_argument("--mode", choices=["exact", "float", "auto"], default="auto")
        p.add_argument("--tol-rank", type=float, default=None, help="rank cutoff override")
        p.add_argument("--seed", type=int, default=0, help="diagonalization seed (favard)")
        p.add_argument("--format", choices=["json", "csv", "pretty"], default="json")
        p.add_argument("--coords", help="1-based coordinates, comma separated (marginal)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; malformed invocation is exit 1 here
        return 0 if exc.code in (0, None) else 1

    if args.max_degree is None:
        raw = os.environ.get(DEFAULT_DEPTH_ENV, "6")
        try:
            args.max_degree = int(raw)
        except ValueError:
            print(f"error: bad {DEFAULT_DEPTH_ENV} value {raw!r}", file=sys.stderr)
            return 1
    if args.max_degree < 0:
        print("error: --max-degree must be >= 0", file=sys.stderr)
        return 1
    tol = Tolerances() if args.tol_rank is None else Tolerances(rank=args.tol_rank)

    try:
        obj, code = COMMANDS[args.command](args, tol)
    except (SpecFormatError, DepthExceededError, json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InconsistentMomentsError, InternalConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationFailedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(emit(obj, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
