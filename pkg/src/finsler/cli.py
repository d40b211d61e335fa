"""Command-line frontend.

Four subcommands:

    finsler compute --metric SPEC --point "x1,x2;y1,y2" --object g
    finsler verify  --metric SPEC [--samples N] [--seed S]
    finsler table   --metric SPEC --point P
    finsler compare --metric SPEC --point P [--object gamma]

SPEC is a path to a JSON metric file or an inline JSON document. The file
carries `dim`, `family` (riemannian | randers | expression) and the family
payload: `a` as an upper-triangle object keyed "i,j" with expression strings
in x, `b` as a list of expression strings, or `expression` as a single
string. An optional `x_box` ([[lo, hi], ...]) sets the verify sampling box.

Exit codes are a stable contract: 0 success, 1 a verification check failed,
2 malformed spec/arguments, 3 domain or math failure at the requested point.
Index labels in table output are 1-based; JSON components are nested arrays,
outermost index first.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import product
from pathlib import Path

import numpy as np

from . import calculus, geometry
from .conformance import (FD_OBJECTS, Region, Tolerances, fd_object_arrays,
                          run_suite)
from .connections import CANONICAL_NAMES, connection
from .errors import (ConvexityError, EvaluationDomainError, ExpressionError,
                     FinslerError, NotPositiveDefiniteError, SpecError,
                     TruncationError)
from .jets import ChartPoint
from .metrics import MetricSpec, build_metric, verify_homogeneity

OBJECTS = (
    "L", "E", "g", "g_inv", "C", "gamma", "spray", "barthel", "F",
    "torsion_P", "torsion_R", "curvature_h", "curvature_hv", "curvature_v",
    "hcov", "vcov",
)


def load_spec(text):
    """Metric spec from a JSON file path or an inline JSON document.

    Returns (MetricSpec, x_box or None).
    """
    raw = text.strip()
    if not raw.startswith("{"):
        path = Path(raw)
        if not path.exists():
            raise SpecError(f"metric spec file not found: {raw}")
        raw = path.read_text()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecError(f"metric spec is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError("metric spec must be a JSON object")
    known = {"dim", "family", "a", "b", "expression", "x_box"}
    unknown = set(doc) - known
    if unknown:
        raise SpecError(f"unknown metric spec fields: {sorted(unknown)}")
    if "dim" not in doc or "family" not in doc:
        raise SpecError("metric spec needs 'dim' and 'family'")
    a = None
    if doc.get("a") is not None:
        if not isinstance(doc["a"], dict):
            raise SpecError("'a' must be an object keyed \"i,j\"")
        a = {}
        for key, expr in doc["a"].items():
            try:
                i, j = (int(v) for v in str(key).split(","))
            except ValueError as exc:
                raise SpecError(f"bad matrix key {key!r}; use \"i,j\"") from exc
            a[(i, j)] = expr
    spec = MetricSpec(
        dim=doc["dim"],
        family=doc["family"],
        a=a,
        b=doc.get("b"),
        expression=doc.get("expression"),
    )
    x_box = doc.get("x_box")
    if x_box is not None:
        x_box = tuple((float(lo), float(hi)) for lo, hi in x_box)
        if len(x_box) != spec.dim:
            raise SpecError(f"x_box needs {spec.dim} intervals")
    return spec, x_box


def parse_point(text, dim):
    """Parse "x1,..,xn;y1,..,yn" into a ChartPoint."""
    parts = text.split(";")
    if len(parts) != 2:
        raise SpecError(f"point must be 'x1,..;y1,..', got {text!r}")
    try:
        x = [float(v) for v in parts[0].split(",")]
        y = [float(v) for v in parts[1].split(",")]
    except ValueError as exc:
        raise SpecError(f"non-numeric coordinate in point {text!r}") from exc
    if len(x) != dim or len(y) != dim:
        raise SpecError(
            f"point has {len(x)}+{len(y)} coordinates, metric has dimension {dim}"
        )
    try:
        return ChartPoint(x, y)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def _require_homogeneous(metric, point):
    passed, residual = verify_homogeneity(metric, point, 2.0)
    if not passed:
        raise EvaluationDomainError(
            f"fundamental function is not 1-homogeneous at the requested "
            f"point (residual {residual:.3e}); refusing to compute"
        )


def _compute_object(metric, point, obj, conn_name, order):
    if obj in ("L", "E"):
        jet = geometry.energy(metric, point, max(order, 1)) if obj == "E" \
            else metric.eval(point, max(order, 1))
        return (), np.asarray(jet.value)
    if obj == "g":
        return ("d", "d"), geometry.metric_tensor(metric, point).g
    if obj == "g_inv":
        return ("u", "u"), geometry.metric_tensor(metric, point).g_inv
    if obj == "C":
        return ("u", "d", "d"), geometry.cartan_tensor(metric, point).C_up
    if obj == "gamma":
        return ("u", "d", "d"), geometry.formal_christoffel(metric, point)
    if obj == "spray":
        return ("u",), geometry.canonical_spray(metric, point).G
    if obj == "barthel":
        return ("u", "d"), geometry.canonical_spray(metric, point).N
    triple = connection(metric, conn_name)
    if obj == "F":
        return ("u", "d", "d"), triple.values_at(point).F
    if obj == "torsion_P":
        value = calculus.hv_torsion(metric, point)
    elif obj == "torsion_R":
        value = calculus.h_torsion(metric, point)
    elif obj.startswith("curvature_"):
        value = calculus.curvature(triple, obj.split("_", 1)[1], point)
    elif obj == "hcov":
        value = calculus.h_cov_derivative(
            calculus.metric_tensor_field(metric), triple, point
        )
    elif obj == "vcov":
        value = calculus.v_cov_derivative(
            calculus.metric_tensor_field(metric), triple, point
        )
    else:
        raise SpecError(f"unknown object {obj!r}; expected one of {OBJECTS}")
    return tuple(value.signature), value.components


def _emit_json(payload, out):
    out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _component_lines(name, components):
    arr = np.asarray(components)
    if arr.ndim == 0:
        return [f"{name} = {float(arr)!r}"]
    lines = []
    for index in product(*(range(s) for s in arr.shape)):
        label = ",".join(str(i + 1) for i in index)
        lines.append(f"{name}[{label}] = {float(arr[index])!r}")
    return lines


def cmd_compute(args, out):
    spec, _ = load_spec(args.metric)
    metric = build_metric(spec)
    point = parse_point(args.point, spec.dim)
    _require_homogeneous(metric, point)
    signature, components = _compute_object(
        metric, point, args.object, args.connection, args.order
    )
    if args.format == "json":
        _emit_json(
            {
                "object": args.object,
                "connection": args.connection,
                "point": {"x": list(point.x), "y": list(point.y)},
                "signature": list(signature),
                "components": np.asarray(components).tolist(),
            },
            out,
        )
    else:
        out.write(f"{args.object} ({args.connection}) at x={list(point.x)} "
                  f"y={list(point.y)}\n")
        for line in _component_lines(args.object, components):
            out.write(line + "\n")
    return 0


def cmd_verify(args, out):
    spec, x_box = load_spec(args.metric)
    region = Region(x_box=x_box) if x_box else Region.default(spec.dim)
    tol = Tolerances().with_overrides(
        exact=args.tol_exact, derived=args.tol_derived, fd=args.tol_fd
    )
    report = run_suite(
        spec, samples=args.samples, seed=args.seed, region=region,
        tolerances=tol,
    )
    if args.format == "json":
        _emit_json(report.to_dict(), out)
    else:
        out.write(report.render())
    return 0 if report.overall else 1


def cmd_table(args, out):
    spec, _ = load_spec(args.metric)
    metric = build_metric(spec)
    point = parse_point(args.point, spec.dim)
    _require_homogeneous(metric, point)
    g_field = calculus.metric_tensor_field(metric)
    rows = []
    columns = {}
    for name in CANONICAL_NAMES:
        triple = connection(metric, name)
        values = triple.values_at(point)
        columns[name] = {
            "|F|": np.abs(values.F).max(),
            "|C| ((h)hv-torsion)": np.abs(values.C).max(),
            "|P| ((v)hv-torsion)": np.abs(
                calculus.connection_hv_torsion(triple, point).components
            ).max(),
            "|R| ((v)h-torsion)": np.abs(
                calculus.connection_h_torsion(triple, point).components
            ).max(),
            "|g_ij|k| (h-metricity)": np.abs(
                calculus.h_cov_derivative(g_field, triple, point).components
            ).max(),
            "|g_ij|_k| (v-metricity)": np.abs(
                calculus.v_cov_derivative(g_field, triple, point).components
            ).max(),
            "|curvature h|": np.abs(
                calculus.curvature(triple, "h", point).components
            ).max(),
            "|curvature hv|": np.abs(
                calculus.curvature(triple, "hv", point).components
            ).max(),
            "|curvature v|": np.abs(
                calculus.curvature(triple, "v", point).components
            ).max(),
        }
        if not rows:
            rows = list(columns[name])
    if args.format == "json":
        _emit_json(
            {
                "point": {"x": list(point.x), "y": list(point.y)},
                "rows": rows,
                "columns": {
                    name: {row: float(columns[name][row]) for row in rows}
                    for name in CANONICAL_NAMES
                },
            },
            out,
        )
        return 0
    width = max(len(r) for r in rows) + 2
    header = " " * width + "".join(f"{name:>12}" for name in CANONICAL_NAMES)
    out.write(f"connection comparison at x={list(point.x)} y={list(point.y)}\n")
    out.write(header + "\n")
    for row in rows:
        cells = "".join(f"{columns[name][row]:>12.3e}" for name in CANONICAL_NAMES)
        out.write(f"{row:<{width}}" + cells + "\n")
    return 0


def cmd_compare(args, out):
    spec, _ = load_spec(args.metric)
    metric = build_metric(spec)
    point = parse_point(args.point, spec.dim)
    _require_homogeneous(metric, point)
    objects = [args.object] if args.object else list(FD_OBJECTS)
    for obj in objects:
        if obj not in FD_OBJECTS:
            raise SpecError(
                f"object {obj!r} has no difference oracle; choose from {FD_OBJECTS}"
            )
    x, y = point.arrays()
    pg = geometry.PointGeometry(metric, x, y, order_hint=5)
    ad_values = {
        "g": lambda: pg.g(0).coeffs[..., 0],
        "gamma": lambda: pg.gamma(0).coeffs[..., 0],
        "spray": lambda: pg.spray(0).coeffs[..., 0],
        "barthel": lambda: pg.N(0).coeffs[..., 0],
        "cartan_F": lambda: pg.Gamma(0).coeffs[..., 0],
        "berwald_F": lambda: pg.G2(0).coeffs[..., 0],
    }
    results = {}
    for obj in objects:
        ad = np.asarray(ad_values[obj]())
        fd = fd_object_arrays(metric, x, y, obj)
        rel = np.abs(ad - fd) / np.maximum(1.0, np.abs(ad))
        results[obj] = (ad, fd, float(rel.max()))
    if args.format == "json":
        _emit_json(
            {
                "point": {"x": list(point.x), "y": list(point.y)},
                "objects": {
                    obj: {
                        "engine": ad.tolist(),
                        "oracle": fd.tolist(),
                        "max_relative_error": err,
                    }
                    for obj, (ad, fd, err) in results.items()
                },
            },
            out,
        )
        return 0
    for obj, (ad, fd, err) in results.items():
        out.write(f"{obj}: max relative error {err:.3e}\n")
        ad_lines = _component_lines(obj, ad)
        fd_flat = np.asarray(fd).ravel()
        for line, fd_val in zip(ad_lines, fd_flat):
            out.write(f"  {line}   oracle {float(fd_val)!r}\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="finsler",
        description="Finsler geometry engine: compute connection data, verify "
                    "identities, compare against a finite-difference oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, point=True):
        p.add_argument("--metric", required=True,
                       help="path to a JSON metric spec, or inline JSON")
        if point:
            p.add_argument("--point", required=True,
                           help="chart point as 'x1,..,xn;y1,..,yn'")
        p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("compute", help="evaluate one object at a point")
    common(p)
    p.add_argument("--object", choices=OBJECTS, required=True)
    p.add_argument("--connection", choices=CANONICAL_NAMES, default="cartan")
    p.add_argument("--order", type=int, default=4,
                   help="jet order used when evaluating scalar objects")
    p.set_defaults(fn=cmd_compute)

    p = sub.add_parser("verify", help="run the identity verification suite")
    common(p, point=False)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-exact", type=float, default=None)
    p.add_argument("--tol-derived", type=float, default=None)
    p.add_argument("--tol-fd", type=float, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("table", help="side-by-side comparison of the four "
                                     "connections at a point")
    common(p)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("compare", help="engine vs finite-difference oracle")
    common(p)
    p.add_argument("--object", choices=FD_OBJECTS, default=None,
                   help="restrict to one object (default: all)")
    p.set_defaults(fn=cmd_compare)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, out)
    except (SpecError, ExpressionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EvaluationDomainError, ConvexityError, NotPositiveDefiniteError,
            TruncationError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FinslerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
