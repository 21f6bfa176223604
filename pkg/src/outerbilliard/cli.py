"""Command line front end.

Every subcommand prints a JSON report to stdout (and to ``--json PATH``)
and maps its outcome to an exit code:

    0  success / identities hold / conic consistent / residual below tolerance
    1  an identity failed, or the Desargues residual exceeded the tolerance
    2  malformed input (parse errors, wrong degree, bad options)
    3  singular or otherwise invalid curve (certify: INVALID_INPUT)
    4  outer billiard solver failure (partial CSV kept)
    5  degenerate tangent line for the Desargues check
    10 EVENNESS_FAILS, 11 H_NOT_CONSTANT, 12 CONTRADICTION_WITNESS
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys

from . import __version__
from .curves import (
    ProjectiveCurve,
    classify_inflections,
    hessian_curve,
    inflection_points,
    is_nonsingular,
)
from .dynamics import ConicPencil, Oval, desargues_involution_check, invariance_drift, orbit
from .errors import (
    DegenerateInput,
    DegenerateTangent,
    InsufficientPairs,
    OuterBilliardError,
    ParseError,
    PointInsideOval,
    SingularCurve,
)
from .integrability import Verdict, certify
from .operators import check_h_scaling, check_vh_equals_w
from .polycore import homogenize, parse_poly, random_poly
from .svg import Figure, trace_implicit

EXIT_CODES = {
    Verdict.CONIC_CONSISTENT: 0,
    Verdict.EVENNESS_FAILS: 10,
    Verdict.H_NOT_CONSTANT: 11,
    Verdict.CONTRADICTION_WITNESS: 12,
    Verdict.INVALID_INPUT: 3,
}


class UsageError(Exception):
    pass


def _pair(text, name):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{name} expects two comma-separated numbers, got {text!r}") from None
    return a, b


def _emit(args, payload):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")


# -- subcommands ------------------------------------------------------------


def cmd_identities(args):
    checks = []
    for text in args.poly or []:
        F = parse_poly(text)
        checks.append({"kind": "vh_equals_w", "F": F.to_string(), "holds": check_vh_equals_w(F)})
    if args.f:
        f = parse_poly(args.f)
        g = parse_poly(args.g or "1")
        checks.append({"kind": "scaling", "f": f.to_string(), "g": g.to_string(),
                       "holds": check_h_scaling(f, g)})
    random_summary = None
    if args.random:
        rng = random.Random(args.seed)
        failures = []
        for i in range(args.random):
            F = random_poly(rng, args.max_degree)
            if not check_vh_equals_w(F):
                failures.append({"kind": "vh_equals_w", "index": i, "F": F.to_string()})
            f = random_poly(rng, min(args.max_degree, 3))
            g = random_poly(rng, 2)
            if not f.is_zero() and not check_h_scaling(f, g):
                failures.append({"kind": "scaling", "index": i, "f": f.to_string(), "g": g.to_string()})
        random_summary = {"count": args.random, "max_degree": args.max_degree, "seed": args.seed,
                          "failures": failures}
    if not checks and random_summary is None:
        raise UsageError("nothing to check: give --poly, --f/--g or --random")
    ok = all(c["holds"] for c in checks) and not (random_summary and random_summary["failures"])
    _emit(args, {"command": "identities", "checks": checks, "random": random_summary, "all_hold": ok})
    return 0 if ok else 1


def _curve_figure(f, bbox, marks=(), trace=None):
    fig = Figure(bbox)
    fig.segments(trace_implicit(f, bbox))
    if trace:
        fig.points(trace, color="blue", radius=2.0)
    fig.points(marks)
    return fig


def cmd_inflect(args):
    f = parse_poly(args.poly)
    curve = ProjectiveCurve.from_affine(f)
    if curve.degree < 2:
        raise DegenerateInput("inflections need degree >= 2")
    if not is_nonsingular(curve, args.seed):
        _emit(args, {"command": "inflect", "poly": f.to_string(), "nonsingular": False,
                     "error": "SingularCurve: projective closure is singular"})
        return 3
    records = inflection_points(curve, args.seed, check_singular=False)
    d = curve.degree
    summary = classify_inflections(records, d)
    payload = {
        "command": "inflect",
        "poly": f.to_string(),
        "homogenized": homogenize(f).to_string(),
        "degree": d,
        "nonsingular": True,
        "hessian": hessian_curve(curve).to_string(),
        "bezout_expected": 3 * d * (d - 2),
        "inflections": [r.to_json() for r in records],
        "summary": summary,
    }
    if args.svg:
        marks = [tuple(c.real for c in r.affine_point()) for r in records if r.real and not r.at_infinity]
        _curve_figure(f, args.bbox, marks).save(args.svg)
    _emit(args, payload)
    return 0


def cmd_certify(args):
    f = parse_poly(args.f)
    g = parse_poly(args.g)
    interior = _pair(args.inside, "--inside") if args.inside else None
    report = certify(f, g, args.K, seed=args.seed, interior=interior)
    payload = {"command": "certify", **report.to_json()}
    _emit(args, payload)
    return EXIT_CODES[report.verdict]


def _oval_from_args(args):
    if args.ellipse:
        return Oval.ellipse(*_pair(args.ellipse, "--ellipse")), f"ellipse {args.ellipse}"
    if args.oval:
        seed = _pair(args.inside, "--inside") if args.inside else (0.0, 0.0)
        try:
            return Oval.implicit(parse_poly(args.oval), seed), args.oval
        except ParseError:
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError("give --ellipse a,b or --oval POLY")


def cmd_orbit(args):
    oval, label = _oval_from_args(args)
    x0 = _pair(args.start, "--from")
    try:
        record = orbit(oval, x0, args.n)
    except PointInsideOval as exc:
        _emit(args, {"command": "orbit", "oval": label, "from": list(x0),
                     "error": f"PointInsideOval: {exc}"})
        return 4
    except OuterBilliardError as exc:
        _emit(args, {"command": "orbit", "oval": label, "from": list(x0),
                     "error": f"{type(exc).__name__}: {exc}"})
        return 4
    if args.csv:
        text = record.to_csv()
        if args.csv == "-":
            sys.stderr.write(text)
        else:
            with open(args.csv, "w") as fh:
                fh.write(text)
    payload = {
        "command": "orbit",
        "oval": label,
        "from": list(x0),
        "steps_requested": args.n,
        "steps_completed": len(record.tangency_points),
        "final_point": list(record.points[-1]),
        "max_solver_residual": max(record.solver_residuals),
        "radius_range": [min(math.hypot(*p) for p in record.points),
                         max(math.hypot(*p) for p in record.points)],
        "error": record.error,
    }
    if args.invariant:
        F = parse_poly(args.invariant)
        payload["invariant"] = F.to_string()
        payload["drift"] = invariance_drift(F, record)
    if args.svg:
        pts = record.points
        extent = max(max(abs(c) for c in p) for p in pts) * 1.15
        bbox = (-extent, extent, -extent, extent)
        fig = Figure(bbox)
        if oval.kind == "ellipse":
            t = [2 * math.pi * k / 200 for k in range(200)]
            fig.polyline([(oval.a * math.cos(s), oval.b * math.sin(s)) for s in t], closed=True)
        else:
            fig.segments(trace_implicit(oval.f, bbox))
        fig.points(pts[:2000], color="red", radius=1.5)
        fig.save(args.svg)
    _emit(args, payload)
    return 4 if record.error else 0


def cmd_desargues(args):
    f1, f2 = parse_poly(args.f1), parse_poly(args.f2)
    try:
        pencil = ConicPencil(f1, f2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.at is None:
        raise UsageError("--at is required")
    base = _pair(args.at, "--at")
    tol = args.tol if args.tol is not None else 1e-8
    try:
        result = desargues_involution_check(pencil, base, members=args.members)
    except (DegenerateTangent, InsufficientPairs) as exc:
        _emit(args, {"command": "desargues", "error": f"{type(exc).__name__}: {exc}"})
        return 5
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"command": "desargues", "f1": f1.to_string(), "f2": f2.to_string(),
               "tolerance": tol, "passed": result.residual < tol, **result.to_json()}
    if args.svg:
        ext = 3.0
        bbox = (-ext, ext, -ext, ext)
        fig = Figure(bbox)
        fig.segments(trace_implicit(f1, bbox))
        fig.segments(trace_implicit(f2, bbox), color="gray")
        d = result.direction
        fig.polyline([(base[0] - 10 * d[0], base[1] - 10 * d[1]), (base[0] + 10 * d[0], base[1] + 10 * d[1])],
                     color="blue")
        fig.points([(base[0] + t * d[0], base[1] + t * d[1]) for pair in result.pairs for t in pair])
        fig.save(args.svg)
    _emit(args, payload)
    return 0 if result.residual < tol else 1


def cmd_render(args):
    bbox = args.bbox
    fig = Figure(bbox)
    polys = [parse_poly(p) for p in args.poly]
    total = 0
    for p in polys:
        segs = trace_implicit(p, bbox)
        total += len(segs)
        fig.segments(segs)
    pts = [_pair(p, "--point") for p in args.point or []]
    fig.points(pts)
    svg_text = fig.to_string()
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(svg_text)
    _emit(args, {"command": "render", "polys": [p.to_string() for p in polys], "points": [list(p) for p in pts],
                 "bbox": list(bbox), "segments": total, "svg": args.svg})
    return 0


# -- parser -----------------------------------------------------------------


def _bbox(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("bbox is xmin,xmax,ymin,ymax") from None
    if len(vals) != 4 or vals[0] >= vals[1] or vals[2] >= vals[3]:
        raise argparse.ArgumentTypeError("bbox is xmin,xmax,ymin,ymax")
    return tuple(vals)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    common.add_argument("--svg", metavar="PATH", help="write an SVG figure here")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")

    parser = argparse.ArgumentParser(prog="outerbilliard", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", parents=[common], help="check the H/W operator identities")
    p.add_argument("--poly", action="append", help="F for the v(H(F)) = W(F) check (repeatable)")
    p.add_argument("--f", help="f for the H(gf) = g^3 H(f) mod f check")
    p.add_argument("--g", help="g for the scaling check (default 1)")
    p.add_argument("--random", type=int, default=0, help="number of seeded random cases")
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("inflect", parents=[common], help="inflection points of a curve")
    p.add_argument("--poly", required=True, help="affine defining polynomial")
    p.add_argument("--bbox", type=_bbox, default=(-2.0, 2.0, -2.0, 2.0))
    p.set_defaults(func=cmd_inflect)

    p = sub.add_parser("certify", parents=[common], help="run the integrability pipeline")
    p.add_argument("--f", required=True)
    p.add_argument("--g", default="1")
    p.add_argument("--K", type=int, default=7, help="odd expansion orders checked up to K (>= 3)")
    p.add_argument("--inside", help="interior point x,y enabling the convexity check")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("orbit", parents=[common], help="iterate the outer billiard map")
    p.add_argument("--ellipse", help="semi-axes a,b")
    p.add_argument("--oval", help="implicit oval polynomial")
    p.add_argument("--inside", help="interior seed for --oval (default 0,0)")
    p.add_argument("--from", dest="start", required=True, help="start point x,y")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--invariant", help="candidate invariant F; prints its drift")
    p.add_argument("--csv", help="orbit CSV path ('-' for stderr)")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("desargues", parents=[common], help="Desargues involution residual on a tangent line")
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--at", default=None, help="tangent base point on f1 = 0")
    p.add_argument("--members", type=int, default=24)
    p.set_defaults(func=cmd_desargues)

    p = sub.add_parser("render", parents=[common], help="SVG of curves and points")
    p.add_argument("--poly", action="append", required=True)
    p.add_argument("--point", action="append", help="point x,y to mark (repeatable)")
    p.add_argument("--bbox", type=_bbox, default=(-2.0, 2.0, -2.0, 2.0))
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "K", 7) < 3:
        parser.error("--K must be at least 3")
    if args.tol is not None and args.tol <= 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SingularCurve, DegenerateInput) as exc:
        print(f"invalid curve: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
