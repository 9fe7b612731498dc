"""Command-line interface: run shipped examples, synthesize meshes, verify.

Subcommands:

* example: full pipeline on a shipped potential, mesh plus a closed-form
  comparison report with the projective distance at every vertex.
* synth: the same pipeline for a user potential file (CSV always; OBJ for
  m = 2 after a stereographic projection to R^4 with the last coordinate
  dropped, a visualization convenience that is clearly lossy).
* verify: the invariant suite, report as JSON, exit 0 only if it passes.

Numeric flags accept exact rational syntax "p/q" where meaningful, and
lambda accepts "1", "i", "a+bi" with rational parts, or "cis:p/q" for
exp(i pi p/q).  Vertex evaluation parallelizes across WILLMORE_THREADS.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources

import numpy as np

from .errors import PotentialFormatError, WillmoreError
from .frames import integrate_frame
from .iwasawa import assemble_frame, solve_iwasawa_float
from .potentials import load_potential, to_nilpotent
from .surfaces import extract_pair, induced_metric, reference_lift_eval
from .verify import run_suite


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("expected a rational like 3/2, got %r" % text)


def _radius(text: str) -> float:
    r = float(_parse_rational(text))
    if r <= 0:
        raise argparse.ArgumentTypeError("radius must be positive")
    return r


def _parse_lambda(text: str) -> complex:
    """Unit-circle family parameter: '1', 'i', 'a+bi', or 'cis:p/q'."""
    s = text.strip().replace(" ", "")
    if s.startswith("cis:"):
        turns = Fraction(s[4:])
        lam = cmath.exp(1j * math.pi * float(turns))
    else:
        lam = _parse_complex(s)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise argparse.ArgumentTypeError(
            "lambda must lie on the unit circle, got %r with |lambda| = %.6f"
            % (text, abs(lam))
        )
    return lam


def _parse_complex(s: str) -> complex:
    if s in ("i", "+i"):
        return 1j
    if s == "-i":
        return -1j
    if s.endswith("i"):
        body = s[:-1]
        # Split a+bi at the sign of the imaginary part (never inside p/q
        # and never the leading sign).
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                re = Fraction(body[:k])
                imtext = body[k:]
                im = Fraction(1) if imtext in ("+",) else (
                    Fraction(-1) if imtext == "-" else Fraction(imtext))
                return complex(float(re), float(im))
        body = body or "1"
        if body in ("+", "-"):
            body += "1"
        return complex(0.0, float(Fraction(body)))
    return complex(float(Fraction(s)), 0.0)


def _thread_count() -> int:
    raw = os.environ.get("WILLMORE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _grid_points(kind: str, n: int, radius: float):
    """Vertex list; polar grids keep ring structure for face generation."""
    if kind == "polar":
        pts = [0j]
        for k in range(1, n + 1):
            r = radius * k / n
            for j in range(n):
                th = 2 * math.pi * j / n
                pts.append(complex(r * math.cos(th), r * math.sin(th)))
        return pts
    pts = []
    for b in range(n):
        y = -radius + 2 * radius * b / (n - 1) if n > 1 else 0.0
        for a in range(n):
            x = -radius + 2 * radius * a / (n - 1) if n > 1 else 0.0
            pts.append(complex(x, y))
    return pts


def _polar_faces(n: int):
    """1-based triangle indices for the polar grid of _grid_points."""
    faces = []
    ring = lambda k, j: 2 + (k - 1) * n + (j % n)
    for j in range(n):
        faces.append((1, ring(1, j), ring(1, j + 1)))
    for k in range(1, n):
        for j in range(n):
            a, b = ring(k, j), ring(k, j + 1)
            c, d = ring(k + 1, j), ring(k + 1, j + 1)
            faces.append((a, b, d))
            faces.append((a, d, c))
    return faces


def _cartesian_faces(n: int):
    faces = []
    at = lambda a, b: 1 + b * n + a
    for b in range(n - 1):
        for a in range(n - 1):
            p, q = at(a, b), at(a + 1, b)
            r, s = at(a, b + 1), at(a + 1, b + 1)
            faces.append((p, q, s))
            faces.append((p, s, r))
    return faces


def _build_pair(doc, lam):
    pot = doc.normalized()
    hf = integrate_frame(to_nilpotent(pot))
    last = None
    for probe in (0.11 + 0.07j, 0.23 - 0.19j, -0.37 + 0.29j, 0.53 + 0.41j):
        try:
            frame = assemble_frame(hf, solve_iwasawa_float(hf, probe))
            return extract_pair(frame, lam), hf
        except WillmoreError as e:
            last = e
    raise last


def _evaluate_vertex(pair, metric_y, metric_yhat, z):
    """One CSV row worth of values, or None-padded when singular."""
    try:
        Y, Yhat = pair.values(z)
        y = Y[1:] / Y[0]
        yhat = Yhat[1:] / Yhat[0]
        my = metric_y(z)
        myh = metric_yhat(z)
        return (list(Y), list(Yhat), list(y), list(yhat), my, myh, 0)
    except WillmoreError:
        width = 2 * pair.m + 2
        nan = float("nan")
        return ([nan] * width, [nan] * width,
                [nan] * (width - 1), [nan] * (width - 1), nan, nan, 1)


def _write_mesh_csv(path, pair, pts):
    m = pair.m
    metric_y = induced_metric(pair, "Y")
    metric_yhat = induced_metric(pair, "Yhat")
    d = 2 * m + 2
    cols = (["re_z", "im_z"]
            + ["Y%d" % k for k in range(d)]
            + ["Yhat%d" % k for k in range(d)]
            + ["y%d" % k for k in range(1, d)]
            + ["yhat%d" % k for k in range(1, d)]
            + ["yz_sq", "yhatz_sq", "singular"])
    work = lambda z: _evaluate_vertex(pair, metric_y, metric_yhat, z)
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, pts))
    else:
        rows = [work(z) for z in pts]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for z, (Y, Yhat, y, yhat, my, myh, flag) in zip(pts, rows):
            vals = [z.real, z.imag, *Y, *Yhat, *y, *yhat, my, myh]
            fh.write(",".join(repr(float(v)) for v in vals))
            fh.write(",%d\n" % flag)
    return rows


def _write_mesh_obj(path, pair, pts, rows, faces):
    """Lossy visualization export: stereographic S^4 -> R^4, drop the last
    coordinate.  Only the y surface is exported and only for m = 2."""
    if pair.m != 2:
        raise WillmoreError("OBJ export needs m = 2 (a surface in S^4)")
    ok = [False] * len(pts)
    with open(path, "w") as fh:
        fh.write("# y surface, stereographic projection of S^4 from (1,0,0,0,0)"
                 " to R^4, last coordinate dropped (lossy)\n")
        for k, (_, _, y, _, _, _, flag) in enumerate(rows):
            if flag or abs(1.0 - y[0]) < 1e-9:
                fh.write("v 0 0 0\n")
                continue
            denom = 1.0 - y[0]
            q = [float(y[1] / denom), float(y[2] / denom), float(y[3] / denom)]
            ok[k] = True
            fh.write("v %s %s %s\n" % (repr(q[0]), repr(q[1]), repr(q[2])))
        for f in faces:
            if all(ok[i - 1] for i in f):
                fh.write("f %d %d %d\n" % f)


def _proj_distance(u, v) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return float("inf")
    a = u / nu
    b = v / nv
    return float(min(np.abs(a - b).max(), np.abs(a + b).max()))


def _cmd_mesh_common(args, doc):
    lam = args.lam
    pair, hf = _build_pair(doc, lam)
    pts = _grid_points(args.grid, args.grid_n, args.radius)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "mesh.csv")
    rows = _write_mesh_csv(csv_path, pair, pts)
    print("wrote %s (%d vertices, %d singular)" % (
        csv_path, len(pts), sum(r[6] for r in rows)))
    return pair, hf, pts, rows, csv_path


def cmd_example(args) -> int:
    src = resources.files("willmore").joinpath("data/example%d.json" % args.id)
    with resources.as_file(src) as path:
        doc = load_potential(str(path))
    pair, hf, pts, rows, _ = _cmd_mesh_common(args, doc)
    ref = reference_lift_eval(args.id, args.lam)
    per_vertex = []
    worst = 0.0
    singular = 0
    for z, row in zip(pts, rows):
        if row[6]:
            singular += 1
            continue
        try:
            Yr, Yhr = ref(z)
        except WillmoreError:
            singular += 1
            continue
        dy = _proj_distance(np.array(row[0]), np.asarray(Yr))
        dyh = _proj_distance(np.array(row[1]), np.asarray(Yhr))
        per_vertex.append([z.real, z.imag, dy, dyh])
        worst = max(worst, dy, dyh)
    report = {
        "example": args.id,
        "lambda": [args.lam.real, args.lam.imag],
        "grid": {"type": args.grid, "n": args.grid_n, "radius": args.radius},
        "vertices": len(pts),
        "compared_vertices": len(per_vertex),
        "skipped_vertices": singular,
        "max_projective_distance": worst,
        "per_vertex": per_vertex,
    }
    rpt_path = os.path.join(args.out, "comparison.json")
    with open(rpt_path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print("wrote %s (max projective distance %.3e)" % (rpt_path, worst))
    return 0 if worst < 1e-9 else 1


def cmd_synth(args) -> int:
    doc = load_potential(args.potential)
    pair, hf, pts, rows, _ = _cmd_mesh_common(args, doc)
    if args.format == "obj":
        faces = (_polar_faces(args.grid_n) if args.grid == "polar"
                 else _cartesian_faces(args.grid_n))
        obj_path = os.path.join(args.out, "mesh.obj")
        _write_mesh_obj(obj_path, pair, pts, rows, faces)
        print("wrote %s" % obj_path)
    return 0


def cmd_verify(args) -> int:
    doc = load_potential(args.potential)
    plan = {"samples": args.samples, "radius": args.radius, "seed": args.seed}
    if args.tol is not None:
        plan["tol_algebraic"] = args.tol
    if args.tol_fd is not None:
        plan["tol_fd"] = args.tol_fd
    report = run_suite(doc, plan)
    text = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
        print("wrote %s" % args.report)
    else:
        sys.stdout.write(text)
    n_bad = sum(1 for c in report.checks if not c["passed"])
    print("verification %s (%d checks, %d failed)" % (
        "PASSED" if report.passed else "FAILED", len(report.checks), n_bad))
    return 0 if report.passed else 1


def _add_mesh_flags(p):
    p.add_argument("--lambda", dest="lam", type=_parse_lambda, default=1 + 0j,
                   help="family parameter on the unit circle (1, i, a+bi, cis:p/q)")
    p.add_argument("--grid-n", type=int, default=32,
                   help="rings and sectors (polar) or side length (cartesian)")
    p.add_argument("--radius", type=_radius, default=1.2,
                   help="disk radius, rational syntax accepted")
    p.add_argument("--grid", choices=("polar", "cartesian"), default="polar")
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="willmore",
        description="Synthesize totally isotropic Willmore spheres and their "
                    "adjoint transforms from loop-group potentials.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("example", help="run a shipped example end to end")
    pe.add_argument("--id", type=int, choices=(1, 2), required=True)
    _add_mesh_flags(pe)
    pe.set_defaults(fn=cmd_example)

    ps = sub.add_parser("synth", help="synthesize a mesh from a potential file")
    ps.add_argument("--potential", required=True)
    _add_mesh_flags(ps)
    ps.add_argument("--format", choices=("csv", "obj"), default="csv",
                    help="obj additionally writes a lossy R^3 projection (m=2)")
    ps.set_defaults(fn=cmd_synth)

    pv = sub.add_parser("verify", help="run the invariant suite on a potential")
    pv.add_argument("--potential", required=True)
    pv.add_argument("--samples", type=int, default=40)
    pv.add_argument("--radius", type=_radius, default=0.9)
    pv.add_argument("--seed", type=int, default=7)
    pv.add_argument("--tol", type=float, default=None,
                    help="override the algebraic tolerance")
    pv.add_argument("--tol-fd", type=float, default=None,
                    help="override the finite-difference tolerance")
    pv.add_argument("--report", default=None, help="write the JSON report here")
    pv.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except PotentialFormatError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except WillmoreError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
