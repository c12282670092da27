"""Command-line entry point.

Exit status: 0 when every requested check passes, 2 when a check fails,
1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import examples_nd as X
from . import hulloid2d, render
from .errors import RBodyError, ResourceLimit, WindowTooSmall
from .grid import lattice, ops
from .grid import shapes as S
from .report import VerificationReport

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

SUITES = ("simplex", "disc2d", "disc2d_simply_connected", "disc_nd", "simplex_hulloid",
          "nonclosure", "k2gap", "qr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def atomic_write(path: str | os.PathLike, data: bytes | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def load_points(path: str) -> np.ndarray:
    data = _load_json(path)
    if not isinstance(data, dict) or "points" not in data:
        raise UsageError(f'{path}: expected {{"dim": 2, "points": [[x, y], ...]}}')
    pts = np.asarray(data["points"], dtype=float)
    dim = data.get("dim", pts.shape[-1] if pts.ndim == 2 else None)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise UsageError(f"{path}: points must be a list of {dim}-vectors")
    return pts


def _emit_report(rep: VerificationReport, out: str | None, fmt: str) -> None:
    if fmt == "json":
        text = rep.dumps()
    else:
        text = rep.to_csv("\t" if fmt == "tsv" else ",")
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _positive(name: str, value: float | None) -> None:
    if value is not None and not value > 0:
        raise UsageError(f"--{name} must be positive")


# --- verbs ---------------------------------------------------------------------

def cmd_hulloid2d(args) -> int:
    _positive("radius", args.radius)
    pts = load_points(args.points)
    if pts.shape[1] != 2:
        raise UsageError("hulloid2d works on planar points")
    if pts.shape[0] == 3:
        H = hulloid2d.triple_hulloid(pts, args.radius)
        rep = VerificationReport("triple hulloid", metadata={"hulloid": H.to_json()})
        rep.add("kind", H.kind.value, None, True, "triple hulloids are V or V with a curvilinear triangle")
        if args.out:
            atomic_write(args.out, render.render_svg_bytes(render.hulloid_scene(H)))
    else:
        tol = args.tol if args.tol is not None else 1e-3 * args.radius
        rep = hulloid2d.qr_check(pts, args.radius, tol)
        if args.out:
            atomic_write(args.out, render.render_svg_bytes(render.Scene(points=[pts])))
    _emit_report(rep, args.report, args.format)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_gridhulloid(args) -> int:
    _positive("radius", args.radius)
    _positive("spacing", args.spacing)
    try:
        shape = S.from_json(_load_json(args.shape))
    except RBodyError as exc:
        raise UsageError(f"{args.shape}: {exc}") from None
    if args.window:
        lo, hi = np.split(np.asarray(args.window, dtype=float), 2)
        E = lattice.rasterize(shape, (lo, hi), args.spacing)
    else:
        E = lattice.rasterize_for_hulloid(shape, args.radius, args.spacing)
    outside = args.outside
    hull = ops.hulloid_grid(E, args.radius, outside=outside)
    n_face, _ = ops.components(hull)
    n_clu, _ = ops.clusters(hull)
    verdict = ops.is_r_body(E, args.radius, outside=outside, hull=hull)
    rep = VerificationReport("grid hulloid", metadata={
        "radius": args.radius, "spacing": args.spacing, "extents": list(E.extents),
        "origin": E.origin, "whole_space": hull.whole_space})
    rep.add("occupied cells (body, hulloid)", [E.count, hull.count], None, True, "")
    rep.add("diameter (body, hulloid)", [ops.diameter(E), ops.diameter(hull)], None, True,
            "the hulloid has the diameter of the body")
    rep.add("components of the hulloid (face-adjacent, merged within 2h*sqrt(d))",
            [n_face, n_clu], None, True, "")
    rep.add("body is an R-body", verdict.distance, 2 * E.spacing * np.sqrt(E.dim),
            True, "an R-body equals its hulloid", is_r_body=verdict.is_body, witness=verdict.witness)
    if args.out:
        atomic_write(args.out, lattice.dumps(hull))
    if args.svg:
        scene = render.grid_scene(hull, E.sites, overlay=E)
        atomic_write(args.svg, render.render_svg_bytes(scene))
    _emit_report(rep, args.report, args.format)
    return EXIT_OK


def cmd_hausdorff(args) -> int:
    grids = []
    for p in (args.a, args.b):
        try:
            with open(p, "rb") as fh:
                grids.append(lattice.load(fh))
        except OSError as exc:
            raise UsageError(f"{p}: {exc.strerror}") from None
    d = ops.hausdorff(*grids)
    sys.stdout.write(json.dumps({"hausdorff": d}) + "\n")
    return EXIT_OK


def _suite_reports(args) -> list[VerificationReport]:
    R = args.radius
    suite = args.suite
    if suite == "simplex":
        dim = args.dim or 3
        cfg = X.regular_simplex(dim, 2 * R / dim)
        delta = args.delta if args.delta is not None else (1e-3 if dim < 4 else 1e-2)
        return [X.simplex_identities_check(cfg, args.samples, args.seed),
                X.origin_membership_check(cfg, args.samples, delta, args.seed)]
    if suite == "nonclosure":
        reps = [X.nonclosure_sequence(n, None, R, args.spacing)[2] for n in range(3)]
        reps.append(X.limit_check(R, args.spacing))
        reps.append(X.run_r_eps_check(X.regular_simplex(3, 2 * R / 3).W, R, [R / 10, R / 3],
                                      args.spacing))
        return reps
    if suite == "qr":
        pts = load_points(args.points) if args.points else None
        if pts is None:
            raise UsageError("--suite qr needs --points")
        return [hulloid2d.qr_check(pts, R, args.tol or 1e-3 * R)]
    params = {}
    if suite in ("disc_nd", "simplex_hulloid") and args.dim:
        params["d"] = args.dim
    spec = X.build_example(suite, R, **params)
    return [X.certify(spec, args.spacing)]


def cmd_verify(args) -> int:
    _positive("radius", args.radius)
    _positive("spacing", args.spacing)
    reps = _suite_reports(args)
    combined = VerificationReport(f"suite {args.suite}", metadata={
        "suite": args.suite, "radius": args.radius, "seed": args.seed})
    for r in reps:
        combined.extend(r, prefix=f"{r.title} / ")
    _emit_report(combined, args.out, args.format)
    if args.figures and args.suite in ("disc2d", "disc2d_simply_connected"):
        spec = X.build_example(args.suite, args.radius)
        h = args.spacing or X.default_spacing(2, args.radius)
        E = lattice.rasterize_for_hulloid(spec.shape, args.radius, h)
        hull = ops.hulloid_grid(E, args.radius)
        fig = Path(args.figures) / f"{args.suite}.svg"
        atomic_write(fig, render.render_svg_bytes(
            render.grid_scene(hull, title=args.suite, overlay=E)))
    return EXIT_OK if combined.passed else EXIT_FAIL


def cmd_render(args) -> int:
    if args.example:
        spec = X.build_example(args.example, args.radius or 1.0)
        if spec.shape.dim != 2:
            raise UsageError("only planar examples can be rendered")
        R = spec.params["R"]
        h = args.spacing or X.default_spacing(2, R)
        E = lattice.rasterize_for_hulloid(spec.shape, R, h)
        scene = render.grid_scene(ops.hulloid_grid(E, R), title=args.example, overlay=E)
    elif args.points:
        pts = load_points(args.points)
        if args.radius and pts.shape[0] == 3:
            scene = render.hulloid_scene(hulloid2d.triple_hulloid(pts, args.radius))
        else:
            scene = render.Scene(points=[pts])
    elif args.grid:
        with open(args.grid, "rb") as fh:
            scene = render.grid_scene(lattice.load(fh))
    else:
        scene = render.Scene()
    atomic_write(args.out, render.render_svg_bytes(scene))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .grid.edt import squared_edt
    rng = np.random.default_rng(args.seed)
    out = {}
    for shape in ([args.size, args.size], [args.size3] * 3):
        occ = rng.random(shape) < 0.001
        squared_edt(occ[:8, :8] if occ.ndim == 2 else occ[:8, :8, :8])  # compile
        t = time.perf_counter()
        squared_edt(occ)
        out["x".join(map(str, shape))] = time.perf_counter() - t
    sys.stdout.write(json.dumps({"edt_seconds": out}, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rbody", description="R-hulloids of planar triples and lattice bodies.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=("json", "csv", "tsv"), default="json")

    s = sub.add_parser("hulloid2d", help="exact hulloid of a point triple (or triple test of a set)")
    s.add_argument("--points", required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--tol", type=float)
    s.add_argument("--out", help="SVG figure")
    s.add_argument("--report", help="report file (stdout if omitted)")
    fmt(s)
    s.set_defaults(func=cmd_hulloid2d)

    s = sub.add_parser("gridhulloid", help="lattice hulloid of a shape expression")
    s.add_argument("--shape", required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--spacing", type=float, required=True)
    s.add_argument("--window", type=float, nargs="+", help="lo... hi... (default: inflated bbox)")
    s.add_argument("--outside", choices=ops.OUTSIDE_MODES, default="empty")
    s.add_argument("--out", help="binary grid dump of the hulloid")
    s.add_argument("--svg", help="SVG figure (2D only)")
    s.add_argument("--report")
    fmt(s)
    s.set_defaults(func=cmd_gridhulloid)

    s = sub.add_parser("hausdorff", help="Hausdorff distance of two grid dumps")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_hausdorff)

    s = sub.add_parser("verify", help="run a named certification suite")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--dim", type=int)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--spacing", type=float)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--delta", type=float)
    s.add_argument("--seed", type=int, default=X.DEFAULT_SEED)
    s.add_argument("--points")
    s.add_argument("--tol", type=float)
    s.add_argument("--out", help="report file (stdout if omitted)")
    s.add_argument("--figures", help="directory for SVG figures of planar suites")
    fmt(s)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("render", help="draw a planar scene as SVG")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--example", choices=("disc2d", "disc2d_simply_connected", "k2gap"))
    g.add_argument("--points")
    g.add_argument("--grid")
    s.add_argument("--radius", type=float)
    s.add_argument("--spacing", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("bench", help="time the distance transform")
    s.add_argument("--size", type=int, default=1000)
    s.add_argument("--size3", type=int, default=128)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"rbody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WindowTooSmall, ResourceLimit) as exc:
        print(f"rbody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RBodyError as exc:
        print(f"rbody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
