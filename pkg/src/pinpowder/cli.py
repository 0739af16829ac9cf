"""Command-line surface: reproducible CSV/JSON/SVG runs plus PNG report figures.

Every subcommand writes deterministic artifacts (identical configs give
byte-identical files; timings go to stderr only) and exits 0 on
success, 2 on bad arguments, 3 on an internal assertion such as a
failed dissection search.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import diffraction, plotting, radial, shelling, substitution
from .exact import RadiusKey


def _fraction(text: str) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected NUM or NUM/DEN, got {text!r}") from exc


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _emit(text_or_writer, out_path: str | None) -> None:
    fh, close = _open_out(out_path)
    try:
        if callable(text_or_writer):
            text_or_writer(fh)
        else:
            fh.write(text_or_writer)
    finally:
        if close:
            fh.close()


def _summary(msg: str, t0: float) -> None:
    print(f"{msg} ({time.monotonic() - t0:.2f}s)", file=sys.stderr)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--plot", default=None, metavar="PNG", help="also render a PNG figure")
    p.add_argument("--threads", type=int, default=0, help="0 = auto (passed to vectorised kernels where supported)")


def cmd_shell(args) -> int:
    t0 = time.monotonic()
    table = shelling.enumerate_shells(int(args.r2_max))
    _emit(table.write_csv, args.out)
    if args.plot:
        samples = [(math.sqrt(r2), c) for r2, c in table.entries if r2 > 0]
        plotting.save_stem_png(args.plot, samples, "square-lattice shell counts", "r", "count")
    _summary(f"shell: {len(table.entries)} shells up to r^2={args.r2_max}", t0)
    return 0


def cmd_csl(args) -> int:
    t0 = time.monotonic()
    rot = shelling.GaussianRotation(args.a, args.b)
    idx = shelling.csl_index(rot)
    _emit(json.dumps({"a": args.a, "b": args.b, "norm": rot.norm, "csl_index": idx}, indent=1) + "\n", args.out)
    _summary(f"csl: index {idx}", t0)
    return 0


def cmd_generate(args) -> int:
    t0 = time.monotonic()
    patch = substitution.generate_patch(args.level, args.seed)
    if args.merge:
        kd = substitution.merge_to_kite_domino(patch)
        polys = plotting.kd_polygons(kd)
        if args.format == "json":
            counts = kd.counts()
            payload = {
                "level": kd.level,
                "kites": counts["K"],
                "dominoes": counts["D"],
                "remainder": int(len(kd.remainder)),
            }
            _emit(json.dumps(payload, indent=1) + "\n", args.out)
        else:
            _emit(lambda fh: plotting.write_polygons_svg(fh, polys, f"kite-domino patch level {patch.level}"), args.out)
        if args.plot:
            plotting.save_polygons_png(args.plot, polys, f"kite-domino patch, level {patch.level}")
        _summary(f"generate: level {patch.level}, {len(kd)} merged tiles, {len(kd.remainder)} boundary triangles", t0)
        return 0
    if args.format == "json":
        _emit(patch.to_json() + "\n", args.out)
    else:
        _emit(lambda fh: plotting.write_polygons_svg(fh, plotting.patch_polygons(patch), f"patch level {patch.level}"), args.out)
    if args.plot:
        plotting.save_polygons_png(args.plot, plotting.patch_polygons(patch), f"triangle patch, level {patch.level}")
    _summary(f"generate: level {patch.level}, {len(patch)} tiles", t0)
    return 0


def cmd_points(args) -> int:
    t0 = time.monotonic()
    patch = substitution.generate_patch(args.level, args.seed)
    pts = patch.control_points()
    lines = ["x,y"]
    if args.frame == "fixed":
        num, den = patch.fixed_frame_numerators()
        for i in range(len(patch)):
            fx = Fraction(int(num[i, 0]), den)
            fy = Fraction(int(num[i, 1]), den)
            lines.append(f"{fx.numerator}/{fx.denominator},{fy.numerator}/{fy.denominator}")
    else:
        for x, y in pts.tolist():
            lines.append(f"{x},{y}")
    _emit("\n".join(lines) + "\n", args.out)
    _summary(f"points: {len(patch)} control points ({args.frame} frame)", t0)
    return 0


def cmd_autocorr(args) -> int:
    t0 = time.monotonic()
    patch = substitution.generate_patch(args.level, "T")
    clearance = patch.origin_clearance_fixed()
    window = None if args.window_frac <= 0 else args.window_frac * clearance
    hist = radial.radial_autocorrelation(
        patch.control_points(), patch.level, window, args.r2_max, clearance,
        workers=args.threads or 1,
    )
    if args.format == "json":
        rows = radial.compare_to_reference(hist)
        _emit(json.dumps({"level": patch.level, "window": window, "reference": rows}, indent=1) + "\n", args.out)
    else:
        _emit(hist.write_csv, args.out)
    n_pairs = sum(c for c, _ in hist.entries.values())
    _summary(f"autocorr: level {patch.level}, {len(hist.entries)} radii, {n_pairs} ordered pairs", t0)
    return 0


def cmd_diffract(args) -> int:
    t0 = time.monotonic()
    grid = np.linspace(0.0, args.k_max, args.samples + 1)
    if args.source == "square":
        weights = diffraction.square_lattice_weights(int(args.r2_max))
        curve = diffraction.bessel_sum_curve(weights, grid, not args.keep_central, "square")
        label = f"square lattice, r^2 <= {args.r2_max}"
    else:
        patch = substitution.generate_patch(args.level, "T")
        hist = radial.radial_autocorrelation(patch.control_points(), patch.level, None, args.r2_max)
        weights = {k: v[1] for k, v in hist.entries.items()}
        curve = diffraction.bessel_sum_curve(weights, grid, not args.keep_central, "pinwheel", patch.level)
        label = f"pinwheel level {args.level}, r^2 <= {args.r2_max}"
    if args.format == "svg":
        _emit(lambda fh: plotting.write_curve_svg(fh, [(label, curve)], "radial intensity"), args.out)
    else:
        _emit(curve.write_csv, args.out)
    if args.plot:
        plotting.save_curves_png(args.plot, [(label, curve)], "radial intensity")
    _summary(f"diffract: {args.source}, {len(curve.samples)} samples", t0)
    return 0


def cmd_powder(args) -> int:
    t0 = time.monotonic()
    curve = diffraction.powder_curve_exact(int(args.r2_max))
    if args.format == "svg":
        _emit(lambda fh: plotting.write_curve_svg(fh, [("ring profile", curve)], "powder ring intensities", "r"), args.out)
    else:
        _emit(curve.write_csv, args.out)
    if args.plot:
        plotting.save_stem_png(args.plot, curve.samples, "powder ring intensities", "r", "intensity")
    _summary(f"powder: {len(curve.samples)} rings", t0)
    return 0


def cmd_psf_check(args) -> int:
    t0 = time.monotonic()
    reports = [diffraction.psf_gaussian_check(float(t)) for t in args.t]
    payload = [r.__dict__ for r in reports]
    _emit(json.dumps(payload if len(payload) > 1 else payload[0], indent=1) + "\n", args.out)
    worst = max(r.defect for r in reports)
    _summary(f"psf-check: worst defect {worst:.3e}", t0)
    return 0


def cmd_radial_transform(args) -> int:
    t0 = time.monotonic()
    grid = np.linspace(0.0, args.k_max, args.samples + 1)
    curves = []
    for d in args.d:
        samples = [(float(k), diffraction.radial_transform_mu(d, args.r, float(k))) for k in grid]
        curves.append((f"d={d}", diffraction.RadialCurve(samples, f"mu_r-transform-d{d}")))
    if args.format == "svg":
        _emit(lambda fh: plotting.write_curve_svg(fh, curves, f"sphere-measure transform, r={args.r}"), args.out)
    else:
        _emit(curves[0][1].write_csv, args.out)
    if args.plot:
        plotting.save_curves_png(args.plot, curves, f"sphere-measure transform, r={args.r}", ylabel="value")
    _summary(f"radial-transform: d={args.d}", t0)
    return 0


def cmd_vertex_stars(args) -> int:
    t0 = time.monotonic()
    patch = substitution.generate_patch(args.level, "T")
    stars = substitution.vertex_stars(patch)
    if args.format == "svg":
        _emit(lambda fh: plotting.write_vertex_stars_svg(fh, patch, stars), args.out)
    else:
        fits = radial.frequency_module_check([Fraction(c.count, 5**patch.level) for c in stars])
        payload = {
            "level": patch.level,
            "classes": len(stars),
            "stars": [
                {
                    "count": c.count,
                    "frequency": c.frequency,
                    "module_ell": fits[i]["ell"],
                }
                for i, c in enumerate(stars)
            ],
        }
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    _summary(f"vertex-stars: {len(stars)} classes at level {patch.level}", t0)
    return 0


def cmd_uniformity(args) -> int:
    t0 = time.monotonic()
    rep = radial.cross_correlation_uniformity(args.angle, args.window, args.bins)
    _emit(rep.to_json() + "\n", args.out)
    _summary(f"uniformity: max deviation {rep.max_relative_deviation:.4f}", t0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinpowder",
        description="Pinwheel tilings, square-lattice shelling, and radial diffraction curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shell", help="circular shell counts of the square lattice (CSV r_squared,count)")
    p.add_argument("--r2-max", type=_fraction, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_shell)

    p = sub.add_parser("csl", help="index of the intersection with a coincidence-rotated copy of Z^2")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_csl)

    p = sub.add_parser("generate", help="substitution patch as JSON or SVG")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--seed", choices=["T", "K", "D"], default="T")
    p.add_argument("--format", choices=["json", "svg"], default="json")
    p.add_argument("--merge", action="store_true", help="merge triangle pairs into kites and dominoes")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("points", help="control points of a patch (CSV)")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--seed", choices=["T", "K", "D"], default="T")
    p.add_argument("--frame", choices=["inflation", "fixed"], default="inflation")
    _add_common(p)
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("autocorr", help="radial pair-distance histogram (CSV p2q2,ell,pair_count,eta_estimate)")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--r2-max", type=_fraction, default=Fraction(5))
    p.add_argument("--window-frac", type=float, default=0.8, help="<=0 switches to all-pairs mode")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("diffract", help="Bessel-sum radial intensity curve (CSV k,intensity)")
    p.add_argument("--source", choices=["square", "pinwheel"], default="pinwheel")
    p.add_argument("--level", type=int, default=5)
    p.add_argument("--r2-max", type=_fraction, default=Fraction(625))
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--samples", type=int, default=1200)
    p.add_argument("--keep-central", action="store_true")
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_diffract)

    p = sub.add_parser("powder", help="idealised ring intensity profile (CSV k,intensity)")
    p.add_argument("--r2-max", type=_fraction, required=True)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_powder)

    p = sub.add_parser("psf-check", help="radial lattice-sum identity on Gaussians (JSON report)")
    p.add_argument("--t", type=_fraction, action="append", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_psf_check)

    p = sub.add_parser("radial-transform", help="transform of the uniform sphere measure (CSV k,intensity)")
    p.add_argument("--d", type=int, action="append", required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--samples", type=int, default=600)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_radial_transform)

    p = sub.add_parser("vertex-stars", help="congruence classes of full vertex configurations (JSON or SVG)")
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--format", choices=["json", "svg"], default="json")
    _add_common(p)
    p.set_defaults(func=cmd_vertex_stars)

    p = sub.add_parser("uniformity", help="pair-difference uniformity for a rotated lattice pair (JSON)")
    p.add_argument("--angle", type=float, required=True)
    p.add_argument("--window", type=float, required=True)
    p.add_argument("--bins", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_uniformity)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        substitution.SubstitutionError,
        radial.WindowExceedsPatch,
        diffraction.OutOfRange,
        diffraction.TailTooLarge,
        shelling.NonPrimitiveRotation,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
