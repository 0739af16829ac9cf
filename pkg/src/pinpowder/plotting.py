"""SVG and PNG emitters for patches, vertex stars, and radial curves.

SVG output is self-contained (no external assets) on a fixed 960x540
viewBox.  PNG figures are rendered with the matplotlib Agg backend so
the report path works headless; data files never carry timestamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

VIEW_W, VIEW_H = 960, 540
_MARGIN = 50

_FILL = {
    "T_plus": "#7fa8d0",
    "T_minus": "#dbe7f2",
    "K": "#e4b363",
    "D": "#9fc49b",
}


def _svg_header(title: str) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}">\n'
        f"<title>{title}</title>\n"
        f'<rect width="{VIEW_W}" height="{VIEW_H}" fill="white"/>\n'
    )


def _fit_transform(points: np.ndarray) -> tuple[float, float, float]:
    """Scale and offsets mapping data points into the margined viewBox."""
    xmin, ymin = points.min(axis=0)
    xmax, ymax = points.max(axis=0)
    spanx = max(xmax - xmin, 1e-12)
    spany = max(ymax - ymin, 1e-12)
    scale = min((VIEW_W - 2 * _MARGIN) / spanx, (VIEW_H - 2 * _MARGIN) / spany)
    ox = _MARGIN + ((VIEW_W - 2 * _MARGIN) - spanx * scale) / 2 - xmin * scale
    oy = VIEW_H - _MARGIN - ((VIEW_H - 2 * _MARGIN) - spany * scale) / 2 + ymin * scale
    return scale, ox, oy


def write_polygons_svg(
    fh: IO[str],
    polygons: Sequence[tuple[str, np.ndarray]],
    title: str,
) -> None:
    """Polygons given as (fill-key, (m,2) float vertices), y axis upward."""
    allpts = np.concatenate([p for _, p in polygons])
    scale, ox, oy = _fit_transform(allpts)
    fh.write(_svg_header(title))
    for key, poly in polygons:
        pts = " ".join(
            f"{ox + scale * x:.2f},{oy - scale * y:.2f}" for x, y in poly
        )
        fill = _FILL.get(key, "#cccccc")
        fh.write(
            f'<polygon points="{pts}" fill="{fill}" stroke="#333333" stroke-width="0.4"/>\n'
        )
    fh.write("</svg>\n")


def patch_polygons(patch) -> list[tuple[str, np.ndarray]]:
    verts = patch.vertices_doubled().astype(np.float64) / 2.0
    ids = patch.tile_ids()
    return [(ids[i], verts[i]) for i in range(len(patch))]


def kd_polygons(kd) -> list[tuple[str, np.ndarray]]:
    from .substitution import DOMINO_VERTICES, KITE_VERTICES

    ref = {
        "K": np.array([[float(x), float(y)] for x, y in KITE_VERTICES]),
        "D": np.array([[float(x), float(y)] for x, y in DOMINO_VERTICES]),
    }
    out = []
    for i, kind in enumerate(kd.kinds):
        n = kd.linear[i].astype(np.float64)
        t = kd.trans[i].astype(np.float64)
        base = ref[kind]
        poly = np.empty_like(base)
        poly[:, 0] = n[0] * base[:, 0] + n[1] * base[:, 1] + t[0]
        poly[:, 1] = n[2] * base[:, 0] + n[3] * base[:, 1] + t[1]
        out.append((kind, poly))
    return out


def star_polygons(patch, star) -> list[tuple[str, np.ndarray]]:
    verts = patch.vertices_doubled().astype(np.float64) / 2.0
    ids = patch.tile_ids()
    vx, vy = star.representative_vertex
    out = []
    for i in star.representative_tiles:
        poly = verts[i] - np.array([vx / 2.0, vy / 2.0])
        out.append((ids[i], poly))
    return out


def write_vertex_stars_svg(fh: IO[str], patch, stars) -> None:
    """All star classes side by side in a grid, centred on their vertices."""
    cols = 4
    rows = math.ceil(len(stars) / cols)
    cell_w = VIEW_W / cols
    cell_h = (VIEW_H - 20) / rows
    fh.write(_svg_header("vertex stars"))
    radius = math.sqrt(5.0**patch.level) * 2.4
    scale = min(cell_w, cell_h) / (2.2 * radius)
    for idx, star in enumerate(stars):
        cx = (idx % cols + 0.5) * cell_w
        cy = (idx // cols + 0.5) * cell_h + 10
        for key, poly in star_polygons(patch, star):
            pts = " ".join(
                f"{cx + scale * x:.2f},{cy - scale * y:.2f}" for x, y in poly
            )
            fh.write(
                f'<polygon points="{pts}" fill="{_FILL.get(key, "#ccc")}" '
                f'stroke="#333" stroke-width="0.4"/>\n'
            )
        fh.write(
            f'<text x="{cx:.1f}" y="{cy + cell_h / 2 - 6:.1f}" font-size="11" '
            f'text-anchor="middle" fill="#222">n={star.count}</text>\n'
        )
    fh.write("</svg>\n")


def write_curve_svg(fh: IO[str], curves, title: str, xlabel: str = "k") -> None:
    """Line plot of one or more (label, RadialCurve) pairs."""
    fh.write(_svg_header(title))
    xs = np.concatenate([c.k_values() for _, c in curves])
    ys = np.concatenate([c.values() for _, c in curves])
    pts = np.column_stack([xs, ys])
    scale_info = _fit_transform(pts)
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    sx = (VIEW_W - 2 * _MARGIN) / max(xmax - xmin, 1e-12)
    sy = (VIEW_H - 2 * _MARGIN) / max(ymax - ymin, 1e-12)

    def tx(x):
        return _MARGIN + (x - xmin) * sx

    def ty(y):
        return VIEW_H - _MARGIN - (y - ymin) * sy

    # axes
    fh.write(
        f'<line x1="{_MARGIN}" y1="{ty(0) if ymin <= 0 <= ymax else VIEW_H - _MARGIN}" '
        f'x2="{VIEW_W - _MARGIN}" y2="{ty(0) if ymin <= 0 <= ymax else VIEW_H - _MARGIN}" '
        f'stroke="#888" stroke-width="1"/>\n'
    )
    fh.write(
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" y2="{VIEW_H - _MARGIN}" '
        f'stroke="#888" stroke-width="1"/>\n'
    )
    n_ticks = 6
    for i in range(n_ticks + 1):
        x = xmin + (xmax - xmin) * i / n_ticks
        fh.write(
            f'<text x="{tx(x):.1f}" y="{VIEW_H - _MARGIN + 18}" font-size="11" '
            f'text-anchor="middle" fill="#222">{x:.2f}</text>\n'
        )
        y = ymin + (ymax - ymin) * i / n_ticks
        fh.write(
            f'<text x="{_MARGIN - 6}" y="{ty(y):.1f}" font-size="11" '
            f'text-anchor="end" fill="#222">{y:.3g}</text>\n'
        )
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    for ci, (label, curve) in enumerate(curves):
        path = " ".join(
            f"{tx(k):.2f},{ty(v):.2f}" for k, v in curve.samples
        )
        fh.write(
            f'<polyline points="{path}" fill="none" stroke="{colors[ci % 4]}" '
            f'stroke-width="1.2"/>\n'
        )
        fh.write(
            f'<text x="{VIEW_W - _MARGIN - 6}" y="{_MARGIN + 16 + 14 * ci}" font-size="12" '
            f'text-anchor="end" fill="{colors[ci % 4]}">{label}</text>\n'
        )
    fh.write(
        f'<text x="{VIEW_W / 2:.0f}" y="{VIEW_H - 12}" font-size="12" '
        f'text-anchor="middle" fill="#222">{xlabel}</text>\n'
    )
    fh.write(f'<text x="{VIEW_W / 2:.0f}" y="20" font-size="13" text-anchor="middle" fill="#222">{title}</text>\n')
    fh.write("</svg>\n")


# ---------------------------------------------------------------------------
# matplotlib report figures


def _mpl():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_curves_png(path: str, curves, title: str, xlabel: str = "k", ylabel: str = "intensity") -> None:
    plt = _mpl()
    fig, ax = plt.subplots(figsize=(9.6, 5.4))
    for label, curve in curves:
        ax.plot(curve.k_values(), curve.values(), lw=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(curves) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_stem_png(path: str, samples, title: str, xlabel: str = "r", ylabel: str = "intensity") -> None:
    plt = _mpl()
    fig, ax = plt.subplots(figsize=(9.6, 5.4))
    xs = [k for k, _ in samples]
    ys = [v for _, v in samples]
    ax.vlines(xs, 0, ys, lw=1.2)
    ax.plot(xs, ys, "o", ms=2.5)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_polygons_png(path: str, polygons, title: str) -> None:
    plt = _mpl()
    from matplotlib.patches import Polygon as MplPolygon

    fig, ax = plt.subplots(figsize=(9.6, 5.4))
    for key, poly in polygons:
        ax.add_patch(
            MplPolygon(poly, closed=True, facecolor=_FILL.get(key, "#ccc"), edgecolor="#333", lw=0.3)
        )
    allpts = np.concatenate([p for _, p in polygons])
    ax.set_xlim(allpts[:, 0].min() - 0.5, allpts[:, 0].max() + 0.5)
    ax.set_ylim(allpts[:, 1].min() - 0.5, allpts[:, 1].max() + 0.5)
    ax.set_aspect("equal")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
