"""Radial autocorrelation, distance sets, and uniformity diagnostics.

Pair distances are binned on exact squared-radius keys: point
coordinates stay integers in the inflation frame, so a fixed-frame
squared distance is an integer divided by 5^level and reduces to a
canonical RadiusKey without rounding.  Floating point enters only in
the final density normalisation by pi R^2.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable

import numpy as np
from scipy.spatial import cKDTree

from .exact import RadiusKey


class WindowExceedsPatch(Exception):
    pass


@dataclass
class RadialHistogram:
    """Ordered-pair distance counts with per-key density estimates.

    ``entries`` maps RadiusKey -> (pair_count, eta_estimate) where
    pair_count counts ordered pairs (each unordered pair twice) and the
    r=0 bucket holds the number of window points.  eta_estimate divides
    by the window area pi R^2 (or the patch area in all-pairs mode).
    """

    level: int
    window_radius: float | None
    normalisation_area: float
    entries: dict[RadiusKey, tuple[int, float]]

    def eta(self, key: RadiusKey) -> float | None:
        got = self.entries.get(key)
        return got[1] if got else None

    def keys_sorted(self) -> list[RadiusKey]:
        return sorted(self.entries, key=lambda k: k.as_fraction())

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p2q2", "ell", "pair_count", "eta_estimate"])
        for key in self.keys_sorted():
            count, eta = self.entries[key]
            writer.writerow([key.p2q2, key.ell, count, repr(eta)])


def radial_autocorrelation(
    points: np.ndarray,
    level: int,
    window_radius: float | None,
    r2_max: Fraction | RadiusKey,
    origin_clearance: float | None = None,
    workers: int = 1,
) -> RadialHistogram:
    """Histogram of exact pair distances among control points.

    ``points`` are integer inflation-frame coordinates of a level-n
    patch.  With a window, both pair endpoints must lie in the centred
    fixed-frame ball of the given radius (the plain finite-volume
    estimator, whose O(r/R) boundary bias is documented rather than
    corrected); ``window_radius=None`` switches to all-pairs mode
    normalised by the fixed-frame patch area 5^level, used for
    diffraction weights where the distance cutoff exceeds the inscribed
    window.
    """
    if isinstance(r2_max, RadiusKey):
        r2_max = r2_max.as_fraction()
    scale = 5**level
    pts = np.asarray(points, dtype=np.int64)

    if window_radius is not None:
        if origin_clearance is not None and window_radius > origin_clearance * (1 + 1e-12):
            raise WindowExceedsPatch(
                f"window {window_radius} exceeds patch clearance {origin_clearance}"
            )
        w2 = Fraction(window_radius) ** 2 * scale
        norms = pts[:, 0].astype(object) ** 2 + pts[:, 1].astype(object) ** 2
        keep = np.array([n * w2.denominator <= w2.numerator for n in norms])
        pts = pts[keep]
        area = math.pi * window_radius**2
    else:
        area = float(scale)

    n_pts = pts.shape[0]
    entries: dict[RadiusKey, tuple[int, float]] = {
        RadiusKey(0, 0): (n_pts, n_pts / area)
    }
    if n_pts == 0:
        return RadialHistogram(level, window_radius, area, entries)

    d2_cut = r2_max * scale  # exact expanded squared-distance cutoff
    radius = math.sqrt(float(d2_cut)) * (1 + 1e-9)
    tree = cKDTree(pts.astype(np.float64))
    pairs = tree.query_pairs(radius, output_type="ndarray")
    if pairs.size:
        delta = pts[pairs[:, 0]] - pts[pairs[:, 1]]
        d2 = delta[:, 0] ** 2 + delta[:, 1] ** 2
        exact_keep = d2 * d2_cut.denominator <= d2_cut.numerator
        d2 = d2[exact_keep]
        values, counts = np.unique(d2, return_counts=True)
        for v, c in zip(values.tolist(), counts.tolist()):
            key = RadiusKey.make(int(v), level)
            prev = entries.get(key, (0, 0.0))[0]
            total = prev + 2 * int(c)  # ordered pairs
            entries[key] = (total, total / area)
    return RadialHistogram(level, window_radius, area, entries)


def distance_set(
    points: np.ndarray, level: int, r2_max: Fraction | RadiusKey
) -> list[RadiusKey]:
    """Sorted keys with positive pair counts (all-pairs mode)."""
    hist = radial_autocorrelation(points, level, None, r2_max)
    return hist.keys_sorted()


# Exact radial autocorrelation values for small squared radii; entries
# flagged conjectural are reported alongside estimates but never asserted.
ETA_REFERENCE: tuple[tuple[RadiusKey, Fraction, bool], ...] = (
    (RadiusKey(0, 0), Fraction(1), True),
    (RadiusKey(1, 1), Fraction(5, 11), True),
    (RadiusKey(1, 0), Fraction(439, 165), True),
    (RadiusKey(8, 1), Fraction(1, 2), True),
    (RadiusKey(9, 1), Fraction(67, 165), True),
    (RadiusKey(49, 2), Fraction(4, 165), True),
    (RadiusKey(2, 0), Fraction(7, 2), False),
    (RadiusKey(13, 1), Fraction(142, 165), True),
    (RadiusKey(81, 2), Fraction(4, 165), True),
    (RadiusKey(17, 1), Fraction(10, 11), False),
    (RadiusKey(4, 0), Fraction(3), False),
    (RadiusKey(113, 2), Fraction(8, 165), False),
    (RadiusKey(5, 0), Fraction(73, 15), False),
)


def eta_reference_exact() -> dict[RadiusKey, Fraction]:
    return {k: v for k, v, exact in ETA_REFERENCE if exact}


def compare_to_reference(hist: RadialHistogram) -> list[dict]:
    """Estimate-versus-table rows for every reference radius."""
    rows = []
    for key, value, exact in ETA_REFERENCE:
        est = hist.eta(key)
        rel = None if est is None else abs(est - float(value)) / float(value)
        rows.append(
            {
                "p2q2": key.p2q2,
                "ell": key.ell,
                "r_squared": str(key.as_fraction()),
                "eta_exact": str(value),
                "conjectural": not exact,
                "eta_estimate": est,
                "rel_error": rel,
            }
        )
    return rows


def frequency_module_check(
    freqs: Iterable[Fraction], generator: int = 264, max_ell: int = 24
) -> list[dict]:
    """Minimal ell with freq * generator * 5^ell integral, or a violation flag."""
    out = []
    for q in freqs:
        q = Fraction(q)
        den = q.denominator
        v5 = 0
        rest = den
        while rest % 5 == 0:
            rest //= 5
            v5 += 1
        ok = generator % rest == 0 and v5 <= max_ell
        out.append(
            {
                "frequency": str(q),
                "ell": v5 if ok else None,
                "violation": not ok,
            }
        )
    return out


@dataclass
class UniformityReport:
    angle: float
    window: float
    bins: int
    lattice_points: int
    pair_multiplier: int
    max_relative_deviation: float
    coincidence_warning: bool

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=1)


def _near_coincidence(angle: float, tol: float = 1e-9) -> bool:
    """Proximity of the rotation angle to small-index coincidence rotations."""
    base = 2.0 * math.atan(0.5)
    quarter = math.pi / 2.0
    for k in range(-6, 7):
        for j in range(-4, 5):
            if abs(angle - (k * base + j * quarter)) < tol:
                return True
    return False


def cross_correlation_uniformity(
    angle: float, window_radius: float, bins: int = 8
) -> UniformityReport:
    """Distribution of (x - y mod 1) over pair differences in a window.

    For x in Z^2 and y in the rotated lattice, x - y mod 1 equals -y
    mod 1, so the pair histogram is the single-lattice histogram times
    the number of x points; the relative deviation from uniformity is
    identical and is what the report carries.
    """
    r = window_radius
    n = int(math.floor(r)) + 1
    ii, jj = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    inside = ii * ii + jj * jj <= r * r
    ii, jj = ii[inside], jj[inside]
    lattice_count = ii.size

    c, s = math.cos(angle), math.sin(angle)
    yx = c * ii - s * jj
    yy = s * ii + c * jj
    fx = (-yx) % 1.0
    fy = (-yy) % 1.0
    bx = np.minimum((fx * bins).astype(np.int64), bins - 1)
    by = np.minimum((fy * bins).astype(np.int64), bins - 1)
    counts = np.zeros((bins, bins), dtype=np.int64)
    np.add.at(counts, (bx, by), 1)
    mean = counts.mean()
    max_dev = float(np.abs(counts - mean).max() / mean) if mean > 0 else float("inf")
    return UniformityReport(
        angle,
        window_radius,
        bins,
        int(lattice_count),
        int(lattice_count),
        max_dev,
        _near_coincidence(angle),
    )
