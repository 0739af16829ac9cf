"""Pinwheel substitution, kite-domino merging, and patch statistics.

Geometry conventions
--------------------
The prototile is the right triangle T with vertices (-1/2,-1/2),
(1/2,-1/2), (-1/2,3/2) and control point (0,0).  Inflation by
M = [[2,1],[-1,2]] (scaling sqrt(5) combined with clockwise rotation by
arctan(1/2)) carries T to a triangle that dissects into five unit tiles,
one of them T itself.  The five child isometries are not transcribed
from any figure: ``derive_dissection`` finds them by exhaustive exact
search over quarter-grid placements and certifies the cover.

Patches are held in an integer *inflation frame*: the level-n patch is
the in-place subdivision of T scaled by 5^n, so every tile map is
p -> N p + t with an integer matrix N (N^T N = 5^n Id) and an integer
translation t, and every vertex is a half-integer.  Control points are
the translations themselves.  True (unit-tile) coordinates are recovered
at even levels by multiplying with (3-4i)^(n/2) / 5^n, which keeps all
denominators powers of five.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .exact import (
    CoverReport,
    ExactPoint,
    Isometry,
    Triangle,
    exact_cover_check,
)


class SubstitutionError(Exception):
    pass


class NoDissectionFound(SubstitutionError):
    pass


class MultipleDissectionsFound(SubstitutionError):
    pass


class AmbiguousPairing(SubstitutionError):
    pass


class InternalPairingIncomplete(SubstitutionError):
    pass


# reference triangle T (right angle, short-leg end, long-leg end)
REF_A = ExactPoint.of(Fraction(-1, 2), Fraction(-1, 2))
REF_B = ExactPoint.of(Fraction(1, 2), Fraction(-1, 2))
REF_C = ExactPoint.of(Fraction(-1, 2), Fraction(3, 2))
REF_TRIANGLE = Triangle(REF_A, REF_B, REF_C)

# doubled integer reference coordinates (used throughout the patch code)
REF_DOUBLED = np.array([[-1, -1], [1, -1], [-1, 3]], dtype=np.int64)

# inflation similarity M = sqrt(5) R_{-alpha} and its conjugate
M_LINEAR = (2, 1, -1, 2)
M_CONJ_LINEAR = (2, -1, 1, 2)
INFLATION = Isometry.make(M_LINEAR)  # inflation-frame declaration: scale_exp 0

# reflection of T across its hypotenuse (scale-2 linear part), fixing B and C;
# together with the half-turn about the hypotenuse midpoint these generate the
# kite and domino partners of a triangle.
HYP_REFLECTION_NUM = (-3, -4, -4, 3)  # divide by 5
HYP_REFLECTION_SHIFT = (2, 1)  # times 1/5
HALF_TURN_SHIFT = (0, 1)

KITE_CONTROL = ExactPoint.of(Fraction(2, 5), Fraction(1, 5))
DOMINO_CONTROL = ExactPoint.of(0, 1)
KITE_VERTICES = [
    (Fraction(-1, 2), Fraction(-1, 2)),
    (Fraction(1, 2), Fraction(-1, 2)),
    (Fraction(11, 10), Fraction(3, 10)),
    (Fraction(-1, 2), Fraction(3, 2)),
]
DOMINO_VERTICES = [
    (Fraction(-1, 2), Fraction(-1, 2)),
    (Fraction(1, 2), Fraction(-1, 2)),
    (Fraction(1, 2), Fraction(3, 2)),
    (Fraction(-1, 2), Fraction(3, 2)),
]


@dataclass(frozen=True)
class Dissection:
    """The five isometries mapping T onto the pieces of M.T."""

    children: tuple[Isometry, ...]
    certificate: CoverReport
    # integer data of the in-place subdivision maps (M^-1 children, times 5)
    shrink_linear: tuple[tuple[int, int, int, int], ...]
    shrink_shift: tuple[tuple[int, int], ...]

    def chiralities(self) -> tuple[int, ...]:
        return tuple(h.det_sign() for h in self.children)


def _mat_mul(a: Sequence[int], b: Sequence[int]) -> tuple[int, int, int, int]:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _mat_vec(a: Sequence[int], v: Sequence[int]) -> tuple[int, int]:
    return (a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1])


def _point_in_triangle(p, tri) -> bool:
    sign = 0
    for i in range(3):
        a = tri[i]
        b = tri[(i + 1) % 3]
        o = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if o == 0:
            continue
        s = 1 if o > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def _point_strictly_in(p, tri) -> bool:
    signs = set()
    for i in range(3):
        a = tri[i]
        b = tri[(i + 1) % 3]
        o = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if o == 0:
            return False
        signs.add(1 if o > 0 else -1)
    return len(signs) == 1


@lru_cache(maxsize=1)
def derive_dissection() -> Dissection:
    """Exhaustive exact search for the five-tile cover of M.T.

    Unit triangles (both chiralities) are enumerated with vertices on the
    (1/4)Z^2 grid inside M.T; a leg of length 1 or 2 on that grid is
    necessarily axis-parallel, so placements are anchored at the
    right-angle vertex with axis leg directions.  Child 1 is pinned to
    the identity; exact set-cover search over interior witness points
    enumerates every candidate cover, and each candidate is certified by
    exact rational cover checking.  The pinwheel dissection must be the
    unique survivor.
    """
    # quadrupled coordinates: quarter-grid becomes Z^2
    mt4 = [(-6, -2), (2, -6), (2, 14)]  # 4 * M.(T vertices)
    t4 = ((-2, -2), (2, -2), (-2, 6))  # 4 * T

    candidates: list[tuple[tuple[int, int], ...]] = []
    for vx in range(-6, 3):
        for vy in range(-6, 15):
            for ux, uy in ((4, 0), (-4, 0), (0, 4), (0, -4)):
                for wsign in (1, -1):
                    wx, wy = -uy * 2 * wsign, ux * 2 * wsign
                    tri = ((vx, vy), (vx + ux, vy + uy), (vx + wx, vy + wy))
                    if all(_point_in_triangle(p, mt4) for p in tri):
                        candidates.append(tri)

    # witness points: odd-odd points of the doubled (x8) picture, one per
    # area quantum; no candidate edge or region edge passes through them
    witnesses = []
    mt8 = [(2 * x, 2 * y) for x, y in mt4]
    for x in range(-12, 5, 2):
        for y in range(-12, 29, 2):
            p = (x + 1, y + 1)
            if _point_strictly_in(p, mt8):
                witnesses.append(p)
    windex = {w: i for i, w in enumerate(witnesses)}

    def mask_of(tri) -> int:
        tri8 = [(2 * x, 2 * y) for x, y in tri]
        m = 0
        for w, i in windex.items():
            if _point_strictly_in(w, tri8):
                m |= 1 << i
        return m

    masks = [mask_of(t) for t in candidates]
    full = (1 << len(witnesses)) - 1
    try:
        identity_idx = candidates.index(t4)
    except ValueError:
        raise NoDissectionFound("identity placement of T is not inside M.T")

    solutions: list[list[int]] = []
    start_mask = masks[identity_idx]
    order = sorted(range(len(candidates)), key=lambda i: candidates[i])

    def search(covered: int, chosen: list[int]) -> None:
        if len(chosen) == 5:
            if covered == full:
                solutions.append(list(chosen))
            return
        if covered == full:
            return
        # branch on whoever covers the lowest uncovered witness
        uncovered = ~covered & full
        low_bit = uncovered & -uncovered
        for i in order:
            m = masks[i]
            if not m & low_bit or m & covered or i == identity_idx:
                continue
            chosen.append(i)
            search(covered | m, chosen)
            chosen.pop()

    search(start_mask, [identity_idx])

    # certify each witness-partition candidate with exact rational arithmetic
    certified: list[tuple[list[int], CoverReport]] = []
    parent = Triangle.of(
        (Fraction(-3, 2), Fraction(-1, 2)),
        (Fraction(1, 2), Fraction(-3, 2)),
        (Fraction(1, 2), Fraction(7, 2)),
    )
    for sol in solutions:
        tris = [
            Triangle.of(*[(Fraction(x, 4), Fraction(y, 4)) for x, y in candidates[i]])
            for i in sol
        ]
        report = exact_cover_check(parent, tris)
        if report:
            certified.append((sol, report))

    if not certified:
        raise NoDissectionFound("no exact five-tile cover of M.T contains T")
    if len(certified) > 1:
        raise MultipleDissectionsFound(f"{len(certified)} exact covers found")

    sol, report = certified[0]
    children = []
    for i in sol:
        (vx, vy), (sx, sy), (lx, ly) = candidates[i]
        # map T -> child: (1,0) -> short leg, (0,1) -> long leg / 2
        n = ((sx - vx) // 4, (lx - vx) // 8, (sy - vy) // 4, (ly - vy) // 8)
        na = _mat_vec(n, (-1, -1))  # N . A, doubled input gives doubled output
        tx = Fraction(vx, 4) - Fraction(na[0], 2)
        ty = Fraction(vy, 4) - Fraction(na[1], 2)
        children.append(Isometry(n[0], n[1], n[2], n[3], 0, tx, ty))

    ident = Isometry.identity()
    if children[0].linear != ident.linear or children[0].tx != 0 or children[0].ty != 0:
        raise NoDissectionFound("child 1 is not the identity placement")
    rest = sorted(children[1:], key=lambda h: (h.tx, h.ty, h.linear))
    children = [children[0]] + rest

    shrink_lin = []
    shrink_shift = []
    for h in children:
        if h.tx.denominator != 1 or h.ty.denominator != 1:
            raise NoDissectionFound("dissection translations are not integral")
        nhat = _mat_mul(M_CONJ_LINEAR, h.linear)
        u = _mat_vec(M_CONJ_LINEAR, (int(h.tx), int(h.ty)))
        shrink_lin.append(nhat)
        shrink_shift.append(u)

    return Dissection(tuple(children), report, tuple(shrink_lin), tuple(shrink_shift))


# ---------------------------------------------------------------------------
# patches


_SEED_POLYGONS = {
    "T": [v.as_tuple() for v in (REF_A, REF_B, REF_C)],
    "K": KITE_VERTICES,
    "D": DOMINO_VERTICES,
}


@dataclass(frozen=True)
class Patch:
    """Tiles of one substitution level in the integer inflation frame.

    ``linear`` holds rows (n00, n01, n10, n11) with N^T N = 5^level * Id;
    ``trans`` holds the integer translations, which are also the control
    points.  Tiles map the reference triangle as p -> N p + t.
    """

    level: int
    seed: str
    linear: np.ndarray
    trans: np.ndarray

    def __len__(self) -> int:
        return self.linear.shape[0]

    def chirality(self) -> np.ndarray:
        det = (
            self.linear[:, 0] * self.linear[:, 3]
            - self.linear[:, 1] * self.linear[:, 2]
        )
        return np.sign(det).astype(np.int64)

    def tile_ids(self) -> list[str]:
        return ["T_plus" if c > 0 else "T_minus" for c in self.chirality()]

    def vertices_doubled(self) -> np.ndarray:
        """(k, 3, 2) integer vertices in doubled inflation-frame coordinates."""
        n = self.linear
        out = np.empty((len(self), 3, 2), dtype=np.int64)
        for j, (rx, ry) in enumerate(REF_DOUBLED):
            out[:, j, 0] = n[:, 0] * rx + n[:, 1] * ry + 2 * self.trans[:, 0]
            out[:, j, 1] = n[:, 2] * rx + n[:, 3] * ry + 2 * self.trans[:, 1]
        return out

    def control_points(self) -> np.ndarray:
        """One exact integer control point per tile (inflation frame)."""
        pts = self.trans.copy()
        uniq = np.unique(pts, axis=0)
        if uniq.shape[0] != pts.shape[0]:
            raise SubstitutionError("duplicate control points in patch")
        return pts

    def support_polygon(self) -> list[tuple[Fraction, Fraction]]:
        scale = 5 ** self.level
        return [(scale * x, scale * y) for x, y in _SEED_POLYGONS[self.seed]]

    def origin_clearance_fixed(self) -> float:
        """Distance from the origin to the patch boundary, fixed-frame units."""
        import math

        poly = self.support_polygon()
        k = len(poly)
        best = None
        for i in range(k):
            ax, ay = poly[i]
            bx, by = poly[(i + 1) % k]
            ex, ey = bx - ax, by - ay
            num = abs(ex * ay - ey * ax)  # |cross(e, a)| = dist * |e|
            d = float(num) / math.sqrt(float(ex * ex + ey * ey))
            best = d if best is None else min(best, d)
        return best / math.sqrt(5.0**self.level)

    def fixed_frame_numerators(self) -> tuple[np.ndarray, int]:
        """Control points in the fixed frame as (numerators, 5^level).

        Even levels only: the inflation frame is carried back by the
        rational rotation-and-scaling (3-4i)^(level/2) / 5^level.
        """
        if self.level % 2 != 0:
            raise SubstitutionError("fixed frame exists at even levels only")
        c, d = 1, 0  # (3-4i)^(level/2) = c + d i
        for _ in range(self.level // 2):
            c, d = 3 * c + 4 * d, -4 * c + 3 * d
        x = self.trans[:, 0].astype(object)
        y = self.trans[:, 1].astype(object)
        num = np.empty_like(self.trans, dtype=object)
        num[:, 0] = x * c - y * d
        num[:, 1] = x * d + y * c
        return num, 5 ** self.level

    def to_json_dict(self) -> dict:
        ids = self.tile_ids()
        tiles = []
        for i in range(len(self)):
            a, b, c, d = (int(v) for v in self.linear[i])
            tiles.append(
                {
                    "id": ids[i],
                    "linear": [a, b, c, d],
                    "scale_exp": self.level,
                    "tx": [int(self.trans[i, 0]), 1],
                    "ty": [int(self.trans[i, 1]), 1],
                }
            )
        return {"level": self.level, "seed": self.seed, "tiles": tiles}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1)

    @staticmethod
    def from_json_dict(data: dict) -> "Patch":
        tiles = data["tiles"]
        lin = np.array([t["linear"] for t in tiles], dtype=np.int64)
        trans = np.array(
            [[t["tx"][0] // t["tx"][1], t["ty"][0] // t["ty"][1]] for t in tiles],
            dtype=np.int64,
        )
        return Patch(int(data["level"]), data.get("seed", "T"), lin, trans)


def seed_triangle() -> Patch:
    return Patch(
        0,
        "T",
        np.array([[1, 0, 0, 1]], dtype=np.int64),
        np.zeros((1, 2), dtype=np.int64),
    )


def seed_kite() -> Patch:
    lin = np.array([[5, 0, 0, 5], list(HYP_REFLECTION_NUM)], dtype=np.int64)
    trans = np.array([[0, 0], list(HYP_REFLECTION_SHIFT)], dtype=np.int64)
    return Patch(2, "K", lin, trans)


def seed_domino() -> Patch:
    lin = np.array([[5, 0, 0, 5], [-5, 0, 0, -5]], dtype=np.int64)
    trans = np.array([[0, 0], [0, 5]], dtype=np.int64)
    return Patch(2, "D", lin, trans)


_MAX_INT64_LEVEL = 12


def substitute(patch: Patch) -> Patch:
    """One inflation step: every tile is replaced by its five children."""
    if patch.level + 1 > _MAX_INT64_LEVEL:
        raise SubstitutionError(f"int64 bookkeeping is guarded to level {_MAX_INT64_LEVEL}")
    dis = derive_dissection()
    k = len(patch)
    lin = patch.linear
    tr = patch.trans
    new_lin = np.empty((5 * k, 4), dtype=np.int64)
    new_tr = np.empty((5 * k, 2), dtype=np.int64)
    for i in range(5):
        a, b, c, d = dis.shrink_linear[i]
        ux, uy = dis.shrink_shift[i]
        new_lin[i::5, 0] = lin[:, 0] * a + lin[:, 1] * c
        new_lin[i::5, 1] = lin[:, 0] * b + lin[:, 1] * d
        new_lin[i::5, 2] = lin[:, 2] * a + lin[:, 3] * c
        new_lin[i::5, 3] = lin[:, 2] * b + lin[:, 3] * d
        new_tr[i::5, 0] = lin[:, 0] * ux + lin[:, 1] * uy + 5 * tr[:, 0]
        new_tr[i::5, 1] = lin[:, 2] * ux + lin[:, 3] * uy + 5 * tr[:, 1]
    return Patch(patch.level + 1, patch.seed, new_lin, new_tr)


def generate_patch(level: int, seed: str = "T") -> Patch:
    patch = {"T": seed_triangle, "K": seed_kite, "D": seed_domino}[seed]()
    for _ in range(level):
        patch = substitute(patch)
    return patch


def control_points(patch: Patch) -> np.ndarray:
    return patch.control_points()


def verify_disjoint(patch: Patch, sample_pairs: int = 200, rng=None) -> bool:
    """Exact interior-disjointness spot check on random tile pairs."""
    import random

    rng = rng or random.Random(20090517)
    verts = patch.vertices_doubled()
    k = len(patch)
    from .exact import intersection_area2

    pairs = set()
    trials = min(sample_pairs, k * (k - 1) // 2)
    while len(pairs) < trials:
        i = rng.randrange(k)
        j = rng.randrange(k)
        if i != j:
            pairs.add((min(i, j), max(i, j)))
    for i, j in pairs:
        p = [(Fraction(int(x)), Fraction(int(y))) for x, y in verts[i]]
        q = [(Fraction(int(x)), Fraction(int(y))) for x, y in verts[j]]
        if intersection_area2(p, q) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# kite-domino merging


@dataclass(frozen=True)
class KDPatch:
    level: int
    kinds: tuple[str, ...]  # "K" or "D" per merged tile
    linear: np.ndarray
    trans: np.ndarray
    remainder: np.ndarray  # indices into the source patch of unpaired triangles

    def __len__(self) -> int:
        return len(self.kinds)

    def counts(self) -> dict[str, int]:
        out = {"K": 0, "D": 0}
        for k in self.kinds:
            out[k] += 1
        return out


def _classify_pair(lin_i, tr_i, lin_j, tr_j) -> str | None:
    """Kind of the merged tile formed by triangles i and j sharing a hypotenuse."""
    col = (lin_i[1], lin_i[3])  # N_i . (0,1)
    if (
        lin_j[0] == -lin_i[0]
        and lin_j[1] == -lin_i[1]
        and lin_j[2] == -lin_i[2]
        and lin_j[3] == -lin_i[3]
        and tr_j[0] == tr_i[0] + col[0] * HALF_TURN_SHIFT[1]
        and tr_j[1] == tr_i[1] + col[1] * HALF_TURN_SHIFT[1]
    ):
        return "D"
    prod = _mat_mul(tuple(int(v) for v in lin_i), HYP_REFLECTION_NUM)
    shift = _mat_vec(tuple(int(v) for v in lin_i), HYP_REFLECTION_SHIFT)
    if all(p % 5 == 0 for p in prod) and all(s % 5 == 0 for s in shift):
        if (
            lin_j[0] == prod[0] // 5
            and lin_j[1] == prod[1] // 5
            and lin_j[2] == prod[2] // 5
            and lin_j[3] == prod[3] // 5
            and tr_j[0] == tr_i[0] + shift[0] // 5
            and tr_j[1] == tr_i[1] + shift[1] // 5
        ):
            return "K"
    return None


def merge_to_kite_domino(patch: Patch) -> KDPatch:
    """Pair triangles along shared full hypotenuses into kites and dominoes.

    Triangles whose hypotenuse lies on the patch boundary stay unpaired
    and are reported in ``remainder``.
    """
    if patch.level < 1 and patch.seed == "T":
        raise SubstitutionError("merging needs a substituted patch")
    verts = patch.vertices_doubled()
    hyp = {}
    for i in range(len(patch)):
        b = (int(verts[i, 1, 0]), int(verts[i, 1, 1]))
        c = (int(verts[i, 2, 0]), int(verts[i, 2, 1]))
        key = (b, c) if b <= c else (c, b)
        hyp.setdefault(key, []).append(i)

    kinds: list[str] = []
    lin_rows = []
    tr_rows = []
    remainder = []
    for key, tiles in hyp.items():
        if len(tiles) == 1:
            remainder.append(tiles[0])
            continue
        if len(tiles) > 2:
            raise AmbiguousPairing(f"edge {key} shared by {len(tiles)} triangles")
        i, j = tiles
        kind = _classify_pair(patch.linear[i], patch.trans[i], patch.linear[j], patch.trans[j])
        if kind is None:
            kind = _classify_pair(patch.linear[j], patch.trans[j], patch.linear[i], patch.trans[i])
        if kind is None:
            raise AmbiguousPairing(f"pair {tiles} is neither kite nor domino")
        rep = min(
            (tuple(int(v) for v in patch.linear[t]), tuple(int(v) for v in patch.trans[t]))
            for t in tiles
        )
        kinds.append(kind)
        lin_rows.append(rep[0])
        tr_rows.append(rep[1])
    return KDPatch(
        patch.level,
        tuple(kinds),
        np.array(lin_rows, dtype=np.int64).reshape(-1, 4),
        np.array(tr_rows, dtype=np.int64).reshape(-1, 2),
        np.array(sorted(remainder), dtype=np.int64),
    )


@dataclass(frozen=True)
class SubstitutionMatrix:
    """Children counts of the kite-domino substitution (columns = parents)."""

    kite_children_of_kite: int
    kite_children_of_domino: int
    domino_children_of_kite: int
    domino_children_of_domino: int

    def as_rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (
            (self.kite_children_of_kite, self.kite_children_of_domino),
            (self.domino_children_of_kite, self.domino_children_of_domino),
        )

    def perron_eigenvalue(self) -> int:
        (a, b), (c, d) = self.as_rows()
        tr, det = a + d, a * d - b * c
        # exact check that 25 is an eigenvalue, and the dominant one
        if 25 * 25 - tr * 25 + det != 0:
            raise SubstitutionError("25 is not an eigenvalue of the substitution matrix")
        other = tr - 25
        if abs(other) >= 25:
            raise SubstitutionError("25 is not the dominant eigenvalue")
        return 25

    def relative_frequencies(self) -> tuple[Fraction, Fraction]:
        """Normalised Perron eigenvector (kite, domino)."""
        (a, b), (c, d) = self.as_rows()
        lam = self.perron_eigenvalue()
        # (a - lam) v0 + b v1 = 0
        v0, v1 = Fraction(b), Fraction(lam - a)
        if v0 == 0 and v1 == 0:
            v0, v1 = Fraction(lam - d), Fraction(c)
        total = v0 + v1
        return v0 / total, v1 / total

    def absolute_frequencies(self) -> tuple[Fraction, Fraction]:
        """Tiles per unit area; kites and dominoes both have area 2."""
        r0, r1 = self.relative_frequencies()
        return r0 / 2, r1 / 2


def kd_substitution_matrix() -> SubstitutionMatrix:
    """Count kite/domino children by substituting each prototile twice.

    Applies the square of the triangle substitution inside one kite and
    one domino and merges; all fifty triangles must pair internally.
    """
    counts = {}
    for seed, make in (("K", seed_kite), ("D", seed_domino)):
        patch = substitute(substitute(make()))
        merged = merge_to_kite_domino(patch)
        if len(merged.remainder) != 0:
            raise InternalPairingIncomplete(
                f"{len(merged.remainder)} unpaired triangles inside {seed}"
            )
        counts[seed] = merged.counts()
    return SubstitutionMatrix(
        counts["K"]["K"],
        counts["D"]["K"],
        counts["K"]["D"],
        counts["D"]["D"],
    )


# ---------------------------------------------------------------------------
# vertex stars


_CORNER_ANGLE = {0: (1, 0), 1: (1, -1), 2: (0, 1)}  # (pi/2, alpha) units
_CORNER_CODE = {0: "R", 1: "L", 2: "S"}
_EDGE_ANGLE = (2, 0)
_FULL_TURN = (4, 0)


def _reduce_dir(v: tuple[int, int]) -> tuple[int, int]:
    g = gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g)


@dataclass
class VertexStarClass:
    key: tuple
    count: int
    frequency: float
    representative_vertex: tuple[int, int]
    representative_tiles: tuple[int, ...]


def vertex_stars(patch: Patch) -> list[VertexStarClass]:
    """Congruence classes of full vertex configurations in the patch.

    A star collects every tile containing the vertex, including tiles
    whose edge passes through it (the tiling is not edge-to-edge).  A
    vertex counts as interior when its wedges close up to a full turn;
    the wedge cycle of angle codes, tile chiralities and through-edge
    offsets, minimised over rotation and reflection, is the congruence
    key.  Frequencies are counts per unit fixed-frame patch area.
    """
    verts = patch.vertices_doubled()
    chir = patch.chirality()
    k = len(patch)

    corner_map: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i in range(k):
        for c in range(3):
            p = (int(verts[i, c, 0]), int(verts[i, c, 1]))
            corner_map.setdefault(p, []).append((i, c))

    edge_pairs = ((0, 1), (0, 2), (1, 2))  # short leg, long leg, hypotenuse
    edge_type = {(0, 1): "s", (0, 2): "l", (1, 2): "h"}
    through: dict[tuple[int, int], list[tuple[int, tuple[int, int], tuple[int, int], str]]] = {}
    for i in range(k):
        for (ca, cb) in edge_pairs:
            p = (int(verts[i, ca, 0]), int(verts[i, ca, 1]))
            q = (int(verts[i, cb, 0]), int(verts[i, cb, 1]))
            dx, dy = q[0] - p[0], q[1] - p[1]
            g = gcd(abs(dx), abs(dy))
            sx, sy = dx // g, dy // g
            for t in range(1, g):
                m = (p[0] + sx * t, p[1] + sy * t)
                if m in corner_map:
                    through.setdefault(m, []).append((i, p, q, edge_type[(ca, cb)]))

    def wedges_at(v):
        out = []
        for (i, c) in corner_map.get(v, ()):  # corner wedges
            others = [j for j in range(3) if j != c]
            r1 = (int(verts[i, others[0], 0]) - v[0], int(verts[i, others[0], 1]) - v[1])
            r2 = (int(verts[i, others[1], 0]) - v[0], int(verts[i, others[1], 1]) - v[1])
            if r1[0] * r2[1] - r1[1] * r2[0] < 0:
                r1, r2 = r2, r1
            out.append(
                {
                    "start": _reduce_dir(r1),
                    "end": _reduce_dir(r2),
                    "angle": _CORNER_ANGLE[c],
                    "desc": (_CORNER_CODE[c], int(chir[i])),
                    "tile": i,
                }
            )
        for (i, p, q, etype) in through.get(v, ()):  # through-edge wedges
            d = _reduce_dir((q[0] - p[0], q[1] - p[1]))
            # third corner determines on which side the tile lies
            corners = [
                (int(verts[i, c, 0]), int(verts[i, c, 1])) for c in range(3)
            ]
            w = next(c for c in corners if c != p and c != q)
            wd = (w[0] - v[0], w[1] - v[1])
            if d[0] * wd[1] - d[1] * wd[0] > 0:
                start, end = d, (-d[0], -d[1])
                a2 = (q[0] - v[0]) ** 2 + (q[1] - v[1]) ** 2
                b2 = (p[0] - v[0]) ** 2 + (p[1] - v[1]) ** 2
            else:
                start, end = (-d[0], -d[1]), d
                a2 = (p[0] - v[0]) ** 2 + (p[1] - v[1]) ** 2
                b2 = (q[0] - v[0]) ** 2 + (q[1] - v[1]) ** 2
            out.append(
                {
                    "start": start,
                    "end": end,
                    "angle": _EDGE_ANGLE,
                    "desc": ("E", int(chir[i]), etype, a2, b2),
                    "tile": i,
                }
            )
        return out

    def close_cycle(wedges):
        """Order wedges around the vertex; None unless they tile a full turn."""
        by_start = {}
        for w in wedges:
            if w["start"] in by_start:
                return None
            by_start[w["start"]] = w
        total = (0, 0)
        first = min(by_start)
        seq = []
        cur = by_start[first]
        for _ in range(len(wedges)):
            seq.append(cur)
            total = (total[0] + cur["angle"][0], total[1] + cur["angle"][1])
            nxt = by_start.get(cur["end"])
            if nxt is None:
                return None
            cur = nxt
        if cur is not seq[0] or total != _FULL_TURN:
            return None
        return seq

    def mirror_desc(d):
        if d[0] == "E":
            return ("E", -d[1], d[2], d[4], d[3])
        return (d[0], -d[1])

    def canonical_key(seq):
        descs = [w["desc"] for w in seq]
        n = len(descs)
        variants = []
        for r in range(n):
            variants.append(tuple(descs[r:] + descs[:r]))
        mirrored = [mirror_desc(d) for d in reversed(descs)]
        for r in range(n):
            variants.append(tuple(mirrored[r:] + mirrored[:r]))
        return min(variants)

    classes: dict[tuple, VertexStarClass] = {}
    for v in corner_map:
        wedges = wedges_at(v)
        seq = close_cycle(wedges)
        if seq is None:
            continue
        key = canonical_key(seq)
        if key in classes:
            classes[key].count += 1
        else:
            classes[key] = VertexStarClass(
                key, 1, 0.0, v, tuple(sorted({w["tile"] for w in seq}))
            )
    area = float(5 ** patch.level)
    out = sorted(classes.values(), key=lambda c: (-c.count, c.key))
    for c in out:
        c.frequency = c.count / area
    return out


def stars_congruent(patch: Patch, c1: VertexStarClass, c2: VertexStarClass) -> bool:
    """Exact congruence test between two star representatives."""
    lin = patch.linear
    tr = patch.trans

    def star_data(c):
        v = c.representative_vertex
        tiles = []
        for i in c.representative_tiles:
            tiles.append(
                (
                    tuple(int(x) for x in lin[i]),
                    (int(2 * tr[i, 0]) - v[0], int(2 * tr[i, 1]) - v[1]),
                )
            )
        return set(tiles)

    s1 = star_data(c1)
    s2 = star_data(c2)
    if len(s1) != len(s2):
        return False
    scale = Fraction(5 ** patch.level)
    n1, d1 = next(iter(s1))
    for n2, d2 in s2:
        for reflect in (False,):
            # candidate map Q = N2 . N1^T / 5^level (det sign free via choice of n2)
            q = _mat_mul(n2, (n1[0], n1[2], n1[1], n1[3]))
            qf = tuple(Fraction(x) / scale for x in q)
            # check Q orthogonal is automatic; verify it maps s1 onto s2
            def apply_q(mat, vec):
                m = (
                    qf[0] * mat[0] + qf[1] * mat[2],
                    qf[0] * mat[1] + qf[1] * mat[3],
                    qf[2] * mat[0] + qf[3] * mat[2],
                    qf[2] * mat[1] + qf[3] * mat[3],
                )
                v = (qf[0] * vec[0] + qf[1] * vec[1], qf[2] * vec[0] + qf[3] * vec[1])
                return m, v

            ok = True
            for nn, dd in s1:
                m, v = apply_q(nn, dd)
                if any(x.denominator != 1 for x in m) or any(x.denominator != 1 for x in v):
                    ok = False
                    break
                cand = (tuple(int(x) for x in m), tuple(int(x) for x in v))
                if cand not in s2:
                    ok = False
                    break
            if ok:
                return True
    return False


# ---------------------------------------------------------------------------
# rotated-lattice membership (fixed frame lies in a union of rotated Z^2)


def rotated_lattice_report(patch: Patch) -> dict:
    """Check that every control point lies in some R^m Z^2 with |m| <= level.

    In the inflation frame the test collapses to an exact 5-adic one: the
    point t belongs to a rotated lattice within range iff 5^level divides
    |t|^2.  ``witness_rotation_exponent`` recovers an explicit exponent
    for individual points via Gaussian-integer arithmetic.
    """
    if patch.level % 2 != 0:
        raise SubstitutionError("membership test runs on even-level patches")
    t = patch.trans.astype(object)
    norms = t[:, 0] * t[:, 0] + t[:, 1] * t[:, 1]
    mod = 5 ** patch.level
    failures = [i for i, v in enumerate(norms) if v % mod != 0]
    return {
        "level": patch.level,
        "points": len(patch),
        "passed": len(patch) - len(failures),
        "failures": failures[:10],
        "all_pass": not failures,
    }


def witness_rotation_exponent(point: tuple[int, int], level: int) -> int:
    """Smallest |m| <= level with R_theta^m applied inverse landing in Z^2.

    Works on the fixed-frame value z = t (3-4i)^(level/2) / 5^level by
    explicit Gaussian-integer divisibility; raises if no exponent exists.
    """
    if level % 2 != 0:
        raise SubstitutionError("even level required")
    zx, zy = point
    c, d = 1, 0
    for _ in range(level // 2):
        c, d = 3 * c + 4 * d, -4 * c + 3 * d
    nx, ny = zx * c - zy * d, zx * d + zy * c  # z numerator over 5^level
    den_pow = level
    for m_abs in range(level + 1):
        for sign in (1, -1) if m_abs else (1,):
            ax, ay, extra = nx, ny, 0
            e = (3, 4) if sign < 0 else (3, -4)
            for _ in range(m_abs):
                ax, ay = ax * e[0] - ay * e[1], ax * e[1] + ay * e[0]
                extra += 1
            mod = 5 ** (den_pow + extra)
            if ax % mod == 0 and ay % mod == 0:
                return -m_abs if sign < 0 else m_abs
    raise SubstitutionError(f"no rotation exponent within |m| <= {level} for {point}")
