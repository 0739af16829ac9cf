"""Exact rational planar geometry over Z[1/2, 1/5].

Points carry Fraction coordinates whose denominators are of the form
2^a * 5^b (a <= 1 in practice; violations are logged, not assumed away).
Isometries store an integer 2x2 linear part together with a scale
exponent s, meaning the geometric linear part is N / sqrt(5)^s.  All
predicates reduce to integer arithmetic; no floating point enters this
module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

Vec = tuple[Fraction, Fraction]


class ExactGeometryError(Exception):
    pass


class OddScaleError(ExactGeometryError):
    """Operation would leave the rational field (a bare sqrt(5) remains)."""


class NonOrthogonalLinearPart(ExactGeometryError):
    """Linear part is not a multiple of an orthogonal matrix."""


class NonCanonicalDistance(ExactGeometryError):
    """Squared distance is not of the form (p^2+q^2)/5^l."""


def denominator_exponents(q: Fraction) -> tuple[int, int] | None:
    """Split the denominator of ``q`` as 2^a * 5^b; None if other primes occur."""
    d = q.denominator
    a = 0
    while d % 2 == 0:
        d //= 2
        a += 1
    b = 0
    while d % 5 == 0:
        d //= 5
        b += 1
    if d != 1:
        return None
    return a, b


def check_rational_2_5(q: Fraction, max_two_exp: int = 1) -> bool:
    """Verify the 2^a*5^b denominator invariant; log (never raise) on failure."""
    exps = denominator_exponents(q)
    if exps is None:
        logger.warning("coordinate %s has a prime other than 2,5 in its denominator", q)
        return False
    if exps[0] > max_two_exp:
        logger.warning("coordinate %s exceeds 2-adic denominator bound (a=%d)", q, exps[0])
        return False
    return True


@dataclass(frozen=True)
class ExactPoint:
    x: Fraction
    y: Fraction

    @staticmethod
    def of(x, y) -> "ExactPoint":
        return ExactPoint(Fraction(x), Fraction(y))

    def validate(self) -> bool:
        return check_rational_2_5(self.x) and check_rational_2_5(self.y)

    def __add__(self, other: "ExactPoint") -> "ExactPoint":
        return ExactPoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "ExactPoint") -> "ExactPoint":
        return ExactPoint(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> Vec:
        return (self.x, self.y)


@lru_cache(maxsize=None)
def _two_square_representable(n: int) -> bool:
    """n >= 0 is a sum of two integer squares (primes 3 mod 4 to even powers)."""
    if n < 0:
        return False
    if n == 0:
        return True
    while n % 2 == 0:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if p % 4 == 3 and e % 2 == 1:
                return False
        p += 2
    return not (n % 4 == 3)


@dataclass(frozen=True, order=False)
class RadiusKey:
    """Canonical exact squared radius (p^2+q^2) / 5^ell.

    Canonical form: either ell = 0 or 5 does not divide p2q2.  Division
    by 5 preserves representability as a sum of two squares, so the
    reduced numerator stays in the admissible set.
    """

    p2q2: int
    ell: int

    def __post_init__(self):
        if self.p2q2 < 0 or self.ell < 0:
            raise NonCanonicalDistance(f"negative data ({self.p2q2}, {self.ell})")

    @staticmethod
    def make(value: int, ell: int) -> "RadiusKey":
        if value == 0:
            return RadiusKey(0, 0)
        while ell > 0 and value % 5 == 0:
            value //= 5
            ell -= 1
        return RadiusKey(value, ell)

    @staticmethod
    def from_squared(d2: Fraction, check_two_squares: bool = True) -> "RadiusKey":
        num, den = d2.numerator, d2.denominator
        ell = 0
        while den % 5 == 0:
            den //= 5
            ell += 1
        if den != 1:
            raise NonCanonicalDistance(f"squared distance {d2} has non-5 denominator")
        if check_two_squares and not _two_square_representable(num):
            raise NonCanonicalDistance(f"{num}/5^{ell} is not (p^2+q^2)/5^ell")
        return RadiusKey.make(num, ell)

    def as_fraction(self) -> Fraction:
        return Fraction(self.p2q2, 5 ** self.ell)

    def radius(self) -> float:
        return (self.p2q2 / 5 ** self.ell) ** 0.5

    def rescaled(self, extra_ell: int) -> "RadiusKey":
        """Key for the same expanded value read at 5^-extra_ell scale."""
        return RadiusKey.make(self.p2q2, self.ell + extra_ell)

    def _cmp_tuple(self):
        # compare p2q2 / 5^ell exactly by cross multiplication
        return self.p2q2, self.ell

    def __lt__(self, other: "RadiusKey") -> bool:
        return self.p2q2 * 5 ** other.ell < other.p2q2 * 5 ** self.ell

    def __le__(self, other: "RadiusKey") -> bool:
        return self.p2q2 * 5 ** other.ell <= other.p2q2 * 5 ** self.ell

    def __gt__(self, other: "RadiusKey") -> bool:
        return other < self

    def __ge__(self, other: "RadiusKey") -> bool:
        return other <= self


def squared_distance(a: ExactPoint, b: ExactPoint) -> RadiusKey:
    """Exact |a-b|^2 as a canonical RadiusKey.

    The 2-parts of the coordinate denominators must cancel in the sum of
    squares; if they do not (or another prime appears) the distance is not
    of the admissible (p^2+q^2)/5^ell shape and NonCanonicalDistance is
    raised rather than silently coerced.
    """
    dx = a.x - b.x
    dy = a.y - b.y
    return RadiusKey.from_squared(dx * dx + dy * dy)


_IDENTITY_LINEAR = (1, 0, 0, 1)


@dataclass(frozen=True)
class Isometry:
    """Planar map p -> N p / sqrt(5)^s + t with integer N and rational t.

    For honest isometries N^T N = 5^s * Id holds and det N = +-5^s
    distinguishes rotations from reflections.  The same container also
    carries inflation-frame similarities, built with scale_exp = 0 and a
    linear part of inherent exponent m > 0 (N^T N = 5^m * Id); those are
    applied without normalisation.
    """

    n00: int
    n01: int
    n10: int
    n11: int
    scale_exp: int = 0
    tx: Fraction = Fraction(0)
    ty: Fraction = Fraction(0)

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(*_IDENTITY_LINEAR)

    @staticmethod
    def make(linear: Sequence[int], scale_exp: int = 0, translation=(0, 0)) -> "Isometry":
        a, b, c, d = linear
        return Isometry(a, b, c, d, scale_exp, Fraction(translation[0]), Fraction(translation[1]))

    @property
    def linear(self) -> tuple[int, int, int, int]:
        return (self.n00, self.n01, self.n10, self.n11)

    @property
    def translation(self) -> ExactPoint:
        return ExactPoint(self.tx, self.ty)

    def similarity_exp(self) -> int:
        """m with N^T N = 5^m * Id; raises if N is not a scaled orthogonal matrix."""
        a, b, c, d = self.linear
        g00 = a * a + c * c
        g01 = a * b + c * d
        g11 = b * b + d * d
        if g01 != 0 or g00 != g11:
            raise NonOrthogonalLinearPart(f"N^T N not scalar for {self.linear}")
        m = 0
        v = g00
        while v > 1 and v % 5 == 0:
            v //= 5
            m += 1
        if v != 1:
            raise NonOrthogonalLinearPart(f"N^T N = {g00} is not a power of 5")
        return m

    def is_isometry(self) -> bool:
        try:
            return self.similarity_exp() == self.scale_exp
        except NonOrthogonalLinearPart:
            return False

    def det_sign(self) -> int:
        det = self.n00 * self.n11 - self.n01 * self.n10
        if det == 0:
            raise NonOrthogonalLinearPart("singular linear part")
        return 1 if det > 0 else -1

    def canonical(self) -> "Isometry":
        a, b, c, d = self.linear
        s = self.scale_exp
        while s >= 2 and a % 5 == 0 and b % 5 == 0 and c % 5 == 0 and d % 5 == 0:
            a //= 5
            b //= 5
            c //= 5
            d //= 5
            s -= 2
        return Isometry(a, b, c, d, s, self.tx, self.ty)

    def _apply_linear(self, p: Vec) -> Vec:
        if self.scale_exp % 2 != 0:
            raise OddScaleError(
                f"scale_exp={self.scale_exp}: image involves sqrt(5); "
                "work in the inflation frame (scale_exp 0) instead"
            )
        q = 5 ** (self.scale_exp // 2)
        x, y = p
        return (
            Fraction(self.n00 * x + self.n01 * y, 1) / q,
            Fraction(self.n10 * x + self.n11 * y, 1) / q,
        )

    def apply(self, p: ExactPoint) -> ExactPoint:
        vx, vy = self._apply_linear((p.x, p.y))
        return ExactPoint(vx + self.tx, vy + self.ty)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other (apply(compose(g,h), p) == apply(g, apply(h, p)))."""
        a, b, c, d = self.linear
        e, f, g, h = other.linear
        lin = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        if other.tx == 0 and other.ty == 0:
            tx, ty = Fraction(0), Fraction(0)
        else:
            tx, ty = self._apply_linear((other.tx, other.ty))
        return Isometry(*lin, self.scale_exp + other.scale_exp,
                        tx + self.tx, ty + self.ty).canonical()

    def inverse(self) -> "Isometry":
        if not self.is_isometry():
            raise NonOrthogonalLinearPart("inverse defined for honest isometries only")
        a, b, c, d = self.linear
        inv = Isometry(a, c, b, d, self.scale_exp)
        tx, ty = inv._apply_linear((self.tx, self.ty))
        return Isometry(a, c, b, d, self.scale_exp, -tx, -ty).canonical()


def compose(g: Isometry, h: Isometry) -> Isometry:
    return g.compose(h)


def apply(g: Isometry, p: ExactPoint) -> ExactPoint:
    return g.apply(p)


# ---------------------------------------------------------------------------
# exact polygon predicates


def _orient(a: Vec, b: Vec, c: Vec) -> Fraction:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def polygon_area2(poly: Sequence[Vec]) -> Fraction:
    """Twice the signed area (shoelace)."""
    s = Fraction(0)
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def clip_convex(subject: Sequence[Vec], clipper: Sequence[Vec]) -> list[Vec]:
    """Sutherland-Hodgman clip of a convex subject by a convex CCW clipper."""
    if polygon_area2(clipper) < 0:
        clipper = list(reversed(clipper))
    output = list(subject)
    if polygon_area2(output) < 0:
        output = list(reversed(output))
    m = len(clipper)
    for i in range(m):
        if not output:
            return []
        a = clipper[i]
        b = clipper[(i + 1) % m]
        inputs = output
        output = []
        n = len(inputs)
        for j in range(n):
            p = inputs[j]
            q = inputs[(j + 1) % n]
            side_p = _orient(a, b, p)
            side_q = _orient(a, b, q)
            if side_p >= 0:
                output.append(p)
            if (side_p > 0 and side_q < 0) or (side_p < 0 and side_q > 0):
                # exact intersection of pq with line ab
                t = side_p / (side_p - side_q)
                output.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return output


def intersection_area2(p: Sequence[Vec], q: Sequence[Vec]) -> Fraction:
    clipped = clip_convex(p, q)
    if len(clipped) < 3:
        return Fraction(0)
    return abs(polygon_area2(clipped))


@dataclass(frozen=True)
class Triangle:
    a: ExactPoint
    b: ExactPoint
    c: ExactPoint

    @staticmethod
    def of(a, b, c) -> "Triangle":
        return Triangle(ExactPoint.of(*a), ExactPoint.of(*b), ExactPoint.of(*c))

    def vertices(self) -> list[Vec]:
        return [self.a.as_tuple(), self.b.as_tuple(), self.c.as_tuple()]

    def area2(self) -> Fraction:
        return abs(polygon_area2(self.vertices()))

    def is_degenerate(self) -> bool:
        return _orient(*self.vertices()) == 0

    def side_lengths_squared(self) -> list[Fraction]:
        v = self.vertices()
        out = []
        for i in range(3):
            dx = v[i][0] - v[(i + 1) % 3][0]
            dy = v[i][1] - v[(i + 1) % 3][1]
            out.append(dx * dx + dy * dy)
        return sorted(out)


@dataclass
class CoverReport:
    ok: bool
    failures: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _contains_convex(poly: Sequence[Vec], p: Vec) -> bool:
    n = len(poly)
    sign = 0
    for i in range(n):
        o = _orient(poly[i], poly[(i + 1) % n], p)
        if o == 0:
            continue
        s = 1 if o > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def exact_cover_check(parent: Triangle, children: Iterable[Triangle]) -> CoverReport:
    """Exact test that ``children`` tile ``parent``.

    Checks (all in rational arithmetic): non-degeneracy, area balance,
    containment of every child in the (convex) parent, and vanishing
    pairwise interior overlap via convex clipping.
    """
    kids = list(children)
    failures: list[str] = []
    pv = parent.vertices()
    if parent.is_degenerate():
        failures.append("parent is degenerate")
    total = Fraction(0)
    for i, t in enumerate(kids):
        if t.is_degenerate():
            failures.append(f"child {i} is degenerate")
            continue
        total += t.area2()
        if not all(_contains_convex(pv, v) for v in t.vertices()):
            failures.append(f"child {i} not contained in parent")
    if total != parent.area2():
        failures.append(f"area mismatch: children {total}/2, parent {parent.area2()}/2")
    for i in range(len(kids)):
        for j in range(i + 1, len(kids)):
            if intersection_area2(kids[i].vertices(), kids[j].vertices()) != 0:
                failures.append(f"children {i},{j} overlap with positive area")
    return CoverReport(not failures, failures)
