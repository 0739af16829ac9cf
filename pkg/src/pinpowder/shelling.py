"""Square-lattice shelling numbers and coincidence sublattice indices.

The number of Z^2 points on the circle of squared radius n is 4*a(n)
for n > 0, where a is the multiplicative ideal-count function of the
Gaussian integers.  Coincidence rotations are parametrised by primitive
Gaussian integers z = a+bi of odd norm, acting as the rational rotation
z/zbar; the intersection Z^2 with the rotated copy is computed by exact
integer lattice intersection.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import IO

_SIEVE_LIMIT = 1 << 16


class NonPrimitiveRotation(Exception):
    pass


@lru_cache(maxsize=1)
def _small_primes() -> list[int]:
    sieve = bytearray([1]) * _SIEVE_LIMIT
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(_SIEVE_LIMIT) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, f in enumerate(sieve) if f]


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division; valid for n < 2^32."""
    if n < 1:
        raise ValueError("factorize wants n >= 1")
    if n >= _SIEVE_LIMIT * _SIEVE_LIMIT:
        raise ValueError(f"n={n} beyond trial-division range")
    out: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def ideal_count_a(n: int) -> int:
    """Number of Gaussian-integer ideals of norm n (multiplicative)."""
    if n < 1:
        raise ValueError("ideal_count_a wants n >= 1")
    result = 1
    for p, e in factorize(n).items():
        if p == 2:
            continue
        if p % 4 == 1:
            result *= e + 1
        elif e % 2 == 1:  # p = 3 mod 4, odd exponent
            return 0
    return result


def shelling_count_square(r2: int) -> int:
    """Lattice points of Z^2 on the circle of squared radius r2 (0 if empty)."""
    if r2 < 0:
        raise ValueError("squared radius must be >= 0")
    if r2 == 0:
        return 1
    return 4 * ideal_count_a(r2)


def count_circle_bruteforce(r2: int) -> int:
    """Independent enumeration oracle: #{(x,y): x^2+y^2 = r2}."""
    if r2 == 0:
        return 1
    count = 0
    for x in range(isqrt(r2) + 1):
        rest = r2 - x * x
        y = isqrt(rest)
        if y * y == rest:
            if x == 0 or rest == 0:
                count += 2
            else:
                count += 4
    return count


@dataclass(frozen=True)
class ShellTable:
    """Non-empty shells (r^2, count) of Z^2 with r^2 <= cutoff, ascending."""

    r2_max: int
    entries: tuple[tuple[int, int], ...]

    def counts_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r_squared", "count"])
        for r2, count in self.entries:
            writer.writerow([r2, count])


def enumerate_shells(r2_max: int) -> ShellTable:
    if r2_max < 1:
        raise ValueError("r2_max must be >= 1")
    entries = []
    for r2 in range(r2_max + 1):
        c = shelling_count_square(r2)
        if c > 0:
            entries.append((r2, c))
    return ShellTable(r2_max, tuple(entries))


# ---------------------------------------------------------------------------
# coincidence site lattices


@dataclass(frozen=True)
class GaussianRotation:
    """Primitive Gaussian integer a+bi of odd norm.

    Acts on the plane as the rational rotation (a+bi)/(a-bi), i.e. the
    matrix [[a^2-b^2, -2ab], [2ab, a^2-b^2]] / (a^2+b^2).  For (2,1) this
    is the rotation (3+4i)/5 familiar from the square-lattice coincidence
    problem.
    """

    a: int
    b: int

    def __post_init__(self):
        n = self.norm
        if n == 0:
            raise NonPrimitiveRotation("zero is not a rotation")
        if gcd(self.a, self.b) != 1:
            raise NonPrimitiveRotation(f"({self.a},{self.b}) is not primitive")
        if n % 2 == 0:
            raise NonPrimitiveRotation(f"norm {n} is even")

    @property
    def norm(self) -> int:
        return self.a * self.a + self.b * self.b

    def rotation_matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        n = self.norm
        p = self.a * self.a - self.b * self.b
        q = 2 * self.a * self.b
        return ((Fraction(p, n), Fraction(-q, n)), (Fraction(q, n), Fraction(p, n)))

    def angle(self) -> float:
        import math

        return 2.0 * math.atan2(self.b, self.a)


def _hnf_kernel_2x4(rows: list[list[int]]) -> list[list[int]]:
    """Integer kernel basis of a 2x4 matrix via column reduction.

    Column-reduces [A; I] so that A gains trailing zero columns; the
    corresponding columns of the I-block generate ker A over Z.
    """
    a = [list(r) for r in rows]
    ncols = 4
    u = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    col = 0
    for row in range(2):
        # find pivot column with nonzero entry at `row`
        piv = None
        for j in range(col, ncols):
            if a[row][j] != 0:
                piv = j
                break
        if piv is None:
            continue
        # swap into position
        for r in range(2):
            a[r][col], a[r][piv] = a[r][piv], a[r][col]
        for r in range(ncols):
            u[r][col], u[r][piv] = u[r][piv], u[r][col]
        # gcd-eliminate the remaining columns against the pivot
        changed = True
        while changed:
            changed = False
            for j in range(col + 1, ncols):
                if a[row][j] == 0:
                    continue
                q = a[row][j] // a[row][col]
                if q:
                    for r in range(2):
                        a[r][j] -= q * a[r][col]
                    for r in range(ncols):
                        u[r][j] -= q * u[r][col]
                if a[row][j] != 0:
                    # swap to continue the Euclidean reduction
                    for r in range(2):
                        a[r][col], a[r][j] = a[r][j], a[r][col]
                    for r in range(ncols):
                        u[r][col], u[r][j] = u[r][j], u[r][col]
                    changed = True
        col += 1
    kernel = []
    for j in range(ncols):
        if a[0][j] == 0 and a[1][j] == 0:
            kernel.append([u[r][j] for r in range(ncols)])
    return kernel


def intersect_lattices(basis_u: list[list[int]], basis_v: list[list[int]]) -> list[list[int]]:
    """Basis of (U Z^2) intersect (V Z^2) for integer column bases U, V."""
    u00, u01 = basis_u[0]
    u10, u11 = basis_u[1]
    v00, v01 = basis_v[0]
    v10, v11 = basis_v[1]
    rows = [[u00, u01, -v00, -v01], [u10, u11, -v10, -v11]]
    kern = _hnf_kernel_2x4(rows)
    if len(kern) != 2:
        raise ArithmeticError("lattice intersection kernel has wrong rank")
    vecs = []
    for k in kern:
        c0, c1 = k[0], k[1]
        vecs.append([u00 * c0 + u01 * c1, u10 * c0 + u11 * c1])
    return vecs


def lattice_index(basis: list[list[int]]) -> int:
    """Index of the integer lattice spanned by basis columns inside Z^2."""
    det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]
    if det == 0:
        raise ArithmeticError("degenerate lattice")
    return abs(det)


def csl_index(rot: GaussianRotation) -> int:
    """Index of Theta = Z^2 intersect R Z^2 for the rational rotation of ``rot``.

    Computed by exact lattice intersection: R Z^2 = (1/n) P Z^2 with the
    integer similarity P, so Theta = (n Z^2 intersect P Z^2) / n.
    """
    n = rot.norm
    p = rot.a * rot.a - rot.b * rot.b
    q = 2 * rot.a * rot.b
    pmat = [[p, -q], [q, p]]
    nmat = [[n, 0], [0, n]]
    big = intersect_lattices(nmat, pmat)
    # divide the intersection basis by n to return to Theta itself
    theta = [[v[0] // n, v[1] // n] for v in big]
    for v, w in zip(big, theta):
        if [w[0] * n, w[1] * n] != v:
            raise ArithmeticError("intersection basis not divisible by n")
    return lattice_index(theta)


def csl_membership_fraction(rot: GaussianRotation, box: int) -> Fraction:
    """Brute-force oracle: fraction of Z^2 points in [-box,box]^2 lying in R Z^2."""
    (r00, r01), (r10, r11) = rot.rotation_matrix()
    # inverse rotation is the transpose
    hits = 0
    total = 0
    for x in range(-box, box + 1):
        for y in range(-box, box + 1):
            total += 1
            u = r00 * x + r10 * y
            v = r01 * x + r11 * y
            if u.denominator == 1 and v.denominator == 1:
                hits += 1
    return Fraction(hits, total)
