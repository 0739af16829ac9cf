import io
from fractions import Fraction
from math import gcd, isqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinpowder.shelling import (
    GaussianRotation,
    NonPrimitiveRotation,
    count_circle_bruteforce,
    csl_index,
    csl_membership_fraction,
    enumerate_shells,
    ideal_count_a,
    intersect_lattices,
    lattice_index,
    shelling_count_square,
)


def _circle_counts_array(n_max: int) -> np.ndarray:
    """Vectorised enumeration of #{(x,y): x^2+y^2 = n} for all n <= n_max."""
    counts = np.zeros(n_max + 1, dtype=np.int64)
    lim = isqrt(n_max)
    for x in range(-lim, lim + 1):
        rest = n_max - x * x
        if rest < 0:
            continue
        ylim = isqrt(rest)
        ys = np.arange(-ylim, ylim + 1)
        np.add.at(counts, x * x + ys * ys, 1)
    return counts


def test_ideal_count_examples():
    assert ideal_count_a(1) == 1
    assert ideal_count_a(5) == 2
    assert ideal_count_a(9) == 1
    assert ideal_count_a(3) == 0
    assert ideal_count_a(25) == 3
    assert ideal_count_a(2) == 1


def test_shelling_count_examples():
    assert shelling_count_square(0) == 1
    assert shelling_count_square(1) == 4
    assert shelling_count_square(5) == 8
    assert shelling_count_square(25) == 12
    assert shelling_count_square(3) == 0


def test_shelling_vs_bruteforce_small():
    for r2 in range(0, 2000):
        assert shelling_count_square(r2) == count_circle_bruteforce(r2), r2


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=1, max_value=100), st.integers(min_value=1, max_value=100))
def test_multiplicativity(m, n):
    if gcd(m, n) == 1:
        assert ideal_count_a(m * n) == ideal_count_a(m) * ideal_count_a(n)


def test_enumerate_shells_examples():
    assert enumerate_shells(2).entries == ((0, 1), (1, 4), (2, 4))
    assert enumerate_shells(5).entries == ((0, 1), (1, 4), (2, 4), (4, 4), (5, 8))


def test_shell_partial_sums_gauss_circle():
    table = enumerate_shells(10000)
    counts = _circle_counts_array(10000)
    running = 0
    cum = {}
    for r2, c in table.entries:
        running += c
        cum[r2] = running
    # compare at every radius <= 100: lattice points in the closed disk
    disk = np.cumsum(counts)
    for radius in range(1, 101):
        r2 = radius * radius
        assert cum[r2] == disk[r2]


def test_shell_csv():
    buf = io.StringIO()
    enumerate_shells(2).write_csv(buf)
    assert buf.getvalue() == "r_squared,count\n0,1\n1,4\n2,4\n"


def test_gaussian_rotation_validation():
    with pytest.raises(NonPrimitiveRotation):
        GaussianRotation(2, 2)
    with pytest.raises(NonPrimitiveRotation):
        GaussianRotation(1, 1)  # even norm
    with pytest.raises(NonPrimitiveRotation):
        GaussianRotation(0, 0)
    GaussianRotation(2, 1)
    GaussianRotation(3, 4)


def test_csl_index_examples():
    assert csl_index(GaussianRotation(1, 0)) == 1
    assert csl_index(GaussianRotation(2, 1)) == 5
    assert csl_index(GaussianRotation(4, 1)) == 17
    assert csl_index(GaussianRotation(3, 2)) == 13
    # (3,4) acts as rotation by twice the (2,1) angle: index is the norm 25
    assert csl_index(GaussianRotation(3, 4)) == 25


def test_csl_index_equals_norm():
    for a, b in [(2, 1), (4, 1), (3, 2), (5, 2), (6, 1), (7, 2)]:
        rot = GaussianRotation(a, b)
        assert csl_index(rot) == rot.norm


def test_csl_index_box_oracle():
    for a, b in [(2, 1), (3, 2)]:
        rot = GaussianRotation(a, b)
        frac = csl_membership_fraction(rot, 40)
        assert abs(float(frac) - 1.0 / csl_index(rot)) < 0.05


def test_intersect_lattices_basic():
    # 2Z^2 intersect 3Z^2 = 6Z^2
    basis = intersect_lattices([[2, 0], [0, 2]], [[3, 0], [0, 3]])
    assert lattice_index(basis) == 36
