import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trak.dyadic import (
    ZETA_MAX,
    ZETA_MIN,
    BitSequence,
    DyadicError,
    alpha_m,
    alpha_parts,
    certified_min_sums,
    completion_min_sums,
    dyadic_pressure,
    extremal_sums,
    harmonic_block,
    harmonic_bound,
    zeta,
    zeta_bracket,
    zeta_n,
)


def cylinder_point(p, n, left, right):
    return BitSequence({s: (p >> s) & 1 for s in range(n)}, left, right)


bit_sequences = st.builds(
    BitSequence,
    st.dictionaries(st.integers(-12, 12), st.integers(0, 1), max_size=20),
    st.integers(0, 1),
    st.integers(0, 1),
)


def test_parse_bit_strings():
    x = BitSequence.from_string("1|01.1|0")
    assert [x[i] for i in range(-4, 3)] == [1, 1, 0, 1, 1, 0, 0]
    assert [BitSequence.from_string("1.01")[i] for i in (-1, 0, 1, 2)] == [1, 0, 1, 0]
    for bad in ("1|01|0", "2|0.1|0", "0.12", "a|b|c|d"):
        with pytest.raises(DyadicError):
            BitSequence.from_string(bad)


def test_shift_translates_indices():
    x = BitSequence.from_string("1|0110.101|0")
    for a in (-3, 0, 2, 5):
        y = x.shift(a)
        assert all(y[i] == x[i + a] for i in range(-12, 12))


def test_alpha_all_ones():
    x = BitSequence({}, 1, 1)
    for m in (2, 5, 30, 100):
        expected = math.log2(2 ** (m + 1) - 1) - math.log2(2**m - 1)
        assert alpha_parts(x, m) == (2 ** (m + 1) - 1, 2**m - 1, 1)
        assert math.isclose(alpha_m(x, m), expected, rel_tol=1e-15)
    assert abs(alpha_m(x, 60) - 1) < 1e-15


def test_alpha_on_the_log3_family():
    x = BitSequence({-1: 1, 0: 1})
    for m in range(2, 40):
        l, k, d = alpha_parts(x, m)
        assert (l, k, d) == (3 * 2 ** (m - 1), 2 ** (m - 1), 1)
        assert abs(alpha_m(x, m) - math.log2(3)) <= 1e-14


def test_alpha_errors():
    with pytest.raises(DyadicError):
        alpha_parts(BitSequence({-2: 1, 0: 1}), 2)
    with pytest.raises(DyadicError):
        alpha_parts(BitSequence({1: 1}), 5)


@given(bit_sequences, st.integers(1, 40))
def test_alpha_stays_in_range(x, extra):
    try:
        l, k, d = alpha_parts(x, 14 + extra)
    except DyadicError:
        return
    value = math.log2(l / k) / d
    assert ZETA_MIN - 1e-12 <= value <= ZETA_MAX + 1e-12


def test_zeta_special_values():
    assert zeta(BitSequence({-3: 1, -1: 1}, 1, 0)) == zeta(BitSequence({}, 0, 0))
    assert zeta(BitSequence({-3: 1}, 1, 0)).value == 1.0
    assert zeta(BitSequence({2: 1}, 0, 1)).value == 1.0
    v = zeta(BitSequence({-1: 1, 0: 1}), tol=1e-12)
    assert abs(v.value - math.log2(3)) <= 1e-12
    alternating = BitSequence({i: int(i % 2 == 0) for i in range(-40, 41)}, 1, 1)
    # finite windows only approximate the periodic sequence; bound the truncation
    assert abs(zeta(alternating, 1e-12).value - 1) < 1e-9


def test_zeta_below_one_and_range_extremes():
    assert math.isclose(zeta(BitSequence.from_string("1|1.01|0")).value, math.log2(3) / 2, abs_tol=1e-12)
    assert math.isclose(zeta(BitSequence.from_string("1|1.001|0")).value, ZETA_MIN, abs_tol=1e-12)
    assert ZETA_MIN < 1


@given(bit_sequences)
def test_zeta_range(x):
    v = zeta(x, 1e-12)
    assert ZETA_MIN - 1e-11 <= v.value <= ZETA_MAX + 1e-11


@given(bit_sequences, st.integers(0, 30))
def test_brackets_contain_the_limit(x, m_extra):
    try:
        i0 = next(i for i in range(1, 40) if x[-i])
        lo, hi = zeta_bracket(x, i0 + 1 + m_extra)
    except (StopIteration, DyadicError):
        return
    v = zeta(x, 1e-13)
    assert lo - 1e-12 <= v.value <= hi + 1e-12


@given(bit_sequences, st.integers(0, 12))
def test_continuity_modulus(x, m):
    # sequences agreeing on [-m', i1] with m' = i0 + m differ by at most the bracket width
    try:
        i0 = next(i for i in range(1, 40) if x[-i])
        l, k, d = alpha_parts(x, i0 + 1 + m)
    except (StopIteration, DyadicError):
        return
    mm = i0 + 1 + m
    rng = random.Random(hash((tuple(sorted(x.window.items())), m)))
    win = {i: x[i] for i in range(-mm, 20)}
    for i in range(-mm - 10, -mm):
        win[i] = rng.randint(0, 1)
    y = BitSequence(win, rng.randint(0, 1), x.default_right)
    bound = math.log2(1 + 1 / k) / d
    assert abs(zeta(x, 1e-13).value - zeta(y, 1e-13).value) <= bound + 1e-12


def test_zeta_n_basics():
    x = BitSequence.from_string("1|0110.101|0")
    assert zeta_n(x, 1) == zeta(x, 1e-13).value
    with pytest.raises(DyadicError):
        zeta_n(x, 0)


@given(bit_sequences, st.integers(1, 6), st.integers(1, 6))
def test_birkhoff_sums_are_shift_compatible(x, a, b):
    assert abs(zeta_n(x, a + b) - (zeta_n(x, a) + zeta_n(x.shift(a), b))) <= 1e-12


@given(bit_sequences, st.integers(1, 10))
def test_birkhoff_sums_lower_bound(x, n):
    assert zeta_n(x, n) >= n * ZETA_MIN - 1e-11


def test_extremal_completion_identity():
    # ones on the left, zeros on the right: zeta_n = log2(p + 1) + n - 1 - j, or n for p = 0
    for n in range(1, 8):
        sums = extremal_sums(n)
        for p in range(2**n):
            direct = zeta_n(cylinder_point(p, n, 1, 0), n)
            closed = n if p == 0 else math.log2(p + 1) + n - 1 - (p.bit_length() - 1)
            assert abs(direct - closed) < 1e-10
            assert abs(sums[p] - closed) < 1e-10


def test_telescoping_with_log_p_fails_beyond_p_one():
    n = 6
    sums = extremal_sums(n)
    j = np.array([max(p.bit_length() - 1, 0) for p in range(2**n)])
    claimed = np.log2(np.maximum(np.arange(2**n), 1)) + n - j
    assert (sums[1:2] >= claimed[1:2] - 1e-12).all()
    assert (sums[2:] < claimed[2:]).any()


def test_cylinder_minima_bracket_brute_force():
    rng = random.Random(0)
    for n in range(1, 6):
        cert = certified_min_sums(n)
        comp = completion_min_sums(n)
        for p in range(2**n):
            assert cert[p] <= comp[p] + 1e-12
            for _ in range(25):
                left = {-i: rng.randint(0, 1) for i in range(1, 6)}
                right = {n + i: rng.randint(0, 1) for i in range(6)}
                win = {s: (p >> s) & 1 for s in range(n)} | left | right
                z = BitSequence(win, rng.randint(0, 1), rng.randint(0, 1))
                assert zeta_n(z, n, 1e-13) >= cert[p] - 1e-9


def test_harmonic_blocks_are_bracketed():
    for j in range(0, 16):
        h = harmonic_block(j)
        assert Fraction(math.log(2)) - Fraction(1, 2**j) <= h <= Fraction(math.log(2)) + Fraction(1, 2**j)
    exact = sum(harmonic_block(j) * Fraction(1, 2 ** (10 - j)) for j in range(10))
    assert math.isclose(harmonic_bound(10), float(exact), rel_tol=1e-14)


def test_dyadic_pressure_bracket_and_rate():
    prev = None
    for n in range(8, 21, 4):
        dp = dyadic_pressure(n)
        assert dp.Z_lower <= dp.Z_upper
        assert dp.Z_extremal <= dp.Z_lower * (1 + 1e-12)
        if prev is not None:
            assert abs(dp.rate) < abs(prev.rate)
        prev = dp
    assert abs(prev.rate) <= 0.15
    with pytest.raises(DyadicError):
        dyadic_pressure(25)
    with pytest.raises(DyadicError):
        dyadic_pressure(0)


def test_dyadic_pressure_below_harmonic_bound():
    for n in (1, 4, 8, 12):
        dp = dyadic_pressure(n)
        assert dp.Z_upper <= dp.harmonic
