"""The dyadic roof function on the two-sided 0/1 shift.

For a sequence ``x`` with a one at some negative index and a one at some
nonnegative index, let ``i0 > 0`` and ``i1 >= 0`` be the nearest such indices
(``x[-i0] = x[i1] = 1``).  Reading ``x[-m..i1]`` and ``x[-m..-i0]`` as binary
numbers ``l`` and ``k`` gives ``alpha_m = log2(l / k) / (i0 + i1)``, and
``zeta`` is the limit as ``m`` grows.  Otherwise ``zeta = 1``.

Since ``x`` vanishes strictly between ``-i0`` and ``i1``, ``l = k + 2^(m+i1)``.
Writing ``k = 2^m K`` with ``K`` the value of the left half read as a binary
fraction, ``alpha_m = log2(1 + 2^i1 / K) / (i0 + i1)``.  With ``d = i0 + i1``
and ``2^-i0 <= K <= 2^(1-i0)`` (the upper end reached by a left tail of
ones) this lies in ``[log2(1 + 2^(d-1)) / d, log2(1 + 2^d) / d]``, so every
value is at most ``log2 3`` and at least ``log2(5) / 3`` (the minimum over
``d`` of the left end, at ``d = 3``).  Values below 1 do occur: ones
everywhere left of 0, then ``x[0] = 0, x[1] = 1`` gives ``log2(3) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

ZETA_MAX = math.log2(3)
ZETA_MIN = math.log2(5) / 3


class DyadicError(ValueError):
    pass


@dataclass(frozen=True)
class BitSequence:
    """A two-sided 0/1 sequence equal to constant tails outside a window.

    ``window`` maps indices to bits; indices left of the window's smallest key
    take ``default_left`` and indices right of its largest key take
    ``default_right``.  An empty window splits at index 0.
    """

    window: Mapping[int, int] = field(default_factory=dict)
    default_left: int = 0
    default_right: int = 0

    def __post_init__(self):
        w = {int(i): int(b) for i, b in self.window.items()}
        if any(b not in (0, 1) for b in w.values()) or self.default_left not in (0, 1) or self.default_right not in (0, 1):
            raise DyadicError("bits must be 0 or 1")
        object.__setattr__(self, "window", w)

    @property
    def lo(self) -> int:
        return min(self.window) if self.window else 0

    @property
    def hi(self) -> int:
        return max(self.window) if self.window else -1

    def __getitem__(self, i: int) -> int:
        if i in self.window:
            return self.window[i]
        if i < self.lo:
            return self.default_left
        if i > self.hi:
            return self.default_right
        return 0

    def shift(self, a: int) -> "BitSequence":
        """The shifted sequence ``y[i] = x[i + a]``."""
        lo, hi = self.lo, self.hi
        win = {i - a: self[i] for i in range(lo, hi + 1)}
        return BitSequence(win, self.default_left, self.default_right)

    @classmethod
    def from_string(cls, text: str) -> "BitSequence":
        """Parse ``"L|bits.bits|R"``: tails, then the window split at index 0.

        Example: ``"1|01.1|0"`` has ones to the left, ``x[-2] = 0``,
        ``x[-1] = 1``, ``x[0] = 1`` and zeros to the right.  The tails may be
        omitted (``"01.1"``), defaulting to 0.
        """
        parts = text.strip().split("|")
        if len(parts) == 1:
            left, core, right = "0", parts[0], "0"
        elif len(parts) == 3:
            left, core, right = parts
        else:
            raise DyadicError(f"cannot parse bit sequence {text!r}")
        if "." not in core:
            raise DyadicError("the window needs a '.' before index 0")
        neg, pos = core.split(".")
        win = {}
        for k, ch in enumerate(reversed(neg)):
            win[-(k + 1)] = int(ch)
        for k, ch in enumerate(pos):
            win[k] = int(ch)
        if any(ch not in "01" for ch in neg + pos + left + right) or len(left) != 1 or len(right) != 1:
            raise DyadicError(f"cannot parse bit sequence {text!r}")
        return cls(win, int(left), int(right))


def _nearest_ones(x: BitSequence) -> tuple[int, int] | None:
    """``(i0, i1)`` or ``None`` when one side has no ones at all."""
    i1 = None
    for i in range(0, max(x.hi, 0) + 2):
        if x[i]:
            i1 = i
            break
    i0 = None
    for i in range(1, max(-x.lo, 0) + 2):
        if x[-i]:
            i0 = i
            break
    if i0 is None or i1 is None:
        return None
    return i0, i1


def _left_int(x: BitSequence, m: int, stop: int) -> int:
    """``sum x[t] 2^(t+m)`` over ``-m <= t <= stop``."""
    v = 0
    for t in range(stop, -m - 1, -1):
        v = 2 * v + x[t]
    return v


def alpha_parts(x: BitSequence, m: int) -> tuple[int, int, int]:
    """Exact ``(l, k, i0 + i1)`` for the approximant of order ``m``."""
    ones = _nearest_ones(x)
    if ones is None:
        raise DyadicError("zeta is constant 1 on this sequence; alpha_m is undefined")
    i0, i1 = ones
    if m <= i0:
        raise DyadicError(f"m must exceed i0 = {i0}")
    l = _left_int(x, m, i1)
    k = _left_int(x, m, -i0)
    return l, k, i0 + i1


def alpha_m(x: BitSequence, m: int) -> float:
    l, k, d = alpha_parts(x, m)
    return (math.log2(l) - math.log2(k)) / d


@dataclass(frozen=True)
class DyadicValue:
    value: float
    error_bound: float

    @property
    def interval(self) -> tuple[float, float]:
        return self.value - self.error_bound, self.value + self.error_bound


def zeta_bracket(x: BitSequence, m: int) -> tuple[float, float]:
    """Interval containing ``zeta(x)`` from the order-``m`` data.

    Extending the window by ``u`` digits replaces ``(l, k)`` with
    ``(2^u l + q, 2^u k + q)`` for some ``0 <= q < 2^u``, and
    ``t -> log2(l + t) - log2(k + t)`` decreases, so the limit lies between
    the values at ``t = 1`` and ``t = 0``.
    """
    l, k, d = alpha_parts(x, m)
    return math.log2((l + 1) / (k + 1)) / d, math.log2(l / k) / d


def zeta(x: BitSequence, tol: float = 1e-12) -> DyadicValue:
    """The dyadic roof function, certified to within ``tol``."""
    if tol <= 0:
        raise DyadicError("tol must be positive")
    ones = _nearest_ones(x)
    if ones is None:
        return DyadicValue(1.0, 0.0)
    i0, _ = ones
    # the bracket width is at most log2(1 + 1/k) / d <= 2^-(m - i0) / ln 2
    m = i0 + 1
    while True:
        lo, hi = zeta_bracket(x, m)
        if (hi - lo) / 2 <= tol:
            return DyadicValue((lo + hi) / 2, (hi - lo) / 2)
        m += max(1, int(math.log2(max((hi - lo) / tol, 2))))


def zeta_n(x: BitSequence, n: int, tol: float = 1e-13) -> float:
    """Birkhoff sum ``zeta(x) + zeta(shift x) + ... + zeta(shift^(n-1) x)``."""
    if n < 1:
        raise DyadicError("n must be at least 1")
    return math.fsum(zeta(x.shift(i), tol).value for i in range(n))


# -- cylinder sums -------------------------------------------------------------


def harmonic_block(j: int) -> Fraction:
    """``sum 1/i`` over ``2^j <= i < 2^(j+1)``, exactly."""
    return sum((Fraction(1, i) for i in range(2**j, 2 ** (j + 1))), Fraction(0))


def harmonic_bound(n: int) -> float:
    """``sum_j harmonic_block(j) 2^-(n-j)`` over ``0 <= j < n``, in floating point."""
    total = []
    for j in range(n):
        block = math.fsum(1.0 / np.arange(2**j, 2 ** (j + 1), dtype=float))
        total.append(block * 2.0 ** (j - n))
    return math.fsum(total)


def _phi(d):
    """Least ``zeta`` when the nearest ones are ``d`` apart: ``log2(1 + 2^(d-1)) / d``."""
    d = np.asarray(d, dtype=float)
    return np.log2(1.0 + np.exp2(d - 1.0)) / d


_GRID = 64  # beyond this both one-parameter minimizations are increasing towards 1


@lru_cache(maxsize=4)
def _bit_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index of the top and of the lowest one of every ``v < 2^n`` (0 for ``v = 0``)."""
    v = np.arange(2**n, dtype=np.int64)
    top = np.zeros(v.size, dtype=np.int64)
    for k in range(1, n):
        top[v >= (1 << k)] = k
    low = top[v & -v]
    top.flags.writeable = False
    low.flags.writeable = False
    return top, low


@lru_cache(maxsize=16)
def _head(n: int, tail: float, left_top: int) -> np.ndarray:
    """Sum of ``zeta(shift^s z)`` over ``s`` up to the top one ``j`` of the window.

    ``z`` is the cylinder point whose left tail reads ``tail`` as a binary
    fraction with its top one at ``left_top`` (``tail = 0`` for no ones).
    These terms do not see the right tail.  Writing ``P`` for the window bits
    below ``s``, ``f`` for the first one at or after ``s`` and ``h`` for the
    last one before ``s``, the term is ``log2(1 + 2^f / (P + tail)) / (f - h)``.
    """
    p = np.arange(2**n, dtype=np.int64)
    top_bit, low_bit = _bit_tables(n)
    out = np.zeros(p.size)
    for s in range(n):
        low = p & ((1 << s) - 1)
        high = p >> s
        live = high != 0
        f = s + low_bit[high]
        h = np.where(low != 0, top_bit[low], left_top)
        c = low + tail
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = np.log2(1.0 + np.exp2(f.astype(float)) / c) / (f - h)
        out += np.where(live, np.where(c > 0, val, 1.0), 0.0)
    out.flags.writeable = False
    return out


def _tail_terms(n: int, c: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Least ``zeta`` of a shift past the top one ``j``, over right tails.

    With ``c = p + tail`` and the first right one at ``N >= n`` the term is
    ``log2(1 + 2^N / c) / (N - j)``; an all-zero right tail gives the limit 1.
    As a function of ``N`` this falls and then rises, so each entry is
    followed only while it is still falling.
    """
    def term(big, cc, jj):
        with np.errstate(over="ignore"):
            return np.log2(1.0 + np.exp2(big) / cc) / (big - jj)

    prev = term(float(n), c, j)
    best = np.minimum(prev, 1.0)
    idx = np.arange(c.size)
    for r in range(1, _GRID):
        val = term(float(n + r), c[idx], j[idx])
        falling = val < prev
        best[idx] = np.minimum(best[idx], val)
        prev = val[falling]
        idx = idx[falling]
        if idx.size == 0:
            break
    return best


def extremal_sums(n: int) -> np.ndarray:
    """``zeta_n`` at the completion with ones on the left and zeros on the right.

    Telescoping gives ``log2(p + 1) + n - 1 - j`` for the cylinder of ``p``
    with top one ``j``, and ``n`` for the zero cylinder.
    """
    p = np.arange(2**n, dtype=np.int64)
    j = _bit_tables(n)[0]
    rest = np.where(p > 0, n - 1 - j, n)
    return _head(n, 1.0, -1) + rest


def completion_min_sums(n: int, max_left: int = 3) -> np.ndarray:
    """Least ``zeta_n`` per cylinder over a family of explicit completions.

    Left tails: no ones, or a one at ``-a`` followed by ones (``a <= max_left``).
    Right tails: no ones, or a first one at ``n + r`` (``r < 64``).  Every
    value is attained, so ``2^-value`` is a lower bound for the cylinder
    maximum.
    """
    p = np.arange(2**n, dtype=np.int64)
    j = _bit_tables(n)[0]
    best = np.full(p.size, np.inf)
    lefts = [(0.0, 0)] + [(2.0 ** (1 - a), -a) for a in range(1, max_left + 1)]
    for tail, top in lefts:
        head = _head(n, tail, top)
        c = p + tail
        past = np.where(p > 0, n - 1 - j, 0) * _tail_terms(n, np.where(c > 0, c, 1.0), j)
        total = head + past
        if tail > 0:
            # zero cylinder: every shift sees the left one at -a and the first right one
            d = np.arange(n, n + _GRID) - top
            zero = n * min(1.0, float(np.min(np.log2(1.0 + np.exp2(np.arange(n, n + _GRID, dtype=float)) / tail) / d)))
        else:
            zero = float(n)
        total[0] = zero
        best = np.minimum(best, total)
    return best


def certified_min_sums(n: int) -> np.ndarray:
    """Lower bound for ``zeta_n`` on each cylinder, over all completions.

    The terms are minimized separately.  Shifts with a window one on both
    sides are smallest when the left tail is all ones.  Shifts left of the
    lowest window one ``b`` see only the left tail and the one at ``b``;
    their ``zeta`` is at least ``phi(b + a)`` for a left one at ``-a``.
    Shifts past the top one ``j`` see the right tail, bounded as in
    ``_tail_terms`` with the left tail at its largest.
    """
    p = np.arange(2**n, dtype=np.int64)
    j, b = _bit_tables(n)
    inner = _head(n, 1.0, -1)
    # remove the extremal values of the shifts s <= b, whose left side is the tail alone
    ones_left = np.log2(1.0 + np.exp2(b.astype(float))) / (b + 1)
    inner = inner - np.where(p > 0, (b + 1) * ones_left, 0.0)
    phi_min = np.array([min(1.0, float(np.min(_phi(np.arange(k + 1, k + 1 + _GRID))))) for k in range(n)])
    front = np.where(p > 0, (b + 1) * phi_min[np.minimum(b, n - 1)], 0.0)
    past = np.where(p > 0, n - 1 - j, 0) * _tail_terms(n, (p + 1).astype(float), j)
    total = inner + front + past
    total[0] = n * min(1.0, float(np.min(_phi(np.arange(n + 1, n + 1 + _GRID)))))
    return total


@dataclass(frozen=True)
class DyadicPressure:
    """Bracket for ``Z_n`` of the potential ``-zeta log 2`` on ``n``-cylinders.

    ``Z_extremal`` sums ``2^-zeta_n`` at the completion with ones on the left
    and zeros on the right; it is a lower bound like ``Z_lower``, which takes
    the best explicit completion.  ``Z_upper`` is certified over all
    completions.  Rates are ``log2(Z) / n``.
    """

    n: int
    Z_lower: float
    Z_upper: float
    Z_extremal: float
    harmonic: float

    @property
    def rate(self) -> float:
        return math.log2(self.Z_upper) / self.n

    @property
    def rate_lower(self) -> float:
        return math.log2(self.Z_lower) / self.n


def dyadic_pressure(n: int) -> DyadicPressure:
    if not 1 <= n <= 24:
        raise DyadicError("n must lie in 1..24")
    ext = math.fsum(np.exp2(-extremal_sums(n)))
    low = math.fsum(np.exp2(-completion_min_sums(n)))
    up = math.fsum(np.exp2(-certified_min_sums(n)))
    return DyadicPressure(n, low, up, ext, harmonic_bound(n))
