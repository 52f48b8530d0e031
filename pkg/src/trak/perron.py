"""Perron roots of nonnegative integer matrices with certified bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class NonPrimitive(ValueError):
    """The matrix has no unique attracting projective class."""


@dataclass(frozen=True)
class PerronRoot:
    value: float
    lower: Fraction
    upper: Fraction
    vector: tuple[float, ...]
    iterations: int

    @property
    def gap(self) -> float:
        return float(self.upper - self.lower)


def _bool_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def is_primitive(m) -> bool:
    """Some power is entrywise positive (Wielandt exponent ``(n-1)^2 + 1``)."""
    a = np.asarray([[x > 0 for x in row] for row in m], dtype=bool)
    n = a.shape[0]
    if n == 0:
        return False
    bound = (n - 1) ** 2 + 1
    power = a.copy()
    k = 1
    while k < bound:
        if power.all():
            return True
        power = _bool_mul(power, power)
        k *= 2
    return bool(power.all())


def is_irreducible(m) -> bool:
    a = np.asarray([[x > 0 for x in row] for row in m], dtype=bool)
    n = a.shape[0]
    reach = a | np.eye(n, dtype=bool)
    for _ in range(max(1, n.bit_length() + 1)):
        reach = _bool_mul(reach, reach)
    return bool(reach.all())


def collatz_wielandt(m, v) -> tuple[Fraction, Fraction]:
    """Exact ``min`` and ``max`` of ``(Mv)_i / v_i`` for a positive vector ``v``."""
    vf = [Fraction(x) for x in v]
    ratios = []
    for row, vi in zip(m, vf):
        s = sum((Fraction(int(a)) * x for a, x in zip(row, vf) if a), Fraction(0))
        ratios.append(s / vi)
    return min(ratios), max(ratios)


def _float_up(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) >= x else math.nextafter(f, math.inf)


def _float_down(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) <= x else math.nextafter(f, -math.inf)


def perron_root(m, rtol: float = 1e-12, max_iter: int = 200_000) -> PerronRoot:
    """Perron root by power iteration, certified by Collatz-Wielandt bounds."""
    if not is_primitive(m):
        raise NonPrimitive("matrix is not primitive")
    big = max(max(int(x) for x in row) for row in m)
    scale = float(big)
    a = np.asarray([[int(x) / scale for x in row] for row in m], dtype=float)
    n = a.shape[0]
    v = np.full(n, 1.0 / n)
    lam = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        w = a @ v
        new_lam = w.sum() / v.sum()
        w /= w.sum()
        done = abs(new_lam - lam) <= rtol * new_lam and np.max(np.abs(w - v)) <= rtol
        v, lam = w, new_lam
        if done:
            break
    lo, hi = collatz_wielandt(m, [Fraction(float(x)) for x in v])
    value = lam * scale
    if Fraction(value) < lo:
        value = _float_up(lo)
    elif Fraction(value) > hi:
        value = _float_down(hi)
    return PerronRoot(value, lo, hi, tuple(float(x) for x in v), it)
