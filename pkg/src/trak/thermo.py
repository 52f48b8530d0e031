"""Roof function bounds, variation, contraction and pressure sums.

The roof of a cylinder ``[x0 ... xn]`` is ``rho = log(|M0 w| / |w|)`` where
``M0`` carries the first split and ``w`` ranges over the measures on ``x1``
that are carried by the rest of the cylinder.  Those measures form the cone
spanned by ``M(x1..xn) r`` over the vertex cycles ``r`` of the last letter, and
``|M0 w| / |w|`` is a ratio of linear forms, so its extremes sit on those
generators.  Birkhoff sums telescope: the sum of ``rho`` along the first ``n``
shifts is ``log(|M(x0..xn) r| / |r|)``.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .moves import CarryingMatrix
from .perron import NonPrimitive, perron_root
from .symbolic import (
    Subshift,
    WordError,
    is_admissible,
    is_primitive_word,
    periodic_words,
    word_count_matrix,
    word_matrix,
)

CYLINDER_GUARD = 10_000_000


class PressureBudgetError(RuntimeError):
    pass


class GibbsPreconditionError(ValueError):
    pass


def _ratio_extremes(first: Sequence[Sequence[int]], gens: Sequence[Sequence[int]]) -> tuple[Fraction, Fraction]:
    """Extremes of ``|first . g| / |g|`` over generator columns ``g``."""
    colsum = [sum(col) for col in zip(*first)]
    ratios = []
    for g in gens:
        den = sum(g)
        if den == 0:
            raise WordError("zero generator: a letter carries an empty cone")
        num = sum(c * x for c, x in zip(colsum, g))
        ratios.append(Fraction(num, den))
    return min(ratios), max(ratios)


def _apply(m: CarryingMatrix | None, vec: Sequence[int]) -> list[int]:
    if m is None:
        return list(vec)
    return [sum(a * x for a, x in zip(row, vec)) for row in m.data]


@dataclass(frozen=True)
class RoofBounds:
    word: tuple[int, ...]
    lower: float
    upper: float
    lower_ratio: Fraction
    upper_ratio: Fraction


def roof_bounds(s: Subshift, word: Sequence[int]) -> RoofBounds:
    """Interval of the roof function on the cylinder spelled by ``word``."""
    word = tuple(word)
    if len(word) < 2:
        raise WordError("roof bounds need a word with at least two letters")
    if not is_admissible(s, word):
        raise WordError("word is not admissible")
    first = s.moves[(word[0], word[1])].matrix
    rest = word_matrix(s, word[1:]) if len(word) > 2 else None
    gens = [_apply(rest, r) for r in s.rays(word[-1])]
    lo, hi = _ratio_extremes(first.data, gens)
    return RoofBounds(word, math.log(lo), math.log(hi), lo, hi)


def birkhoff_bounds(s: Subshift, word: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Exact extremes of ``exp`` of the Birkhoff sum of ``rho`` over the cylinder."""
    mat = word_matrix(s, word)
    return _ratio_extremes(mat.data, s.rays(word[-1]))


def contains_tight_block(s: Subshift, word: Sequence[int], start: int = 0) -> bool:
    """Whether some subword starting at index ``>= start`` is tight."""
    word = tuple(word)
    for i in range(start, len(word) - 1):
        mat = None
        for j in range(i + 1, len(word)):
            step = s.moves[(word[j - 1], word[j])].matrix
            mat = step if mat is None else mat @ step
            if mat.is_positive():
                return True
    return False


def tight_weight_ratio(s: Subshift, word: Sequence[int]) -> Fraction:
    """Least total weight on the first track of a unit measure on the last one."""
    mat = word_matrix(s, word)
    lo, _ = _ratio_extremes(mat.data, s.rays(word[-1]))
    return lo


# -- tight cycles and block systems -----------------------------------------


def _path_back(s: Subshift, start: int, target: int) -> list[int]:
    prev: dict[int, int | None] = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in s.successors(u):
            if v == target:
                path = [v, u]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            if v not in prev:
                prev[v] = u
                queue.append(v)
    raise WordError(f"letter {target} is not reachable from {start}")


def projective_diameter_bound(m: CarryingMatrix) -> Fraction:
    """Largest cross ratio ``M[k][i] M[l][j] / (M[k][j] M[l][i])`` of a positive matrix.

    Below 9 the Birkhoff contraction coefficient is below 1/2.
    """
    d = m.data
    p, q = len(d), len(d[0])
    best = Fraction(0)
    for i in range(q):
        for j in range(q):
            if i == j:
                continue
            hi = max(Fraction(d[k][i], d[k][j]) for k in range(p))
            lo = min(Fraction(d[k][i], d[k][j]) for k in range(p))
            best = max(best, hi / lo)
    return best


def is_contracting(m: CarryingMatrix) -> bool:
    return m.is_positive() and projective_diameter_bound(m) < 9


def tight_cycles(
    s: Subshift, base: int, count: int, seed: int, walk: int = 30, contracting: bool = True, max_tries: int = 10_000
) -> list[tuple[int, ...]]:
    """Distinct closed words at ``base`` whose carrying matrices are positive.

    Each is a random walk of ``walk`` steps closed by a shortest path back to
    ``base``.  With ``contracting`` only words whose matrix has projective
    diameter below ``log 9`` are kept.  Sorted by (length, word).
    """
    rng = random.Random(seed)
    found: set[tuple[int, ...]] = set()
    for _ in range(max_tries):
        w = [base]
        for _ in range(walk):
            w.append(rng.choice(s.successors(w[-1])))
        w += _path_back(s, w[-1], base)[1:]
        cyc = tuple(w[:-1])
        mat = word_matrix(s, cyc, cyclic=True)
        if not mat.is_positive() or (contracting and not is_contracting(mat)):
            continue
        found.add(cyc)
        if len(found) >= count:
            break
    if len(found) < count:
        raise WordError(f"found only {len(found)} tight cycles")
    return sorted(found, key=lambda c: (len(c), c))


@dataclass
class BlockSystem:
    """Full shift on tight cycles at a base letter, with the induced roof.

    A point is a sequence of blocks; its roof is the Birkhoff sum of ``rho``
    over the first block, ``log(|M_b w| / |w|)``.
    """

    subshift: Subshift
    base: int
    blocks: list[tuple[int, ...]]
    matrices: list[CarryingMatrix] = field(init=False)

    def __post_init__(self):
        for b in self.blocks:
            if b[0] != self.base:
                raise WordError("every block must start at the base letter")
        self.matrices = [word_matrix(self.subshift, b, cyclic=True) for b in self.blocks]


# -- variation ---------------------------------------------------------------


@dataclass
class VariationProfile:
    var: list[float]
    theta: float
    r_squared: float
    fit_range: tuple[int, int]


def _gap(lo: Fraction, hi: Fraction) -> float:
    return math.log1p(float((hi - lo) / lo))


def _fit(values: Sequence[float], first: int) -> tuple[float, float]:
    ns = np.arange(first, first + len(values), dtype=float)
    ys = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(ns, ys, 1)
    pred = slope * ns + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return math.exp(slope), r2


def block_variation_profile(system: BlockSystem, n_max: int) -> VariationProfile:
    """``var_n`` of the induced roof over depth-``n`` block cylinders.

    The future cone of a cylinder ``[b1 ... bn]`` is ``M_b2 ... M_bn`` applied
    to the vertex cycles of the base letter; enumeration runs from the right
    so each node costs one matrix product.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    mats = [np.asarray(m.data, dtype=object) for m in system.matrices]
    first_forms = [np.asarray([sum(col) for col in zip(*m.data)], dtype=object) for m in system.matrices]
    base_rays = np.asarray(system.subshift.rays(system.base), dtype=object).T
    var = [0.0] * n_max

    def roof_gap(gens: np.ndarray) -> float:
        den = gens.sum(axis=0)
        worst = 0.0
        for f in first_forms:
            num = f.dot(gens)
            ratios = [Fraction(int(a), int(b)) for a, b in zip(num, den)]
            worst = max(worst, _gap(min(ratios), max(ratios)))
        return worst

    # level k holds the future cones of all suffixes of length k - 1
    var[0] = roof_gap(base_rays)
    level = [base_rays]
    for k in range(2, n_max + 1):
        nxt = []
        worst = 0.0
        for gens in level:
            for m in mats:
                g = m.dot(gens)
                nxt.append(g)
                worst = max(worst, roof_gap(g))
        var[k - 1] = worst
        level = nxt
    first = max(1, n_max // 2)
    theta, r2 = _fit(var[first - 1 :], first)
    return VariationProfile(var, theta, r2, (first, n_max))


def variation_profile(s: Subshift, n_max: int) -> VariationProfile:
    """``var_n`` over letter cylinders of the subshift (small ``n`` only)."""
    s.require_closed()
    if n_max > 20:
        raise ValueError("n_max is limited to 20")
    var = []
    for n in range(1, n_max + 1):
        worst = 0.0
        for word in _words(s, n + 1):
            rb = roof_bounds(s, word)
            worst = max(worst, _gap(rb.lower_ratio, rb.upper_ratio))
        var.append(worst)
    first = max(1, n_max // 2)
    positive = [v for v in var[first - 1 :] if v > 0]
    theta, r2 = _fit(positive, first) if len(positive) >= 2 else (float("nan"), float("nan"))
    return VariationProfile(var, theta, r2, (first, n_max))


def _words(s: Subshift, length: int):
    stack = [(i,) for i in reversed(range(s.size))]
    while stack:
        w = stack.pop()
        if len(w) == length:
            yield w
            continue
        for j in reversed(s.successors(w[-1])):
            stack.append(w + (j,))


def all_words(s: Subshift, length: int):
    """Admissible words of the given length in lexicographic order."""
    return _words(s, length)


# -- contraction -------------------------------------------------------------


def random_measure(rays: Sequence[Sequence[int]], rng: random.Random, denominator_bits: int = 16) -> list[Fraction]:
    """Positive combination of vertex cycles with coefficients ``k / 2^bits``."""
    den = 1 << denominator_bits
    coeffs = [Fraction(rng.randint(1, den), den) for _ in rays]
    vec = [sum((c * r[b] for c, r in zip(coeffs, rays)), Fraction(0)) for b in range(len(rays[0]))]
    tot = sum(vec)
    return [x / tot for x in vec]


def _push(m: CarryingMatrix, v: Sequence[Fraction]) -> list[Fraction]:
    out = [sum((a * x for a, x in zip(row, v) if a), Fraction(0)) for row in m.data]
    tot = sum(out)
    return [x / tot for x in out]


def symmetric_min_ratio(mu: Sequence[Fraction], nu: Sequence[Fraction]) -> Fraction:
    return min(min(a / b, b / a) for a, b in zip(mu, nu))


def sup_norm(alpha: Sequence[Fraction], nu: Sequence[Fraction]) -> Fraction:
    return max(abs(a) / b for a, b in zip(alpha, nu))


def tangent_image(m: CarryingMatrix, nu: Sequence[Fraction], alpha: Sequence[Fraction]) -> list[Fraction]:
    """Derivative of ``v -> Mv / |Mv|`` at ``nu`` applied to ``alpha``."""
    mnu = [sum((a * x for a, x in zip(row, nu) if a), Fraction(0)) for row in m.data]
    malpha = [sum((a * x for a, x in zip(row, alpha) if a), Fraction(0)) for row in m.data]
    t = sum(mnu)
    ta = sum(malpha)
    return [ma / t - ta * mn / (t * t) for ma, mn in zip(malpha, mnu)]


@dataclass
class ContractionReport:
    word: tuple[int, ...]
    trials: int
    strict_increases: int
    fixed_points: int
    violations: int
    delta_hat: Fraction
    kappa_hat: Fraction

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.delta_hat > 0 and self.kappa_hat > 1


def contraction_check(s: Subshift, word: Sequence[int], trials: int, seed: int, cyclic: bool = True) -> ContractionReport:
    """Exact per-trial checks of min-ratio growth and sup-norm contraction.

    Measures live on the end track of the word (the base letter for a closed
    word) and are pushed to its first track.
    """
    word = tuple(word)
    mat = word_matrix(s, word, cyclic=cyclic)
    if not mat.is_positive():
        raise WordError("word is not tight")
    end = word[0] if cyclic else word[-1]
    rays = s.rays(end)
    rng = random.Random(seed)
    strict = fixed = bad = 0
    delta = None
    kappa = None
    for _ in range(trials):
        mu = random_measure(rays, rng)
        nu = random_measure(rays, rng)
        a0 = symmetric_min_ratio(mu, nu)
        a1 = symmetric_min_ratio(_push(mat, mu), _push(mat, nu))
        if a0 == 1:
            fixed += a1 == 1
            bad += a1 != 1
        elif a1 > a0:
            strict += 1
            d = (a1 - a0) / (1 - a0)
            delta = d if delta is None else min(delta, d)
        else:
            bad += 1
        alpha = [a - b for a, b in zip(mu, nu)]
        if any(alpha):
            img = tangent_image(mat, nu, alpha)
            k = sup_norm(alpha, nu) / sup_norm(img, _push(mat, nu))
            kappa = k if kappa is None else min(kappa, k)
    return ContractionReport(word, trials, strict, fixed, bad, delta or Fraction(0), kappa or Fraction(0))


# -- pressure ----------------------------------------------------------------


@dataclass(frozen=True)
class PressureEstimate:
    n: int
    s: float
    Z_lower: float
    Z_upper: float
    cylinders: int

    @property
    def rate_lower(self) -> float:
        return math.log(self.Z_lower) / self.n

    @property
    def rate_upper(self) -> float:
        return math.log(self.Z_upper) / self.n


def cylinder_count(s: Subshift, n: int) -> int:
    """Number of admissible words with ``n`` transitions."""
    return int(word_count_matrix(s, n).sum())


def _cylinder_batches(s: Subshift, n: int, dtype=float, with_words: bool = False):
    """Enumerate ``n``-transition cylinders grouped by first and last letter.

    Yields ``(last, words, full, tail)`` where the rows of ``full`` are the
    column sums of the carrying matrix of the whole word and those of ``tail``
    omit the first step.  ``words`` is ``None`` unless requested.
    """
    step = {k: np.asarray(tr.matrix.data, dtype=dtype) for k, tr in s.moves.items()}
    p = next(iter(step.values())).shape[0]
    ones = np.ones((1, p), dtype=dtype)
    for x0 in range(s.size):
        full = [ones]
        tail = [None]
        last = [np.array([x0])]
        words = [np.array([[x0]])] if with_words else None
        for depth in range(n):
            nf, nt, nl, nw = [], [], [], []
            f_all, l_all = np.concatenate(full), np.concatenate(last)
            t_all = None if depth == 0 else np.concatenate(tail)
            w_all = np.concatenate(words) if with_words else None
            for i in np.unique(l_all):
                sel = l_all == i
                rows = f_all[sel]
                for j in s.successors(int(i)):
                    m = step[(int(i), j)]
                    nf.append(rows @ m)
                    nt.append(np.repeat(ones, rows.shape[0], axis=0) if depth == 0 else t_all[sel] @ m)
                    nl.append(np.full(rows.shape[0], j))
                    if with_words:
                        ws = w_all[sel]
                        nw.append(np.hstack([ws, np.full((ws.shape[0], 1), j)]))
            full, tail, last, words = [np.concatenate(nf)], [np.concatenate(nt)], [np.concatenate(nl)], ([np.concatenate(nw)] if with_words else None)
        f_all, t_all, l_all = full[0], tail[0], last[0]
        w_all = words[0] if with_words else None
        for j in np.unique(l_all):
            sel = l_all == j
            yield int(j), (w_all[sel] if with_words else None), f_all[sel], t_all[sel]


def birkhoff_table(s: Subshift, n: int, guard: int = CYLINDER_GUARD) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper Birkhoff sums of ``rho`` for every ``n``-transition cylinder."""
    s.require_closed()
    if n < 1:
        raise ValueError("n must be at least 1")
    total = cylinder_count(s, n)
    if total > guard:
        raise PressureBudgetError(f"{total} cylinders exceed the enumeration guard {guard}")
    rays = [np.asarray(s.rays(i), dtype=float).T for i in range(s.size)]
    lows, highs = [], []
    for j, _, full, _ in _cylinder_batches(s, n):
        ratios = (full @ rays[j]) / rays[j].sum(axis=0)
        lows.append(np.log(ratios.min(axis=1)))
        highs.append(np.log(ratios.max(axis=1)))
    return np.concatenate(lows), np.concatenate(highs)


@dataclass
class RoofTable:
    """Roof bounds for every cylinder of one length, with exact sign checks."""

    words: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    positive: np.ndarray
    below_cap: np.ndarray


def roof_table(s: Subshift, length: int, guard: int = CYLINDER_GUARD) -> RoofTable:
    """Roof bounds on all cylinders with ``length`` letters.

    ``positive`` says the lower bound is strictly positive and ``below_cap``
    that the upper bound is at most ``p log 2``; both are decided in exact
    integer arithmetic.
    """
    s.require_closed()
    if length < 2:
        raise ValueError("cylinders need at least two letters")
    n = length - 1
    if cylinder_count(s, n) > guard:
        raise PressureBudgetError("too many cylinders")
    p = s.num_branches
    growth = max(max(sum(col) for col in zip(*tr.matrix.data)) for tr in s.moves.values())
    ray_max = max(max(max(r) for r in s.rays(i)) for i in range(s.size))
    exact = growth**n * ray_max * p * (1 << p) < (1 << 62)
    dtype = np.int64 if exact else object
    rays = [np.asarray(s.rays(i), dtype=dtype).T for i in range(s.size)]
    out = {k: [] for k in ("w", "lo", "hi", "pos", "cap")}
    for j, words, full, tail in _cylinder_batches(s, n, dtype=dtype, with_words=True):
        num = full @ rays[j]
        den = tail @ rays[j]
        ratio = num.astype(float) / den.astype(float)
        out["w"].append(words)
        out["lo"].append(np.log(ratio.min(axis=1)))
        out["hi"].append(np.log(ratio.max(axis=1)))
        out["pos"].append((num > den).all(axis=1))
        out["cap"].append((num <= (1 << p) * den).all(axis=1))
    return RoofTable(*(np.concatenate(out[k]) for k in ("w", "lo", "hi", "pos", "cap")))


def tight_words_upto(s: Subshift, max_length: int) -> set[tuple[int, ...]]:
    """All tight admissible words with at most ``max_length`` letters."""
    supports = {k: np.asarray(tr.matrix.data) > 0 for k, tr in s.moves.items()}
    found = set()
    stack = [((i,), None) for i in range(s.size)]
    while stack:
        w, sup = stack.pop()
        if sup is not None and sup.all():
            found.add(w)
        if len(w) == max_length:
            continue
        for j in s.successors(w[-1]):
            step = supports[(w[-1], j)]
            nsup = step if sup is None else (sup.astype(np.int64) @ step.astype(np.int64)) > 0
            stack.append((w + (j,), nsup))
    return found


def pressure(s: Subshift, s_val: float, n: int, guard: int = CYLINDER_GUARD, table=None) -> PressureEstimate:
    """Bounds on ``Z_n`` for the potential ``-s_val * rho``.

    At ``s_val = 0`` every cylinder contributes 1 and ``Z_n`` is the exact
    word count, so no enumeration is needed.
    """
    if s_val == 0:
        count = cylinder_count(s, n)
        return PressureEstimate(n, 0.0, float(count), float(count), count)
    lo, hi = table if table is not None else birkhoff_table(s, n, guard)
    # the weight exp(-s * S) is largest at the smallest Birkhoff sum when s > 0
    a = -s_val * (lo if s_val > 0 else hi)
    b = -s_val * (hi if s_val > 0 else lo)
    z_upper = math.fsum(np.exp(a))
    z_lower = math.fsum(np.exp(b))
    return PressureEstimate(n, float(s_val), z_lower, z_upper, len(lo))


@dataclass(frozen=True)
class ZeroCrossing:
    s_lo: float
    s_hi: float
    at_lo: PressureEstimate
    at_hi: PressureEstimate | None


def pressure_zero(s: Subshift, n: int, s_lo: float = 0.0, s_hi: float = 4.0, tol: float = 1e-3, table=None) -> ZeroCrossing:
    """Bracket ``[s_lo, s_hi]`` with ``Z_lower(s_lo) >= 1 >= Z_upper(s_hi)``.

    Cylinders whose lower Birkhoff sum is zero keep ``Z_upper >= 1`` for every
    multiplier; then ``s_hi`` is infinite and ``at_hi`` is ``None``.
    """
    table = table if table is not None else birkhoff_table(s, n)
    lo_sums, hi_sums = table

    def est(x):
        return pressure(s, x, n, table=table) if x != 0 else pressure(s, 0.0, n)

    if not (hi_sums > 0).all():
        raise ValueError("some cylinder has zero roof everywhere; Z_lower never drops below 1")
    while est(s_hi).Z_lower >= 1:
        s_hi *= 2
    lo_a, lo_b = s_lo, s_hi
    while lo_b - lo_a > tol:
        mid = (lo_a + lo_b) / 2
        if est(mid).Z_lower >= 1:
            lo_a = mid
        else:
            lo_b = mid
    if (lo_sums <= 0).sum() >= 1:
        return ZeroCrossing(lo_a, math.inf, est(lo_a), None)
    while est(s_hi).Z_upper > 1:
        s_hi *= 2
    hi_a, hi_b = lo_a, s_hi
    while hi_b - hi_a > tol:
        mid = (hi_a + hi_b) / 2
        if est(mid).Z_upper <= 1:
            hi_b = mid
        else:
            hi_a = mid
    return ZeroCrossing(lo_a, hi_b, est(lo_a), est(hi_b))


# -- Gibbs windows -----------------------------------------------------------


def parry_measure(a: Sequence[Sequence[int]]) -> Callable[[Sequence[int]], float]:
    """Cylinder masses of the measure of maximal entropy of a transition matrix."""
    arr = np.asarray(a, dtype=float)
    vals, left = np.linalg.eig(arr.T)
    k = int(np.argmax(vals.real))
    lam = float(vals[k].real)
    u = np.abs(left[:, k].real)
    vals_r, right = np.linalg.eig(arr)
    v = np.abs(right[:, int(np.argmax(vals_r.real))].real)
    norm = float(u @ v)

    def mass(word: Sequence[int]) -> float:
        for x, y in zip(word, word[1:]):
            if not arr[x, y]:
                return 0.0
        return float(u[word[0]] * v[word[-1]] / norm / lam ** (len(word) - 1))

    return mass


@dataclass
class GibbsReport:
    constant: float
    ok: bool
    cylinders: int


def gibbs_check(
    s: Subshift,
    h_val: float,
    cyl_measure: Callable[[Sequence[int]], float] | Mapping[tuple[int, ...], float],
    l_max: int,
    roof: str = "rho",
    tol: float = 1e-9,
) -> GibbsReport:
    """Smallest ``c`` with ``c^-1 e^(-h S) <= mass <= c e^(-h S)`` on all cylinders.

    ``S`` is the Birkhoff sum over the cylinder's transitions: the exact
    interval from the roof bounds, or the transition count when
    ``roof="constant"``.
    """
    mass = cyl_measure if callable(cyl_measure) else (lambda w: cyl_measure.get(tuple(w), 0.0))
    singles = [mass((i,)) for i in range(s.size)]
    if abs(sum(singles) - 1) > tol:
        raise GibbsPreconditionError("cylinder masses must form a probability measure")
    c = 1.0
    count = 0
    for length in range(1, l_max + 2):
        for word in _words(s, length):
            m = mass(word)
            if length <= l_max:
                children = sum(mass(word + (j,)) for j in s.successors(word[-1]))
                if abs(children - m) > tol * max(1.0, m):
                    raise GibbsPreconditionError(f"masses are not additive at {word}")
            count += 1
            if length == 1:
                s_lo = s_hi = 0.0
            elif roof == "constant":
                s_lo = s_hi = float(length - 1)
            else:
                lo, hi = birkhoff_bounds(s, word)
                s_lo, s_hi = math.log(lo), math.log(hi)
            if m <= 0:
                return GibbsReport(math.inf, False, count)
            c = max(c, m * math.exp(h_val * s_hi), math.exp(-h_val * s_lo) / m)
    return GibbsReport(c, math.isfinite(c), count)


# -- periodic orbits ---------------------------------------------------------


@dataclass
class OrbitCount:
    table: list[tuple[float, int]]
    exponent: float
    lengths: list[float]
    skipped: int
    max_word_length: int
    complete_below: float


def translation_lengths(s: Subshift, max_len: int, budget: int = 200_000) -> tuple[list[float], int]:
    """Log-dilatations of primitive closed words up to ``max_len`` letters."""
    by_length, skipped = _lengths_by_word_length(s, max_len, budget)
    return sorted(x for xs in by_length.values() for x in xs), skipped


def _lengths_by_word_length(s: Subshift, max_len: int, budget: int) -> tuple[dict[int, list[float]], int]:
    out: dict[int, list[float]] = {}
    skipped = 0
    for n in range(1, max_len + 1):
        out[n] = []
        for w in periodic_words(s, n, budget=budget, primitive_only=True):
            try:
                out[n].append(math.log(perron_root(word_matrix(s, w, cyclic=True).data).value))
            except NonPrimitive:
                skipped += 1
    return out, skipped


def count_orbits(s: Subshift, R: float, step: float, max_len: int, budget: int = 200_000) -> OrbitCount:
    """Primitive closed words binned by translation length ``<= r``.

    Counts are truncated by ``max_len``.  ``complete_below`` is the smallest
    translation length seen at the longest word length, a heuristic radius
    below which longer words are not expected to contribute; the growth
    exponent is fitted on the bins below it (``nan`` with fewer than two).
    """
    s.require_closed()
    by_length, skipped = _lengths_by_word_length(s, max_len, budget)
    lengths = sorted(x for xs in by_length.values() for x in xs)
    longest = [xs for _, xs in sorted(by_length.items()) if xs]
    complete = min(longest[-1]) if longest else 0.0
    table = []
    k = 1
    while k * step <= R + 1e-12:
        r = k * step
        table.append((round(r, 12), sum(1 for x in lengths if x <= r)))
        k += 1
    pts = [(r, c) for r, c in table if c > 0 and r < complete]
    if len(pts) >= 2:
        xs = np.asarray([r for r, _ in pts])
        ys = np.log(np.asarray([c for _, c in pts], dtype=float))
        exponent = float(np.polyfit(xs, ys, 1)[0])
    else:
        exponent = float("nan")
    return OrbitCount(table, exponent, lengths, skipped, max_len, complete)
