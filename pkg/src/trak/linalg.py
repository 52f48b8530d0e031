"""Exact rational linear algebra for small cones.

Everything works over ``fractions.Fraction`` or Python integers.  Matrices are
lists of rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[Fraction]]

FM_MAX_ROWS = 4000


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = to_fractions(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def primitive(v: Sequence) -> list[int]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One exact solution of ``A x = b`` (free variables set to 0), or ``None``."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return x


def matvec(m: Sequence[Sequence], v: Sequence):
    return [sum(a * b for a, b in zip(row, v)) for row in m]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


# -- feasibility -------------------------------------------------------------


def simplex_feasible(a_ub: Matrix, b_ub: Sequence, a_eq: Matrix = (), b_eq: Sequence = ()) -> list[Fraction] | None:
    """Find ``x >= 0`` with ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    Phase one of the simplex method on a dense exact tableau with Bland's rule.
    Returns a feasible point or ``None``.
    """
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n = len(a_ub[0]) if a_ub else (len(a_eq[0]) if a_eq else 0)
    slack_rows = []
    for row, b in zip(a_ub, b_ub):
        rows.append([Fraction(x) for x in row])
        rhs.append(Fraction(b))
        slack_rows.append(len(rows) - 1)
    for row, b in zip(a_eq, b_eq):
        rows.append([Fraction(x) for x in row])
        rhs.append(Fraction(b))
    m = len(rows)
    nslack = len(slack_rows)
    # columns: x (n) | slacks (nslack) | artificials (m)
    total = n + nslack + m
    tab = []
    for i in range(m):
        row = rows[i] + [Fraction(0)] * (nslack + m)
        if i < nslack:
            row[n + i] = Fraction(1)
        sign = 1 if rhs[i] >= 0 else -1
        row = [x * sign for x in row]
        row[n + nslack + i] = Fraction(1)
        tab.append(row + [rhs[i] * sign])
    basis = [n + nslack + i for i in range(m)]
    # phase-one objective: minimize sum of artificials
    obj = [Fraction(0)] * (total + 1)
    for i in range(m):
        obj = [o - t for o, t in zip(obj, tab[i])]
    for j in range(n + nslack, total):
        obj[j] = Fraction(0)
    while True:
        enter = next((j for j in range(total) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break  # unbounded direction; cannot happen for phase one
        i = best[1]
        piv = tab[i][enter]
        tab[i] = [x / piv for x in tab[i]]
        for k in range(m):
            if k != i and tab[k][enter] != 0:
                f = tab[k][enter]
                tab[k] = [a - f * b for a, b in zip(tab[k], tab[i])]
        f = obj[enter]
        obj = [a - f * b for a, b in zip(obj, tab[i])]
        basis[i] = enter
    if obj[-1] != 0:
        return None
    x = [Fraction(0)] * total
    for i, bcol in enumerate(basis):
        x[bcol] = tab[i][-1]
    return x[:n]


def fourier_motzkin_feasible(ineqs: list[tuple[list[Fraction], Fraction]]) -> list[Fraction] | None:
    """Feasibility of ``{y : a.y >= c}`` by Fourier-Motzkin elimination.

    Returns a feasible point found by back substitution, or ``None``.  Raises
    ``OverflowError`` when the intermediate system exceeds ``FM_MAX_ROWS``.
    """
    if not ineqs:
        return []
    d = len(ineqs[0][0])
    systems = [_dedupe(ineqs)]
    for k in range(d - 1, -1, -1):
        cur = systems[-1]
        pos = [(a, c) for a, c in cur if a[k] > 0]
        neg = [(a, c) for a, c in cur if a[k] < 0]
        zero = [(a, c) for a, c in cur if a[k] == 0]
        new = list(zero)
        for ap, cp in pos:
            for an, cn in neg:
                # combine to cancel y_k
                lp, ln = -an[k], ap[k]
                a = [lp * x + ln * y for x, y in zip(ap, an)]
                new.append((a, lp * cp + ln * cn))
        new = _dedupe(new)
        if len(new) > FM_MAX_ROWS:
            raise OverflowError("Fourier-Motzkin system too large")
        systems.append(new)
    # every remaining row has a zero left-hand side
    for a, c in systems[-1]:
        if c > 0:
            return None
    y = [Fraction(0)] * d
    for k in range(d):
        cur = systems[d - 1 - k]
        lo, hi = None, None
        for a, c in cur:
            if a[k] == 0:
                continue
            rest = c - sum(a[j] * y[j] for j in range(k))
            bound = rest / a[k]
            if a[k] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is None and hi is None:
            y[k] = Fraction(0)
        elif lo is None:
            y[k] = min(hi, Fraction(0))
        elif hi is None:
            y[k] = max(lo, Fraction(0))
        else:
            y[k] = lo
    return y


def _dedupe(ineqs):
    seen = {}
    for a, c in ineqs:
        a = [Fraction(x) for x in a]
        c = Fraction(c)
        scale = max((abs(x) for x in a), default=Fraction(0))
        if scale == 0:
            key = (tuple(a), c)
            seen[key] = (a, c)
            continue
        a = [x / scale for x in a]
        c = c / scale
        key = tuple(a)
        if key not in seen or seen[key][1] < c:
            seen[key] = (a, c)
    out = []
    for a, c in seen.values():
        if all(x == 0 for x in a):
            if c > 0:
                return [(a, c)]
            continue
        out.append((a, c))
    return out


def cone_point_at_least_one(eq_rows: Matrix, ineq_rows: Matrix, nvars: int, method: str = "auto") -> list[Fraction] | None:
    """Find ``x`` with ``E x = 0``, ``G x >= 0`` and ``x >= 1`` entrywise."""
    basis = nullspace(eq_rows, nvars)
    if not basis:
        return None
    d = len(basis)
    # x = B^T y
    def param(row):
        return [sum(row[i] * basis[k][i] for i in range(nvars)) for k in range(d)]

    if method in ("auto", "fm"):
        ineqs = [([basis[k][i] for k in range(d)], Fraction(1)) for i in range(nvars)]
        ineqs += [(param(g), Fraction(0)) for g in ineq_rows]
        try:
            y = fourier_motzkin_feasible(ineqs)
        except OverflowError:
            if method == "fm":
                raise
        else:
            if y is None:
                return None
            return [sum(y[k] * basis[k][i] for k in range(d)) for i in range(nvars)]
    # simplex on z = x - 1 >= 0:  E z = -E 1,  -G z <= G 1
    ones = [Fraction(1)] * nvars
    a_eq = [list(r) for r in eq_rows]
    b_eq = [-sum(r) for r in eq_rows]
    a_ub = [[-x for x in g] for g in ineq_rows]
    b_ub = [sum(g[i] * ones[i] for i in range(nvars)) for g in ineq_rows]
    z = simplex_feasible(a_ub, b_ub, a_eq, b_eq) if (a_ub or a_eq) else [Fraction(0)] * nvars
    if z is None:
        return None
    return [zi + 1 for zi in z]


# -- extreme rays ------------------------------------------------------------


def extreme_rays(eq_rows: Sequence[Sequence], nvars: int) -> list[list[int]]:
    """Extreme rays of the pointed cone ``{x >= 0 : E x = 0}``.

    Double description: start from the orthant and cut by one equation at a
    time, combining adjacent positive/negative ray pairs.  Rays are returned
    as primitive integer vectors, sorted.
    """
    rays = [tuple(int(i == j) for j in range(nvars)) for i in range(nvars)]
    red, _ = rref(eq_rows, nvars) if eq_rows else ([], [])
    for row in red:
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        a = [int(x * den) for x in row]
        vals = [sum(ai * ri for ai, ri in zip(a, r)) for r in rays]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        pos = [(r, v) for r, v in zip(rays, vals) if v > 0]
        neg = [(r, v) for r, v in zip(rays, vals) if v < 0]
        zsets = [frozenset(i for i in range(nvars) if r[i] == 0) for r in rays]
        new = list(zero)
        for rp, vp in pos:
            zp = frozenset(i for i in range(nvars) if rp[i] == 0)
            for rn, vn in neg:
                zn = frozenset(i for i in range(nvars) if rn[i] == 0)
                common = zp & zn
                # combinatorial adjacency: no third ray vanishes on the common set
                adjacent = True
                for r, zs in zip(rays, zsets):
                    if r is rp or r is rn:
                        continue
                    if common <= zs:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                comb = [(-vn) * x + vp * y for x, y in zip(rp, rn)]
                new.append(tuple(primitive(comb)))
        rays = sorted(set(new))
    return [list(r) for r in rays]


def in_conic_hull(v: Sequence, gens: Sequence[Sequence]) -> bool:
    """Whether ``v`` is a nonnegative combination of ``gens`` (exact LP)."""
    if not gens:
        return all(x == 0 for x in v)
    n = len(v)
    a_eq = [[Fraction(g[i]) for g in gens] for i in range(n)]
    return simplex_feasible([], [], a_eq, [Fraction(x) for x in v]) is not None


def conic_coefficients(v: Sequence, gens: Sequence[Sequence]) -> list[Fraction] | None:
    n = len(v)
    a_eq = [[Fraction(g[i]) for g in gens] for i in range(n)]
    return simplex_feasible([], [], a_eq, [Fraction(x) for x in v])
