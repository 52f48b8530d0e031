r"""Shifts and splits with their carrying matrices.

Split convention.  Draw the large branch ``e`` horizontally with its first end
at the switch ``s1`` on the left.  At ``s1`` the small ends are ``A`` (left
slot, drawn on top) and ``B`` (right slot, bottom); at ``s2`` they are ``D``
(right slot, top) and ``C`` (left slot, bottom)::

        A                 D                A ------+------ D        A ------+------ D
          \             /                          \                        /
           s1 ---e--- s2          right:            e             left:   e
          /             \                            \                    /
        B                 C                B ------+------ C        B ------+------ C

A right split keeps the strands ``A-D`` and ``B-C`` and lets the diagonal run
from the ``A`` side down to the ``C`` side; a left split runs it from ``B`` up
to ``D``.  The diagonal keeps the id of ``e``, all other branches keep theirs,
so numberings pass through splits unchanged.  The two small ends that end up
on the diagonal's switches are the losing ends: ``D, B`` for a right split,
``A, C`` for a left split.  The carrying matrix expresses the old weights in
terms of the new ones: ``mu(e) = mu'(e) + mu'(loser1) + mu'(loser2)`` and
``mu(x) = mu'(x)`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping

from .measures import remove_branches
from .track import Switch, TrackError, TrainTrack, classify_branch, large_branches

LEFT_SPLIT, RIGHT_SPLIT, CENTRAL_SPLIT = "L", "R", "C"


class MoveError(ValueError):
    pass


@dataclass(frozen=True)
class SplitChoice:
    large_branch: int
    direction: str

    def __post_init__(self):
        if self.direction not in (LEFT_SPLIT, RIGHT_SPLIT, CENTRAL_SPLIT):
            raise MoveError(f"direction must be L, R or C, got {self.direction!r}")


@dataclass(frozen=True)
class CarryingMatrix:
    """Nonnegative integer matrix; rows index source branches, columns target."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    data: tuple[tuple[int, ...], ...]

    @classmethod
    def identity(cls, branches) -> "CarryingMatrix":
        br = tuple(branches)
        return cls(br, br, tuple(tuple(int(i == j) for j in range(len(br))) for i in range(len(br))))

    def __matmul__(self, other: "CarryingMatrix") -> "CarryingMatrix":
        if self.cols != other.rows:
            raise MoveError("carrying matrices do not compose")
        cols_t = list(zip(*other.data))
        data = tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols_t) for row in self.data)
        return CarryingMatrix(self.rows, other.cols, data)

    def apply(self, weights: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Weights on the target track -> weights on the source track."""
        vec = [weights[c] for c in self.cols]
        return {r: sum((a * w for a, w in zip(row, vec)), Fraction(0)) for r, row in zip(self.rows, self.data)}

    def entry(self, r: int, c: int) -> int:
        return self.data[self.rows.index(r)][self.cols.index(c)]

    def is_positive(self) -> bool:
        return all(x > 0 for row in self.data for x in row)

    def to_csv(self) -> str:
        lines = ["branch," + ",".join(str(c) for c in self.cols)]
        for r, row in zip(self.rows, self.data):
            lines.append(f"{r}," + ",".join(str(x) for x in row))
        return "\n".join(lines) + "\n"


def _local(t: TrainTrack, e: int):
    if e not in t.branches:
        raise MoveError(f"unknown branch {e}")
    if classify_branch(t, e) != "large":
        raise MoveError(f"branch {e} is not large")
    s1 = t.switch_of((e, 1))
    s2 = t.switch_of((e, 2))
    return s1, s2, s1.left, s1.right, s2.left, s2.right


def losing_ends(t: TrainTrack, e: int, direction: str):
    s1, s2, A, B, C, D = _local(t, e)
    return (D, B) if direction == RIGHT_SPLIT else (A, C)


def _split_matrix(t: TrainTrack, e: int, losers) -> CarryingMatrix:
    br = t.branches
    idx = {b: i for i, b in enumerate(br)}
    data = [[int(i == j) for j in range(len(br))] for i in range(len(br))]
    for h in losers:
        data[idx[e]][idx[h[0]]] += 1
    return CarryingMatrix(br, br, tuple(tuple(r) for r in data))


def _lr_split(t: TrainTrack, e: int, direction: str) -> tuple[TrainTrack, CarryingMatrix]:
    s1, s2, A, B, C, D = _local(t, e)
    if direction == RIGHT_SPLIT:
        n1 = Switch(s1.sid, A, (e, 1), D)
        n2 = Switch(s2.sid, C, (e, 2), B)
        losers = (D, B)
    else:
        n1 = Switch(s1.sid, B, C, (e, 1))
        n2 = Switch(s2.sid, D, A, (e, 2))
        losers = (A, C)
    switches = [n1 if s.sid == s1.sid else n2 if s.sid == s2.sid else s for s in t.switches]
    marks = []
    for h in t.punctured:
        kept = [g for g in t.region_of(h).boundary if g[0] != e]
        marks.append(kept[0])
    new = TrainTrack(switches, t.branches, marks, t.filling, check=True)
    return new.normalized(), _split_matrix(t, e, losers)


def split(t: TrainTrack, choice: SplitChoice) -> tuple[TrainTrack, CarryingMatrix]:
    """Split ``t`` at a large branch.

    A central split removes the diagonal and smooths the two bivalent
    switches, so the result has three fewer branches.  When the diagonal bounds
    a single region on both sides, the result is flagged non-filling.
    """
    e = choice.large_branch
    if choice.direction != CENTRAL_SPLIT:
        return _lr_split(t, e, choice.direction)
    right, m_right = _lr_split(t, e, RIGHT_SPLIT)
    same_face = right.region_of((e, 1)).key == right.region_of((e, 2)).key
    filling = t.filling and not same_face
    try:
        reduced, bmap = remove_branches(right, {e})
        result = TrainTrack(reduced.switches, reduced.branches, reduced.punctured, filling, check=True)
    except TrackError as exc:
        raise MoveError(f"central split at {e} is not a train track: {exc}") from None
    cols = result.branches
    cidx = {c: i for i, c in enumerate(cols)}
    data = []
    for b in right.branches:
        row = [0] * len(cols)
        if b != e:
            row[cidx[bmap[b]]] = 1
        data.append(tuple(row))
    removal = CarryingMatrix(right.branches, cols, tuple(data))
    return result.normalized(), m_right @ removal


def shift(t: TrainTrack, b: int) -> tuple[TrainTrack, CarryingMatrix]:
    """Slide the far small end of the mixed branch ``b`` across its large end."""
    if b not in t.branches:
        raise MoveError(f"unknown branch {b}")
    if classify_branch(t, b) != "mixed":
        raise MoveError(f"branch {b} is not mixed")
    x = (b, 1) if t.role((b, 1)) == 0 else (b, 2)
    y = (b, 3 - x[1])
    u = t.switch_of(x)
    v = t.switch_of(y)
    if u.sid == v.sid:
        raise MoveError(f"branch {b} is a loop at switch {u.sid}")
    P, Q = u.left, u.right
    R = v.large
    if v.right == y:
        T = v.left
        nu, nv = Switch(u.sid, x, T, P), Switch(v.sid, R, y, Q)
    else:
        T = v.right
        nu, nv = Switch(u.sid, x, Q, T), Switch(v.sid, R, P, y)
    switches = [nu if s.sid == u.sid else nv if s.sid == v.sid else s for s in t.switches]
    marks = []
    for h in t.punctured:
        kept = [g for g in t.region_of(h).boundary if g[0] != b]
        marks.append(kept[0])
    new = TrainTrack(switches, t.branches, marks, t.filling, check=True)
    br = t.branches
    idx = {c: i for i, c in enumerate(br)}
    data = [[int(i == j) for j in range(len(br))] for i in range(len(br))]
    data[idx[b]][idx[b]] = 0
    data[idx[b]][idx[P[0]]] += 1
    data[idx[b]][idx[Q[0]]] += 1
    return new.normalized(), CarryingMatrix(br, br, tuple(tuple(r) for r in data))


def full_split(t: TrainTrack, choices: Mapping[int, str]) -> tuple[TrainTrack, CarryingMatrix]:
    """Split once at every large branch, in increasing branch-id order."""
    large = large_branches(t)
    if set(choices) != set(large):
        missing = set(large) - set(choices)
        extra = set(choices) - set(large)
        raise MoveError(f"choices must cover the large branches exactly (missing {sorted(missing)}, extra {sorted(extra)})")
    if not large:
        raise MoveError("track has no large branch")
    cur = t
    mat = CarryingMatrix.identity(t.branches)
    for e in sorted(large):
        d = choices[e]
        if d not in (LEFT_SPLIT, RIGHT_SPLIT):
            raise MoveError("full splits use L or R only")
        cur, m = _lr_split(cur, e, d)
        mat = mat @ m
    return cur, mat


def full_split_choices(t: TrainTrack) -> list[dict[int, str]]:
    """All ``2^k`` choice maps for the ``k`` large branches, in a fixed order."""
    large = large_branches(t)
    return [dict(zip(large, combo)) for combo in product((LEFT_SPLIT, RIGHT_SPLIT), repeat=len(large))]


def split_resolve(t: TrainTrack, e: int, mu: Mapping[int, Fraction]) -> str:
    """The split direction at ``e`` carrying the measure ``mu``.

    The diagonal of a right split has weight ``mu(A) - mu(D)`` and that of a
    left split ``mu(D) - mu(A)``; a tie is a collision and resolves to a
    central split.
    """
    s1, s2, A, B, C, D = _local(t, e)
    a, d = Fraction(mu[A[0]]), Fraction(mu[D[0]])
    if a > d:
        return RIGHT_SPLIT
    if a < d:
        return LEFT_SPLIT
    return CENTRAL_SPLIT


def lift_measure(t: TrainTrack, e: int, direction: str, mu: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """Preimage of ``mu`` under a left/right split matrix at ``e``."""
    losers = losing_ends(t, e, direction)
    out = {b: Fraction(w) for b, w in mu.items()}
    out[e] = Fraction(mu[e]) - sum(Fraction(mu[h[0]]) for h in losers)
    return out


# -- move scripts ------------------------------------------------------------


def parse_moves(text: str) -> list[tuple]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "moves v1":
        raise MoveError("expected header 'moves v1'")
    script = []
    for ln in lines[1:]:
        w = ln.split()
        if w[0] == "split" and len(w) == 3 and w[2] in ("L", "R", "C"):
            script.append(("split", int(w[1]), w[2]))
        elif w[0] == "shift" and len(w) == 2:
            script.append(("shift", int(w[1])))
        elif w[0] == "fullsplit" and len(w) >= 2:
            ch = {}
            for tok in w[1:]:
                k, v = tok.split("=")
                if v not in ("L", "R"):
                    raise MoveError(f"bad full split direction in {tok!r}")
                ch[int(k)] = v
            script.append(("fullsplit", ch))
        else:
            raise MoveError(f"bad move line {ln!r}")
    return script


def replay(t: TrainTrack, script: list[tuple]) -> tuple[TrainTrack, CarryingMatrix]:
    cur = t
    mat = CarryingMatrix.identity(t.branches)
    for step in script:
        if step[0] == "split":
            cur, m = split(cur, SplitChoice(step[1], step[2]))
        elif step[0] == "shift":
            cur, m = shift(cur, step[1])
        else:
            cur, m = full_split(cur, step[1])
        mat = mat @ m
    return cur, mat
