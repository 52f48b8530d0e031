"""The subshift of finite type generated by full numbered splits.

Letters are numbered combinatorial types: tracks whose branch ids are the
numbers ``1..p``, taken up to orientation-preserving isomorphism that respects
the numbering.  Splits keep branch ids, so a full split of a representative is
again a numbered track and its canonical code names the target letter.
"""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .canonical import NumberedTrack, canonical_form, canonical_relabel, code_hash
from .measures import is_recurrent, remove_branches, vertex_cycle_vectors
from .moves import RIGHT_SPLIT, CarryingMatrix, _lr_split, full_split, full_split_choices
from .perron import NonPrimitive, PerronRoot, perron_root
from .track import TrackError, TrainTrack, is_orientable, large_branches, serialize_track, topological_type


class SubshiftError(ValueError):
    pass


class WordError(ValueError):
    pass


# -- pruning -----------------------------------------------------------------


def diagonal_removals(t: TrainTrack):
    """For each large branch, the track left after a split minus its diagonal.

    Yields ``(e, track)`` with ``track`` ``None`` when the removal leaves a
    closed curve (which is an orientable component).
    """
    for e in large_branches(t):
        right, _ = _lr_split(t, e, RIGHT_SPLIT)
        try:
            sigma, _ = remove_branches(right, {e})
        except TrackError:
            yield e, None
            continue
        yield e, sigma


def passes_diagonal_test(t: TrainTrack) -> bool:
    """Necessary condition for full recurrence from diagonal removals.

    Non-orientable tracks must leave no orientable component; orientable
    tracks must stay connected.
    """
    orientable = is_orientable(t)
    for _, sigma in diagonal_removals(t):
        if sigma is None:
            return False
        comps = sigma.component_tracks()
        if orientable:
            if len(comps) != 1:
                return False
        elif any(is_orientable(c) for c in comps):
            return False
    return True


def prune_reason(t: TrainTrack, seed_type, seed_orientable: bool) -> str | None:
    """Why a child is rejected, or ``None`` if it is kept."""
    try:
        t.validate()
    except TrackError:
        return "invalid"
    if topological_type(t) != seed_type:
        return "type"
    if is_orientable(t) != seed_orientable:
        return "orientability"
    if not is_recurrent(t)[0]:
        return "not recurrent"
    if not passes_diagonal_test(t):
        return "diagonal"
    return None


# -- the subshift ------------------------------------------------------------


@dataclass
class Transition:
    choices: dict[int, str]
    matrix: CarryingMatrix
    multiplicity: int = 1


@dataclass
class Subshift:
    """Alphabet of canonical codes with a 0/1 transition matrix.

    ``moves[(i, j)]`` records the first full split (in choice-map order) that
    takes representative ``i`` to letter ``j``, with its carrying matrix
    expressed in the numberings of the two representatives.
    """

    alphabet: list[bytes]
    transition: list[list[int]]
    representatives: list[TrainTrack]
    moves: dict[tuple[int, int], Transition]
    closed: bool
    numbered: bool = True
    rejected: dict[str, int] = field(default_factory=dict)
    _rays: list | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @property
    def num_branches(self) -> int:
        return self.representatives[0].num_branches

    def matrix_array(self, dtype=np.int64) -> np.ndarray:
        return np.asarray(self.transition, dtype=dtype)

    def successors(self, i: int) -> list[int]:
        return [j for j, a in enumerate(self.transition[i]) if a]

    def rays(self, i: int) -> list[list[int]]:
        """Vertex cycles of representative ``i`` (computed once per letter)."""
        if self._rays is None:
            self._rays = [None] * self.size
        if self._rays[i] is None:
            self._rays[i] = vertex_cycle_vectors(self.representatives[i])
        return self._rays[i]

    def require_closed(self) -> None:
        if not self.closed:
            raise SubshiftError("subshift is not closed (node budget exhausted)")


def _numbered_code(t: TrainTrack) -> bytes:
    return canonical_form(NumberedTrack.identity(t))


def _renumbered(t: TrainTrack) -> TrainTrack:
    """Copy of ``t`` with branch ids ``1..p`` in sorted order."""
    bmap = {b: i + 1 for i, b in enumerate(t.branches)}
    return t.relabeled(branch_map=bmap).normalized()


def _letter(t: TrainTrack, numbered: bool) -> tuple[bytes, TrainTrack, dict[int, int]]:
    """Code of ``t``, the track in letter numbering, and the branch map to it."""
    if numbered:
        return _numbered_code(t), t, {b: b for b in t.branches}
    code, rel, bmap = canonical_relabel(t)
    return code, rel.normalized(), bmap


class _BudgetHit(Exception):
    pass


def _permute_columns(m: CarryingMatrix, bmap: dict[int, int]) -> CarryingMatrix:
    cols = tuple(sorted(bmap[c] for c in m.cols))
    pos = {bmap[c]: k for k, c in enumerate(m.cols)}
    data = tuple(tuple(row[pos[c]] for c in cols) for row in m.data)
    return CarryingMatrix(m.rows, cols, data)


def build_subshift(seeds: Sequence[TrainTrack], node_budget: int = 10_000, numbered: bool = True) -> Subshift:
    """Breadth-first closure of the seeds under pruned full splits.

    With ``numbered=False`` letters are unnumbered combinatorial types: each
    track is renumbered canonically and carrying matrices are re-indexed to
    match.  When the alphabet would exceed ``node_budget`` the search stops and
    the result is flagged as not closed.
    """
    if not seeds:
        raise SubshiftError("at least one seed is required")
    p = seeds[0].num_branches
    if any(s.num_branches != p for s in seeds):
        raise SubshiftError("seeds must have the same number of branches")
    seed_type = topological_type(seeds[0])
    seed_or = is_orientable(seeds[0])
    alphabet: list[bytes] = []
    reps: list[TrainTrack] = []
    index: dict[bytes, int] = {}
    rejected_codes: set[bytes] = set()
    rejected: dict[str, int] = {}
    edges: dict[tuple[int, int], Transition] = {}
    queue: deque[int] = deque()

    def add(t: TrainTrack) -> tuple[int | None, dict[int, int]]:
        code, rep, bmap = _letter(t, numbered)
        if code in index:
            return index[code], bmap
        if code in rejected_codes:
            return None, bmap
        reason = prune_reason(rep, seed_type, seed_or)
        if reason is not None:
            rejected_codes.add(code)
            rejected[reason] = rejected.get(reason, 0) + 1
            return None, bmap
        if len(alphabet) >= node_budget:
            raise _BudgetHit()
        index[code] = len(alphabet)
        alphabet.append(code)
        reps.append(rep)
        queue.append(index[code])
        return index[code], bmap

    closed = True
    try:
        for s in seeds:
            s = _renumbered(s)
            reason = prune_reason(s, seed_type, seed_or)
            if reason is not None:
                raise SubshiftError(f"seed rejected by the pruning filter: {reason}")
            add(s)
        while queue:
            i = queue.popleft()
            rep = reps[i]
            for choices in full_split_choices(rep):
                child, mat = full_split(rep, choices)
                j, bmap = add(child)
                if j is None:
                    continue
                if (i, j) in edges:
                    edges[(i, j)].multiplicity += 1
                    continue
                if not numbered:
                    mat = _permute_columns(mat, bmap)
                edges[(i, j)] = Transition(dict(choices), mat)
    except _BudgetHit:
        closed = False
    n = len(alphabet)
    trans = [[0] * n for _ in range(n)]
    for i, j in edges:
        trans[i][j] = 1
    return Subshift(alphabet, trans, reps, edges, closed, numbered, rejected)


# -- graph structure ---------------------------------------------------------


def _reachable(adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _adjacency(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[j for j, a in enumerate(row) if a] for row in matrix]


def _matrix_of(s) -> list[list[int]]:
    if isinstance(s, Subshift):
        s.require_closed()
        return s.transition
    return [list(map(int, row)) for row in s]


def is_transitive(s) -> bool:
    """Strong connectivity of the transition graph."""
    a = _matrix_of(s)
    n = len(a)
    if n == 0:
        return False
    fwd = _adjacency(a)
    bwd = _adjacency([list(col) for col in zip(*a)])
    return len(_reachable(fwd, 0)) == n and len(_reachable(bwd, 0)) == n


@dataclass(frozen=True)
class MixingReport:
    transitive: bool
    mixing: bool
    period: int
    classes: tuple[tuple[int, ...], ...]


def mixing_report(s) -> MixingReport:
    """Period and cyclic classes of an irreducible transition matrix."""
    a = _matrix_of(s)
    if not is_transitive(a):
        return MixingReport(False, False, 0, ())
    adj = _adjacency(a)
    level = {0: 0}
    queue = deque([0])
    period = 0
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                period = math.gcd(period, level[u] + 1 - level[v])
    period = abs(period)
    classes = tuple(tuple(sorted(i for i in level if level[i] % period == r)) for r in range(period))
    return MixingReport(True, period == 1, period, classes)


def is_mixing(s) -> bool:
    return mixing_report(s).mixing


def strong_components(s) -> list[list[int]]:
    """Strongly connected components that carry a cycle, each sorted, in order of least letter."""
    a = _matrix_of(s)
    fwd = _adjacency(a)
    bwd = _adjacency([list(col) for col in zip(*a)])
    done: set[int] = set()
    out = []
    for v in range(len(a)):
        if v in done:
            continue
        comp = _reachable(fwd, v) & _reachable(bwd, v)
        done |= comp
        if len(comp) > 1 or a[v][v]:
            out.append(sorted(comp))
    return sorted(out)


def _closing_path(s: Subshift, comp: set[int], start: int, target: int) -> list[int]:
    """Shortest path from ``start`` to a different letter ``target`` inside ``comp``."""
    prev: dict[int, int | None] = {start: None}
    queue = deque([start])
    while target not in prev:
        u = queue.popleft()
        for v in s.successors(u):
            if v in comp and v not in prev:
                prev[v] = u
                queue.append(v)
    path = [target]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def find_tight_cycle(s: Subshift, comp: Sequence[int], seed: int = 0, cap: int = 50_000, walks: int = 2000,
                     walk: int = 60):
    """A closed word inside ``comp`` with a positive carrying matrix, or ``None``.

    Searches the pairs (letter, support of the product so far) from the least
    letter, which decides the question exactly when there are at most ``cap``
    of them.  Past that it falls back to random walks closed by a shortest
    path, and ``None`` only means that none was found.
    """
    cs = set(comp)
    base = min(cs)
    support = {k: np.asarray(tr.matrix.data) > 0 for k, tr in s.moves.items() if k[0] in cs and k[1] in cs}
    p = len(next(iter(support.values())))

    def step(m, v, w):
        return (m.astype(np.int64) @ support[(v, w)].astype(np.int64)) > 0

    start = np.eye(p, dtype=bool)
    seen = {(base, start.tobytes()): None}
    stack = [(base, start)]
    while stack and len(seen) <= cap:
        v, m = stack.pop()
        for w in sorted(x for x in s.successors(v) if x in cs):
            nm = step(m, v, w)
            key = (w, nm.tobytes())
            if key in seen:
                continue
            seen[key] = (v, m.tobytes())
            if w == base and nm.all():
                word = [w]
                back = seen[key]
                while back is not None:
                    word.append(back[0])
                    back = seen[back]
                return tuple(word[::-1][:-1])
            stack.append((w, nm))
    if not stack:
        return None
    rng = random.Random(seed)
    for _ in range(walks):
        w = [base]
        for _ in range(walk):
            w.append(rng.choice([v for v in s.successors(w[-1]) if v in cs]))
        if w[-1] != base:
            w += _closing_path(s, cs, w[-1], base)[1:]
        m = start
        for a, b in zip(w, w[1:]):
            m = step(m, a, b)
        if m.all():
            return tuple(w[:-1])
    return None


def tight_core(s: Subshift, seed: int = 0) -> Subshift:
    """Restriction to the components in which a tight closed word was found.

    Letters off every cycle never occur in a biinfinite sequence, and a
    component without positive products carries no measure that fills the
    track, so neither belongs to the shift space proper.
    """
    s.require_closed()
    keep = sorted(v for comp in strong_components(s) if find_tight_cycle(s, comp, seed) is not None for v in comp)
    pos = {v: k for k, v in enumerate(keep)}
    trans = [[s.transition[i][j] for j in keep] for i in keep]
    moves = {(pos[i], pos[j]): tr for (i, j), tr in s.moves.items() if i in pos and j in pos}
    return Subshift([s.alphabet[i] for i in keep], trans, [s.representatives[i] for i in keep], moves, s.closed,
                    s.numbered, dict(s.rejected))


# -- words -------------------------------------------------------------------


def _int_matpow(a: list[list[int]], n: int) -> list[list[int]]:
    size = len(a)
    result = np.eye(size, dtype=object)
    base = np.asarray(a, dtype=object)
    while n:
        if n & 1:
            result = result.dot(base)
        base = base.dot(base)
        n >>= 1
    return result


def word_count_matrix(s, n: int) -> np.ndarray:
    """``A^n`` with exact Python integers."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _int_matpow(_matrix_of(s), n)


def count_words(s, i: int, j: int, n: int) -> int:
    """Number of admissible paths of ``n`` transitions from ``i`` to ``j``."""
    return int(word_count_matrix(s, n)[i, j])


def is_admissible(s, word: Sequence[int]) -> bool:
    a = _matrix_of(s)
    return all(a[x][y] for x, y in zip(word, word[1:]))


def word_matrix(s: Subshift, word: Sequence[int], cyclic: bool = False) -> CarryingMatrix:
    """Composite carrying matrix of the splitting sequence spelled by ``word``."""
    if len(word) < 2 and not cyclic:
        raise WordError("a word needs at least two letters to carry a split")
    steps = list(zip(word, word[1:]))
    if cyclic:
        steps.append((word[-1], word[0]))
    mat = None
    for x, y in steps:
        tr = s.moves.get((x, y))
        if tr is None:
            raise WordError(f"word is not admissible at {x}->{y}")
        mat = tr.matrix if mat is None else mat @ tr.matrix
    return mat


def is_tight(s: Subshift, word: Sequence[int]) -> bool:
    """Whether the composite carrying matrix is entrywise positive."""
    return word_matrix(s, word).is_positive()


def min_rotation(word: Sequence[int]) -> tuple[int, ...]:
    w = tuple(word)
    return min(w[k:] + w[:k] for k in range(len(w)))


def is_primitive_word(word: Sequence[int]) -> bool:
    n = len(word)
    w = tuple(word)
    return all(w != w[d:] + w[:d] for d in range(1, n) if n % d == 0)


def periodic_words(s, n: int, budget: int = 1_000_000, primitive_only: bool = False) -> list[tuple[int, ...]]:
    """Closed admissible words of length ``n``, one per rotation class.

    Words are reported in their lexicographically least rotation, sorted.
    Raises ``SubshiftError`` when more than ``budget`` words would be listed.
    """
    a = _matrix_of(s)
    adj = _adjacency(a)
    out: list[tuple[int, ...]] = []
    for start in range(len(a)):
        stack = [(start,)]
        while stack:
            w = stack.pop()
            if len(w) == n:
                if a[w[-1]][start] and min_rotation(w) == w and (not primitive_only or is_primitive_word(w)):
                    out.append(w)
                    if len(out) > budget:
                        raise SubshiftError("periodic word budget exhausted")
                continue
            for v in reversed(adj[w[-1]]):
                if v >= start:
                    stack.append(w + (v,))
    out.sort()
    return out


def dilatation(s: Subshift, word: Sequence[int]) -> PerronRoot:
    """Perron root of the carrying matrix of a closed word."""
    mat = word_matrix(s, word, cyclic=True)
    return perron_root(mat.data)


# -- export ------------------------------------------------------------------


def to_dot(s: Subshift) -> str:
    lines = ["digraph subshift {"]
    for i, code in enumerate(s.alphabet):
        ty = topological_type(s.representatives[i])
        lines.append(f'  {i} [label="{code_hash(code)} {ty}"];')
    for i in range(s.size):
        for j in s.successors(i):
            lines.append(f"  {i} -> {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(s: Subshift) -> str:
    data = {
        "closed": s.closed,
        "numbered": s.numbered,
        "alphabet": [code.decode("ascii") for code in s.alphabet],
        "matrix": s.transition,
        "representatives": [serialize_track(t) for t in s.representatives],
        "moves": [
            {
                "from": i,
                "to": j,
                "choices": {str(k): v for k, v in sorted(tr.choices.items())},
                "multiplicity": tr.multiplicity,
                "matrix": [list(r) for r in tr.matrix.data],
            }
            for (i, j), tr in sorted(s.moves.items())
        ],
        "rejected": dict(sorted(s.rejected.items())),
    }
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def from_json(text: str) -> Subshift:
    from .track import parse_track

    data = json.loads(text)
    reps = [parse_track(x) for x in data["representatives"]]
    moves = {}
    for mv in data["moves"]:
        i, j = mv["from"], mv["to"]
        mat = CarryingMatrix(reps[i].branches, reps[j].branches, tuple(tuple(r) for r in mv["matrix"]))
        moves[(i, j)] = Transition({int(k): v for k, v in mv["choices"].items()}, mat, mv["multiplicity"])
    return Subshift(
        [c.encode("ascii") for c in data["alphabet"]],
        data["matrix"],
        reps,
        moves,
        data["closed"],
        data["numbered"],
        data.get("rejected", {}),
    )
