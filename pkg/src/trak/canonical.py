"""Canonical codes for train tracks up to orientation-preserving isomorphism.

A traversal starts at a switch and labels switches in breadth-first order,
visiting the slots of each switch as ``large, left, right``.  Because each
switch has a distinguished large slot, the starting switch fixes the whole
labeling of its component, so the minimum over starting switches is canonical.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .track import End, Switch, TrainTrack, other_end


@dataclass(frozen=True)
class NumberedTrack:
    """A track with a bijective numbering of its branches by ``1..p``."""

    track: TrainTrack
    numbering: Mapping[int, int]

    def __post_init__(self):
        nums = sorted(self.numbering.values())
        if set(self.numbering) != set(self.track.branches) or nums != list(range(1, len(nums) + 1)):
            raise ValueError("numbering must be a bijection from branches onto 1..p")

    @classmethod
    def identity(cls, t: TrainTrack) -> "NumberedTrack":
        """Number branches by their position in the sorted id list."""
        return cls(t, {b: i + 1 for i, b in enumerate(t.branches)})

    def as_track(self) -> TrainTrack:
        """The underlying track with branch ids replaced by their numbers."""
        return self.track.relabeled(branch_map=dict(self.numbering)).normalized()


def _traverse(t: TrainTrack, start: Switch, numbering: Mapping[int, int] | None):
    label: dict[int, int] = {start.sid: 0}
    order = [start]
    branch_label: dict[int, int] = {}
    queue = deque([start])
    tokens: list[tuple[int, ...]] = []
    while queue:
        s = queue.popleft()
        for h in s.slots:
            x = other_end(h)
            target, role = t.slot(x)
            if target.sid not in label:
                label[target.sid] = len(label)
                order.append(target)
                queue.append(target)
            if h[0] not in branch_label:
                branch_label[h[0]] = len(branch_label) + 1
            if numbering is None:
                tokens.append((label[target.sid], role))
            else:
                tokens.append((label[target.sid], role, numbering[h[0]]))
    role_of = {}
    for s in order:
        for role, h in enumerate(s.slots):
            role_of[h] = (label[s.sid], role)
    punct = tuple(sorted(min(role_of[g] for g in t.region_of(h).boundary) for h in t.punctured if h in role_of))
    return tuple(tokens), punct, order, branch_label


def _component_code(t: TrainTrack, comp_sids: set[int], numbering):
    best = None
    for s in t.switches:
        if s.sid not in comp_sids:
            continue
        tokens, punct, order, blabel = _traverse(t, s, numbering)
        key = (len(order), tokens, punct)
        if best is None or key < best[0]:
            best = (key, order, blabel)
    return best


def canonical_data(t: TrainTrack, numbering: Mapping[int, int] | None = None):
    comps = t.components()
    parts = [_component_code(t, set(c), numbering) for c in comps]
    parts.sort(key=lambda p: p[0])
    return parts


def encode(parts, filling: bool) -> bytes:
    chunks = ["F" if filling else "N"]
    for (n, tokens, punct), _, _ in parts:
        body = ",".join(".".join(str(x) for x in tok) for tok in tokens)
        pc = ",".join(f"{a}.{b}" for a, b in punct)
        chunks.append(f"{n}|{body}|{pc}")
    return ";".join(chunks).encode("ascii")


def canonical_form(n: NumberedTrack | TrainTrack) -> bytes:
    """Canonical code; includes the numbering when given a ``NumberedTrack``."""
    if isinstance(n, NumberedTrack):
        return encode(canonical_data(n.track, n.numbering), n.track.filling)
    return encode(canonical_data(n), n.filling)


def canonical_relabel(t: TrainTrack) -> tuple[bytes, TrainTrack, dict[int, int]]:
    """Unnumbered code, a copy of ``t`` numbered in canonical order, and the branch map.

    Branch ids become ``1..p`` in order of first visit and switch ids ``0..V-1``
    in traversal order.  Tracks with nontrivial automorphisms get one of the
    equivalent numberings, chosen deterministically.
    """
    parts = canonical_data(t)
    bmap: dict[int, int] = {}
    smap: dict[int, int] = {}
    for _, order, blabel in parts:
        base = len(bmap)
        for b, k in sorted(blabel.items(), key=lambda kv: kv[1]):
            bmap[b] = base + k
        sbase = len(smap)
        for i, s in enumerate(order):
            smap[s.sid] = sbase + i
    return encode(parts, t.filling), t.relabeled(bmap, smap), bmap


def same_track(a: TrainTrack, b: TrainTrack, punctures: bool = True) -> bool:
    """Isomorphism test (orientation preserving) ignoring ids."""
    if not punctures:
        a = TrainTrack(a.switches, a.branches, (), a.filling, check=False)
        b = TrainTrack(b.switches, b.branches, (), b.filling, check=False)
    return canonical_form(a) == canonical_form(b)


def code_hash(code: bytes, length: int = 10) -> str:
    return hashlib.sha256(code).hexdigest()[:length]


def isomorphisms(a: TrainTrack, b: TrainTrack) -> list[dict[int, int]]:
    """All orientation-preserving isomorphisms as switch maps (brute force).

    Independent of the canonical traversal: tries every assignment of the first
    switch of ``a`` and propagates along slots.  Used as a test oracle.
    """
    if a.num_switches != b.num_switches or a.num_branches != b.num_branches:
        return []
    out = []
    if not a.switches:
        return [{}]
    s0 = a.switches[0]
    for t0 in b.switches:
        m = {s0.sid: t0.sid}
        ok = True
        stack = [(s0, t0)]
        while stack and ok:
            sa, sb = stack.pop()
            for ha, hb in zip(sa.slots, sb.slots):
                xa, xb = other_end(ha), other_end(hb)
                ta, ra = a.slot(xa)
                tb, rb = b.slot(xb)
                if ra != rb:
                    ok = False
                    break
                if ta.sid in m:
                    if m[ta.sid] != tb.sid:
                        ok = False
                        break
                else:
                    if tb.sid in m.values():
                        ok = False
                        break
                    m[ta.sid] = tb.sid
                    stack.append((ta, tb))
        if ok and len(m) == a.num_switches:
            out.append(m)
    return out
