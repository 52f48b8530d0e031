"""Generic train tracks encoded as trivalent ribbon graphs.

A branch ``b`` has two ends ``(b, 1)`` and ``(b, 2)``.  Every switch has three
slots: the large slot and two small slots.  The slots of a switch are listed
in counterclockwise order ``(large, left, right)``, so ``left`` is the small
end met first when turning counterclockwise from the large end.

Complementary regions are the faces of the ribbon graph.  A face is traced by
leaving a switch along an end ``h``, arriving at the opposite end and turning
counterclockwise to the next slot.  Turning from a left slot to the right slot
of the same switch passes a cusp; every other turn is smooth.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

End = tuple[int, int]

LARGE, LEFT, RIGHT = 0, 1, 2
ROLE_NAMES = ("large", "left", "right")


class TrackError(ValueError):
    """Raised for structurally invalid train tracks."""


class TrackSyntaxError(TrackError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def other_end(h: End) -> End:
    return (h[0], 3 - h[1])


@dataclass(frozen=True)
class Switch:
    sid: int
    large: End
    left: End
    right: End

    @property
    def slots(self) -> tuple[End, End, End]:
        return (self.large, self.left, self.right)

    def mirrored(self) -> "Switch":
        return Switch(self.sid, self.large, self.right, self.left)


@dataclass(frozen=True)
class Region:
    """A complementary region: a cyclic list of outgoing ends plus cusp data."""

    boundary: tuple[End, ...]
    cusps: int
    punctured: bool = False

    @property
    def key(self) -> End:
        return min(self.boundary)


@dataclass(frozen=True)
class TopologicalType:
    polygon_orders: tuple[int, ...]
    punctures: int
    genus: int | None

    def __str__(self) -> str:
        inner = ",".join(str(m) for m in self.polygon_orders)
        return f"({inner};{-self.punctures})"


class TrainTrack:
    """An immutable generic train track.

    ``punctured`` lists ends lying on the boundary of once-punctured regions;
    each is normalized to the smallest end of its region.  ``filling=False``
    marks tracks whose ribbon faces are not the true complementary regions
    (produced by removing a diagonal that bounds one face on both sides); region
    shape checks are skipped for them.
    """

    __slots__ = ("switches", "branches", "punctured", "filling", "__dict__")

    def __init__(
        self,
        switches: Iterable[Switch],
        branches: Iterable[int] | None = None,
        punctured: Iterable[End] = (),
        filling: bool = True,
        check: bool = True,
    ):
        switches = tuple(sorted(switches, key=lambda s: s.sid))
        if branches is None:
            branches = {h[0] for s in switches for h in s.slots}
        self.switches: tuple[Switch, ...] = switches
        self.branches: tuple[int, ...] = tuple(sorted(branches))
        self.filling = filling
        self._check_slots()
        keys = set()
        for h in punctured:
            keys.add(self.region_of(h).key)
        self.punctured: frozenset[End] = frozenset(keys)
        if check:
            self.validate()

    # -- structure -----------------------------------------------------------

    def _check_slots(self) -> None:
        seen_ids = set()
        for s in self.switches:
            if s.sid in seen_ids:
                raise TrackError(f"duplicate switch id {s.sid}")
            seen_ids.add(s.sid)
        if len(set(self.branches)) != len(self.branches):
            raise TrackError("duplicate branch id")
        bset = set(self.branches)
        slot_of: dict[End, tuple[int, int]] = {}
        for i, s in enumerate(self.switches):
            for role, h in enumerate(s.slots):
                if h[0] not in bset:
                    raise TrackError(f"switch {s.sid} references unknown branch {h[0]}")
                if h[1] not in (1, 2):
                    raise TrackError(f"switch {s.sid}: bad end {h}")
                if h in slot_of:
                    raise TrackError(f"slot conflict: end {h[0]}.{h[1]} attached twice")
                slot_of[h] = (i, role)
        for b in self.branches:
            for e in (1, 2):
                if (b, e) not in slot_of:
                    raise TrackError(f"dangling end {b}.{e}")
        self._slot_of = slot_of

    def slot(self, h: End) -> tuple[Switch, int]:
        i, role = self._slot_of[h]
        return self.switches[i], role

    def role(self, h: End) -> int:
        return self._slot_of[h][1]

    def switch_of(self, h: End) -> Switch:
        return self.switches[self._slot_of[h][0]]

    def rotate(self, h: End) -> End:
        """Next end counterclockwise at the same switch."""
        s, role = self.slot(h)
        return s.slots[(role + 1) % 3]

    @property
    def num_branches(self) -> int:
        return len(self.branches)

    @property
    def num_switches(self) -> int:
        return len(self.switches)

    def ends(self) -> list[End]:
        return [(b, e) for b in self.branches for e in (1, 2)]

    # -- regions -------------------------------------------------------------

    @cached_property
    def _faces(self) -> tuple[tuple[tuple[End, ...], int], ...]:
        face_of: dict[End, int] = {}
        faces = []
        for start in self.ends():
            if start in face_of:
                continue
            boundary = []
            cusps = 0
            h = start
            while h not in face_of:
                face_of[h] = len(faces)
                boundary.append(h)
                x = other_end(h)
                if self.role(x) == LEFT:
                    cusps += 1
                h = self.rotate(x)
            faces.append((tuple(boundary), cusps))
        self._face_of = face_of
        return tuple(faces)

    def region_of(self, h: End) -> Region:
        self._faces
        boundary, cusps = self._faces[self._face_of[h]]
        key = min(boundary)
        return Region(boundary, cusps, key in getattr(self, "punctured", ()))

    def complementary_regions(self) -> list[Region]:
        """Regions sorted by their smallest boundary end."""
        regions = [Region(b, c, min(b) in self.punctured) for b, c in self._faces]
        return sorted(regions, key=lambda r: r.key)

    def region_sides(self, region: Region) -> list[list[int]]:
        """Split a region boundary into sides separated by cusps.

        Each side is the list of branches traversed between two consecutive
        cusps (a branch met twice is listed twice).
        """
        boundary = list(region.boundary)
        n = len(boundary)
        cusp_after = [self.role(other_end(h)) == LEFT for h in boundary]
        if not any(cusp_after):
            return [[h[0] for h in boundary]]
        start = (cusp_after.index(True) + 1) % n
        sides: list[list[int]] = []
        current: list[int] = []
        for k in range(n):
            h = boundary[(start + k) % n]
            current.append(h[0])
            if cusp_after[(start + k) % n]:
                sides.append(current)
                current = []
        return sides

    def validate(self) -> None:
        for comp in self.components():
            if not comp:
                raise TrackError("empty component")
        if not self.filling:
            return
        for r in self.complementary_regions():
            if r.punctured:
                if r.cusps != 1:
                    raise TrackError(
                        f"punctured region at {r.key} has {r.cusps} cusps; only once-punctured monogons allowed"
                    )
            elif r.cusps < 3:
                kind = {0: "nullgon", 1: "monogon", 2: "bigon"}[r.cusps]
                raise TrackError(f"region at {r.key} is an unpunctured {kind}")

    # -- global structure ----------------------------------------------------

    def components(self) -> list[list[int]]:
        """Switch ids grouped by connected component."""
        parent = {s.sid: s.sid for s in self.switches}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for b in self.branches:
            u = find(self.switch_of((b, 1)).sid)
            v = find(self.switch_of((b, 2)).sid)
            if u != v:
                parent[u] = v
        groups: dict[int, list[int]] = {}
        for s in self.switches:
            groups.setdefault(find(s.sid), []).append(s.sid)
        return sorted(groups.values())

    def component_tracks(self) -> list["TrainTrack"]:
        comps = self.components()
        if len(comps) == 1:
            return [self]
        out = []
        for comp in comps:
            cs = set(comp)
            sw = [s for s in self.switches if s.sid in cs]
            br = {h[0] for s in sw for h in s.slots}
            punct = [h for h in self.punctured if h[0] in br]
            out.append(TrainTrack(sw, br, punct, filling=self.filling, check=False))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def euler_characteristic(self) -> int:
        """Euler characteristic of the punctured surface filled by the track."""
        discs = sum(1 for r in self.complementary_regions() if not r.punctured)
        return self.num_switches - self.num_branches + discs

    # -- transformations -----------------------------------------------------

    def relabeled(self, branch_map: dict[int, int] | None = None, switch_map: dict[int, int] | None = None) -> "TrainTrack":
        bm = branch_map or {b: b for b in self.branches}
        sm = switch_map or {s.sid: s.sid for s in self.switches}

        def f(h: End) -> End:
            return (bm[h[0]], h[1])

        sw = [Switch(sm[s.sid], f(s.large), f(s.left), f(s.right)) for s in self.switches]
        return TrainTrack(sw, [bm[b] for b in self.branches], [f(h) for h in self.punctured], self.filling, check=False)

    def normalized(self) -> "TrainTrack":
        """Renumber switches 0..V-1 in order of their large end."""
        order = sorted(self.switches, key=lambda s: s.large)
        sm = {s.sid: i for i, s in enumerate(order)}
        return self.relabeled(switch_map=sm)

    def compacted(self) -> "TrainTrack":
        """Renumber branches 0..E-1 (order preserving) and normalize switches."""
        bm = {b: i for i, b in enumerate(self.branches)}
        return self.relabeled(branch_map=bm).normalized()

    def mirrored(self) -> "TrainTrack":
        """Reverse the surface orientation (swap left and right everywhere)."""
        sw = [s.mirrored() for s in self.switches]
        # region keys are recomputed from any boundary end, so carry the whole boundary
        # the same branch side is traced from the opposite end after mirroring
        marks = [other_end(h) for h in self.punctured]
        return TrainTrack(sw, self.branches, marks, self.filling, check=True)

    # -- comparisons ---------------------------------------------------------

    def _key(self):
        return (self.switches, self.branches, tuple(sorted(self.punctured)), self.filling)

    def __eq__(self, other) -> bool:
        return isinstance(other, TrainTrack) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"TrainTrack(branches={self.num_branches}, switches={self.num_switches}, punctures={len(self.punctured)})"


# -- classification ----------------------------------------------------------


def classify_branch(t: TrainTrack, b: int) -> str:
    """Return ``"large"``, ``"small"`` or ``"mixed"``."""
    if b not in t.branches:
        raise TrackError(f"unknown branch {b}")
    large = [t.role((b, e)) == LARGE for e in (1, 2)]
    if all(large):
        return "large"
    if not any(large):
        return "small"
    return "mixed"


def large_branches(t: TrainTrack) -> list[int]:
    return [b for b in t.branches if classify_branch(t, b) == "large"]


def complementary_regions(t: TrainTrack) -> list[Region]:
    return t.complementary_regions()


def topological_type(t: TrainTrack) -> TopologicalType:
    """Polygon orders, puncture count and genus of a filling track.

    For non-filling or disconnected tracks the genus is ``None``.
    """
    regions = t.complementary_regions()
    orders = tuple(sorted(r.cusps - 2 for r in regions if not r.punctured))
    m = sum(1 for r in regions if r.punctured)
    if not t.filling or not t.is_connected():
        return TopologicalType(orders, m, None)
    chi = t.euler_characteristic()
    twice_g = 2 - m - chi
    if twice_g % 2 or twice_g < 0:
        raise TrackError(f"inconsistent Euler characteristic {chi} with {m} punctures")
    g = twice_g // 2
    if sum(orders) != 4 * g - 4 + m:
        raise TrackError(f"polygon orders {orders} do not sum to 4g-4+m = {4 * g - 4 + m}")
    return TopologicalType(orders, m, g)


def _orientation_parity(t: TrainTrack) -> dict[int, int] | None:
    """Solve for branch orientations; ``None`` when no orientation exists.

    ``o[b] = 1`` orients ``b`` from end 1 to end 2.  The end ``(b, e)`` points
    into its switch iff ``o[b] XOR (e == 1)``.  At a switch the large end and
    the small ends must point in opposite senses, the two small ends alike.
    """
    adj: dict[int, list[tuple[int, int]]] = {b: [] for b in t.branches}

    def link(h1: End, h2: End, differ: int) -> None:
        # inward(h1) xor inward(h2) == differ  ->  o1 xor o2 == differ xor c
        c = (h1[1] == 1) ^ (h2[1] == 1)
        w = differ ^ c
        adj[h1[0]].append((h2[0], w))
        adj[h2[0]].append((h1[0], w))

    for s in t.switches:
        link(s.large, s.left, 1)
        link(s.left, s.right, 0)
    o: dict[int, int] = {}
    for root in t.branches:
        if root in o:
            continue
        o[root] = 1
        stack = [root]
        while stack:
            b = stack.pop()
            for nb, w in adj[b]:
                want = o[b] ^ w
                if nb in o:
                    if o[nb] != want:
                        return None
                else:
                    o[nb] = want
                    stack.append(nb)
    return o


def is_orientable(t: TrainTrack) -> bool:
    return _orientation_parity(t) is not None


def twist_connectors(t: TrainTrack) -> list[tuple[int, int]]:
    """Pairs ``(large branch, small branch)`` forming an embedded smooth loop."""
    out = []
    for e in large_branches(t):
        u = t.switch_of((e, 1)).sid
        v = t.switch_of((e, 2)).sid
        for b in t.branches:
            if classify_branch(t, b) != "small":
                continue
            ends = {t.switch_of((b, 1)).sid, t.switch_of((b, 2)).sid}
            if ends == {u, v}:
                out.append((e, b))
    return out


# -- text format -------------------------------------------------------------


def _parse_end(token: str, lineno: int, col: int) -> End:
    try:
        b, e = token.split(".")
        end = (int(b), int(e))
    except ValueError:
        raise TrackSyntaxError(f"malformed end {token!r}", lineno, col) from None
    if end[1] not in (1, 2):
        raise TrackSyntaxError(f"end index must be 1 or 2 in {token!r}", lineno, col)
    return end


def parse_track(text: str) -> TrainTrack:
    """Parse a ``track v1`` file."""
    lines = text.splitlines()
    header_seen = False
    branches: list[int] = []
    switches: list[Switch] = []
    puncture_idx: list[tuple[int, int]] = []
    nonfilling = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        col = raw.index(words[0]) + 1
        if not header_seen:
            if words != ["track", "v1"]:
                raise TrackSyntaxError("expected header 'track v1'", lineno, col)
            header_seen = True
            continue
        kw = words[0]
        if kw == "branch":
            if len(words) != 2:
                raise TrackSyntaxError("expected 'branch <id>'", lineno, col)
            try:
                branches.append(int(words[1]))
            except ValueError:
                raise TrackSyntaxError(f"bad branch id {words[1]!r}", lineno, raw.index(words[1]) + 1) from None
        elif kw == "switch":
            if len(words) != 5:
                raise TrackSyntaxError("expected 'switch <id> large=.. left=.. right=..'", lineno, col)
            try:
                sid = int(words[1])
            except ValueError:
                raise TrackSyntaxError(f"bad switch id {words[1]!r}", lineno, raw.index(words[1]) + 1) from None
            slots = {}
            for w in words[2:]:
                c = raw.index(w) + 1
                if "=" not in w:
                    raise TrackSyntaxError(f"expected key=value, got {w!r}", lineno, c)
                k, v = w.split("=", 1)
                if k not in ROLE_NAMES or k in slots:
                    raise TrackSyntaxError(f"unexpected slot {k!r}", lineno, c)
                slots[k] = _parse_end(v, lineno, c)
            switches.append(Switch(sid, slots["large"], slots["left"], slots["right"]))
        elif kw == "puncture":
            if len(words) != 2 or not words[1].startswith("region="):
                raise TrackSyntaxError("expected 'puncture region=<index>'", lineno, col)
            try:
                puncture_idx.append((int(words[1][len("region="):]), lineno))
            except ValueError:
                raise TrackSyntaxError(f"bad region index {words[1]!r}", lineno, col) from None
        elif kw == "nonfilling" and len(words) == 1:
            nonfilling = True
        else:
            raise TrackSyntaxError(f"unknown directive {kw!r}", lineno, col)
    if not header_seen:
        raise TrackSyntaxError("empty file", 1)
    if not branches:
        raise TrackSyntaxError("no branches", len(lines) or 1)
    bare = TrainTrack(switches, branches, (), filling=not nonfilling, check=False)
    regions = bare.complementary_regions()
    marks = []
    for idx, lineno in puncture_idx:
        if not 0 <= idx < len(regions):
            raise TrackSyntaxError(f"region index {idx} out of range (0..{len(regions) - 1})", lineno)
        marks.append(regions[idx].key)
    return TrainTrack(switches, branches, marks, filling=not nonfilling)


def serialize_track(t: TrainTrack) -> str:
    out = ["track v1"]
    if not t.filling:
        out.append("nonfilling")
    out += [f"branch {b}" for b in t.branches]

    def fmt(h: End) -> str:
        return f"{h[0]}.{h[1]}"

    for s in t.switches:
        out.append(f"switch {s.sid} large={fmt(s.large)} left={fmt(s.left)} right={fmt(s.right)}")
    regions = t.complementary_regions()
    for i, r in enumerate(regions):
        if r.punctured:
            out.append(f"puncture region={i}")
    return "\n".join(out) + "\n"


def read_track(path) -> TrainTrack:
    with open(path, encoding="utf-8") as fh:
        return parse_track(fh.read())
