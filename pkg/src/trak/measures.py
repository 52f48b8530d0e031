"""Transverse and tangential measures: exact cone computations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from . import linalg
from .track import TrackError, TrainTrack, classify_branch, is_orientable, other_end


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class TransverseMeasure:
    weights: Mapping[int, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "weights", {b: Fraction(w) for b, w in self.weights.items()})
        if any(w < 0 for w in self.weights.values()):
            raise MeasureError("transverse measures are nonnegative")

    def __getitem__(self, b: int) -> Fraction:
        return self.weights[b]

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def vector(self, t: TrainTrack) -> list[Fraction]:
        return [self.weights[b] for b in t.branches]

    def normalized(self) -> "TransverseMeasure":
        tot = self.total()
        return TransverseMeasure({b: w / tot for b, w in self.weights.items()})

    def is_positive(self) -> bool:
        return all(w > 0 for w in self.weights.values())

    @classmethod
    def from_vector(cls, t: TrainTrack, v) -> "TransverseMeasure":
        return cls(dict(zip(t.branches, v)))


def switch_rows(t: TrainTrack) -> list[list[int]]:
    """One row per switch: large minus the two small weights."""
    col = {b: i for i, b in enumerate(t.branches)}
    rows = []
    for s in t.switches:
        row = [0] * t.num_branches
        row[col[s.large[0]]] += 1
        row[col[s.left[0]]] -= 1
        row[col[s.right[0]]] -= 1
        rows.append(row)
    return rows


def satisfies_switch_conditions(t: TrainTrack, weights: Mapping[int, Fraction]) -> bool:
    for s in t.switches:
        if weights[s.large[0]] != weights[s.left[0]] + weights[s.right[0]]:
            return False
    return True


def measure(t: TrainTrack, weights: Mapping[int, Fraction]) -> TransverseMeasure:
    """Build a checked transverse measure on ``t``."""
    if set(weights) != set(t.branches):
        raise MeasureError("weights must cover exactly the branches of the track")
    mu = TransverseMeasure(weights)
    if not satisfies_switch_conditions(t, mu.weights):
        raise MeasureError("switch condition violated")
    return mu


def cone_basis(t: TrainTrack) -> list[list[Fraction]]:
    return linalg.nullspace(switch_rows(t), t.num_branches)


def cone_dimension(t: TrainTrack) -> int:
    return t.num_branches - linalg.rank(switch_rows(t), t.num_branches)


def is_recurrent(t: TrainTrack, method: str = "auto") -> tuple[bool, TransverseMeasure | None]:
    """Whether ``t`` carries a positive transverse measure, with a witness."""
    x = linalg.cone_point_at_least_one(switch_rows(t), [], t.num_branches, method)
    if x is None:
        return False, None
    return True, TransverseMeasure.from_vector(t, x)


# -- tangential measures -----------------------------------------------------


def tangential_rows(t: TrainTrack) -> list[list[int]]:
    """Rows ``g`` with ``g . mu >= 0`` encoding the polygon conditions.

    Side masses are counted with multiplicity.  Punctured monogons impose
    nothing.
    """
    col = {b: i for i, b in enumerate(t.branches)}
    rows = []
    for region in t.complementary_regions():
        if region.punctured:
            continue
        sides = t.region_sides(region)
        k = len(sides)
        masses = []
        for side in sides:
            v = [0] * t.num_branches
            for b in side:
                v[col[b]] += 1
            masses.append(v)
        for i in range(k):
            prev, nxt = masses[(i - 1) % k], masses[(i + 1) % k]
            rows.append([p + n - c for p, n, c in zip(prev, nxt, masses[i])])
        for j in range(k):
            v = [0] * t.num_branches
            for i in range(k):
                sign = 1 if i % 2 == 0 else -1
                side = masses[(j + i) % k]
                v = [a + sign * b for a, b in zip(v, side)]
            rows.append(v)
    return rows


def is_tangential_measure(t: TrainTrack, weights: Mapping[int, Fraction]) -> bool:
    vec = [Fraction(weights[b]) for b in t.branches]
    if any(w < 0 for w in vec):
        return False
    return all(sum(g * w for g, w in zip(row, vec)) >= 0 for row in tangential_rows(t))


def is_transversely_recurrent(t: TrainTrack, method: str = "auto") -> tuple[bool, dict[int, Fraction] | None]:
    x = linalg.cone_point_at_least_one([], tangential_rows(t), t.num_branches, method)
    if x is None:
        return False, None
    return True, dict(zip(t.branches, x))


# -- vertex cycles -----------------------------------------------------------


def vertex_cycles(t: TrainTrack) -> list[TransverseMeasure]:
    """Extreme rays of the measure cone as primitive integer measures."""
    rays = linalg.extreme_rays(switch_rows(t), t.num_branches)
    return [TransverseMeasure.from_vector(t, r) for r in rays]


def vertex_cycle_vectors(t: TrainTrack) -> list[list[int]]:
    return linalg.extreme_rays(switch_rows(t), t.num_branches)


# -- simple extensions -------------------------------------------------------


def remove_branches(t: TrainTrack, removed: set[int]) -> tuple[TrainTrack, dict[int, int]]:
    """Delete branches and smooth the switches that become bivalent.

    Returns the new track and a map from each surviving old branch to the new
    branch containing it.  The merged branch keeps the smallest old id on it.
    """
    from .track import Switch

    removed = set(removed)
    remaining_ends: dict[int, list] = {}
    for s in t.switches:
        ends = [h for h in s.slots if h[0] not in removed]
        remaining_ends[s.sid] = ends
    for sid, ends in remaining_ends.items():
        if len(ends) not in (2, 3):
            raise TrackError(f"removal leaves switch {sid} with {len(ends)} ends")
    partner: dict = {}
    for sid, ends in remaining_ends.items():
        if len(ends) == 2:
            partner[ends[0]] = ends[1]
            partner[ends[1]] = ends[0]
    trivalent = [s for s in t.switches if len(remaining_ends[s.sid]) == 3]
    trivalent_ends = {h for s in trivalent for h in s.slots}
    visited = set()
    paths = []
    for s in trivalent:
        for h in s.slots:
            if h in visited:
                continue
            path = [h[0]]
            forward = [h]
            visited.add(h)
            x = other_end(h)
            guard = 0
            while x not in trivalent_ends:
                y = partner[x]
                path.append(y[0])
                forward.append(y)
                x = other_end(y)
                guard += 1
                if guard > 4 * len(t.branches):
                    raise TrackError("smoothing loop")
            visited.add(x)
            paths.append((h, x, path, forward))
    covered = {b for _, _, p, _ in paths for b in p}
    leftover = set(t.branches) - removed - covered
    if leftover:
        raise TrackError("removal leaves a closed curve component")
    end_map = {}
    dart_map = {}
    branch_map = {}
    for h, x, path, forward in paths:
        nid = min(path)
        if h == x:
            raise TrackError("degenerate smoothing")
        a, b = sorted([h, x])
        end_map[a] = (nid, 1)
        end_map[b] = (nid, 2)
        for g in forward:
            dart_map[g] = end_map[h]
            dart_map[other_end(g)] = end_map[x]
        for old in path:
            branch_map[old] = nid
    switches = [Switch(s.sid, end_map[s.large], end_map[s.left], end_map[s.right]) for s in trivalent]
    punct = []
    for h in t.punctured:
        region = t.region_of(h)
        kept = [g for g in region.boundary if g in dart_map]
        if kept:
            punct.append(dart_map[kept[0]])
    new = TrainTrack(switches, sorted(set(branch_map.values())), punct, filling=t.filling, check=False)
    return new, branch_map


@dataclass
class SimpleExtensionReport:
    dim_sigma: int
    dim_tau: int
    dimension_drop_ok: bool
    sigma_recurrent: bool
    sigma_orientable: bool
    tau_recurrent: bool
    recurrence_transfer_ok: bool
    notes: list[str] = field(default_factory=list)


def simple_extension_check(sigma: TrainTrack, tau: TrainTrack, b: int) -> SimpleExtensionReport:
    """Check the dimension drop and recurrence transfer for ``tau = sigma + b``."""
    from .canonical import same_track

    if classify_branch(tau, b) != "small":
        raise TrackError(f"branch {b} is not small")
    if tau.switch_of((b, 1)).sid == tau.switch_of((b, 2)).sid:
        raise TrackError(f"branch {b} is incident on a single switch")
    reduced, _ = remove_branches(tau, {b})
    if not same_track(reduced, sigma, punctures=False):
        raise TrackError("removing the branch does not give sigma")
    ds, dt = cone_dimension(sigma), cone_dimension(tau)
    s_rec = is_recurrent(sigma)[0]
    s_or = is_orientable(sigma)
    t_rec = is_recurrent(tau)[0]
    notes = []
    transfer = True
    if s_rec and sigma.is_connected():
        if not s_or:
            transfer = t_rec
            notes.append("non-orientable recurrent sigma: tau must be recurrent")
        elif is_orientable(tau):
            transfer = t_rec
            notes.append("orientable extension of orientable recurrent sigma: tau must be recurrent")
    drop = dt - ds == 1 if (s_rec and sigma.is_connected() and (not s_or or is_orientable(tau))) else True
    return SimpleExtensionReport(ds, dt, drop, s_rec, s_or, t_rec, transfer, notes)


# -- file format -------------------------------------------------------------


def serialize_measure(mu: TransverseMeasure | Mapping[int, Fraction]) -> str:
    weights = mu.weights if isinstance(mu, TransverseMeasure) else mu
    lines = ["measure v1"]
    for b in sorted(weights):
        w = Fraction(weights[b])
        lines.append(f"w {b} {w.numerator}/{w.denominator}")
    return "\n".join(lines) + "\n"


def parse_measure(text: str) -> dict[int, Fraction]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "measure v1":
        raise MeasureError("expected header 'measure v1'")
    out = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3 or parts[0] != "w" or "/" not in parts[2]:
            raise MeasureError(f"bad measure line {ln!r}")
        p, q = parts[2].split("/")
        out[int(parts[1])] = Fraction(int(p), int(q))
    return out
