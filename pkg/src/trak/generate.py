"""Random trivalent ribbon graphs, used for fixture search and property tests."""

from __future__ import annotations

import random

from .track import Switch, TrackError, TrainTrack


def random_ribbon(rng: random.Random, n_switches: int) -> TrainTrack:
    """A uniformly shuffled assignment of branch ends to switch slots.

    The result satisfies the slot matching but not necessarily the region
    constraints; it is built unchecked and without punctures.
    """
    if n_switches % 2 or n_switches <= 0:
        raise ValueError("a trivalent graph needs a positive even number of switches")
    n_branches = 3 * n_switches // 2
    ends = [(b, e) for b in range(1, n_branches + 1) for e in (1, 2)]
    rng.shuffle(ends)
    switches = [Switch(i, *ends[3 * i : 3 * i + 3]) for i in range(n_switches)]
    return TrainTrack(switches, range(1, n_branches + 1), (), check=False)


def puncture_monogons(t: TrainTrack) -> TrainTrack | None:
    """Mark every monogon as punctured; ``None`` if the result is invalid."""
    marks = [r.key for r in t.complementary_regions() if r.cusps == 1]
    try:
        out = TrainTrack(t.switches, t.branches, marks)
    except TrackError:
        return None
    if not out.is_connected():
        return None
    return out


def random_track(rng: random.Random, n_switches: int, attempts: int = 1000) -> TrainTrack | None:
    """First valid connected track found among ``attempts`` random ribbons."""
    for _ in range(attempts):
        t = puncture_monogons(random_ribbon(rng, n_switches))
        if t is not None:
            return t
    return None
