"""Search random ribbon graphs for the fixture tracks and write them out.

Run from the repository root: ``python3 scripts/make_fixtures.py``.  The
search is seeded, so reruns reproduce the committed fixtures.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

from trak.canonical import canonical_form, isomorphisms
from trak.generate import random_track
from trak.measures import is_recurrent, is_transversely_recurrent, remove_branches
from trak.moves import SplitChoice, split
from trak.symbolic import build_subshift, mixing_report
from trak.track import (
    TrackError,
    TrainTrack,
    classify_branch,
    is_orientable,
    large_branches,
    serialize_track,
    topological_type,
    twist_connectors,
)

OUT = Path(__file__).resolve().parents[1] / "src" / "trak" / "fixtures"


def renumber(t: TrainTrack) -> TrainTrack:
    bmap = {b: i + 1 for i, b in enumerate(t.branches)}
    return t.relabeled(branch_map=bmap).normalized()


def write(name: str, t: TrainTrack, note: str) -> None:
    path = OUT / name
    path.parent.mkdir(parents=True, exist_ok=True)
    text = serialize_track(renumber(t))
    header = "".join(f"# {line}\n" for line in note.splitlines())
    lines = text.splitlines(keepends=True)
    path.write_text(lines[0] + header + "".join(lines[1:]))
    print("wrote", path.relative_to(OUT.parent.parent.parent), topological_type(t))


def find(rng, n_switches, pred, tries=200000):
    for _ in range(tries):
        t = random_track(rng, n_switches, 20)
        if t is not None and pred(t):
            return t
    raise RuntimeError("search failed")


def type_is(t, text):
    return str(topological_type(t)) == text


def rec(t):
    return is_recurrent(t)[0]


def sphere5(rng):
    t = find(rng, 8, lambda t: type_is(t, "(1;-5)") and rec(t))
    # move the seed into the strongly connected core of its closure, so the
    # closure of the fixture itself is transitive
    s = build_subshift([t], 5000, numbered=False)
    for i in range(s.size):
        s2 = build_subshift([s.representatives[i]], 5000, numbered=False)
        if s2.closed and mixing_report(s2).transitive:
            return s.representatives[i]
    raise RuntimeError("no transitive core letter")


def removal_candidates(t):
    for b in t.branches:
        if classify_branch(t, b) != "small":
            continue
        if t.switch_of((b, 1)).sid == t.switch_of((b, 2)).sid:
            continue
        if t.region_of((b, 1)).key == t.region_of((b, 2)).key:
            continue
        try:
            sigma, _ = remove_branches(t, {b})
            sigma = TrainTrack(sigma.switches, sigma.branches, sigma.punctured)
        except TrackError:
            continue
        yield b, sigma


def figure_b_like(t):
    if not (type_is(t, "(4;0)") and not is_orientable(t) and rec(t)):
        return None
    for e in large_branches(t):
        try:
            c, _ = split(t, SplitChoice(e, "C"))
        except ValueError:
            continue
        if is_orientable(c):
            return e
    return None


def genus2_chain(rng):
    """A maximal genus-2 track and a chain of small-branch removals to type (4;0)."""
    while True:
        top = find(rng, 12, lambda t: type_is(t, "(1,1,1,1;0)") and rec(t) and is_transversely_recurrent(t)[0])
        chain = [top]
        for _ in range(3):
            options = [s for _, s in removal_candidates(chain[-1]) if rec(s) and not is_orientable(s)]
            if not options:
                break
            chain.append(rng.choice(options))
        if len(chain) == 4 and figure_b_like(chain[-1]) is not None:
            return chain


def main() -> int:
    rng = random.Random(20240601)
    write("sphere5.trk", sphere5(rng), "maximal track on the five-punctured sphere: one trigon, five punctured monogons")
    chain = genus2_chain(rng)
    write("genus2max.trk", chain[0], "maximal track on the closed genus-2 surface: four trigons")
    for k, t in enumerate(chain):
        write(f"genus2chain/step{3 - k}.trk", t, f"genus-2 chain, {3 - k} small-branch removals above type (4;0)")
    e = figure_b_like(renumber(chain[-1]))
    write("genus2one.trk", chain[-1], f"non-orientable recurrent track of type (4;0); the central split at branch {e} is orientable")
    tc = find(rng, 8, lambda t: rec(t) and len(twist_connectors(t)) == 1)
    write("twistconn.trk", tc, "recurrent track with exactly one twist connector")
    nr = find(rng, 6, lambda t: not rec(t))
    write("nonrecurrent.trk", nr, "valid track that carries no positive transverse measure")
    ch = find(rng, 6, lambda t: rec(t) and not isomorphisms(t, t.mirrored()))
    assert canonical_form(ch) != canonical_form(ch.mirrored())
    write("chiral.trk", ch, "recurrent track not isomorphic to its mirror image")
    wanted = [
        (4, "(;-4)", False), (8, "(1;-5)", False), (4, "(1;-1)", False), (6, "(2;-2)", False),
        (8, "(1,1;-2)", False), (8, "(3;-3)", False), (6, "(4;0)", False), (6, "(4;0)", True),
        (8, "(2,2;0)", True), (8, "(5;-1)", False), (8, "(1,3;0)", False), (12, "(1,1,1,1;0)", False),
    ]
    for k, (v, ty, orient) in enumerate(wanted):
        t = find(rng, v, lambda t: type_is(t, ty) and is_orientable(t) == orient and rec(t))
        g = topological_type(t).genus
        write(f"corpus/c{k:02d}.trk", t, f"corpus track, genus {g}, {'orientable' if orient else 'non-orientable'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
