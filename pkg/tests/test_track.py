from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from trak import (
    TrackError,
    TrackSyntaxError,
    TrainTrack,
    classify_branch,
    complementary_regions,
    is_orientable,
    parse_track,
    serialize_track,
    topological_type,
    twist_connectors,
)
from trak.track import Switch, large_branches

from conftest import corpus, fixture, track_from_seed


def test_sphere5_counts_and_regions(sphere5):
    assert sphere5.num_branches == 12 and sphere5.num_switches == 8
    regions = complementary_regions(sphere5)
    assert len(regions) == 6
    assert sorted((r.cusps, r.punctured) for r in regions) == [(1, True)] * 5 + [(3, False)]
    ty = topological_type(sphere5)
    assert (ty.polygon_orders, ty.punctures, ty.genus) == ((1,), 5, 0)
    assert str(ty) == "(1;-5)"


def test_genus2max_counts_and_regions():
    t = fixture("genus2max.trk")
    assert t.num_branches == 18 and t.num_switches == 12
    assert [r.cusps for r in complementary_regions(t)] == [3, 3, 3, 3]
    ty = topological_type(t)
    assert (ty.polygon_orders, ty.punctures, ty.genus) == ((1, 1, 1, 1), 0, 2)
    assert twist_connectors(t) == []


def test_genus2one_type_and_orientability():
    t = fixture("genus2one.trk")
    ty = topological_type(t)
    assert (ty.polygon_orders, ty.punctures, ty.genus) == ((4,), 0, 2)
    assert not is_orientable(t)


def test_twist_connector_fixture():
    t = fixture("twistconn.trk")
    pairs = twist_connectors(t)
    assert len(pairs) == 1
    e, s = pairs[0]
    assert classify_branch(t, e) == "large"
    assert classify_branch(t, s) == "small"


def test_classify_definitions(sphere5):
    for b in sphere5.branches:
        roles = {sphere5.role((b, 1)) == 0, sphere5.role((b, 2)) == 0}
        expected = "large" if roles == {True} else "small" if roles == {False} else "mixed"
        assert classify_branch(sphere5, b) == expected
    with pytest.raises(TrackError):
        classify_branch(sphere5, 999)


def test_punctured_monogon_forces_non_orientable(sphere5):
    assert not is_orientable(sphere5)


def test_empty_file_is_syntax_error():
    with pytest.raises(TrackSyntaxError):
        parse_track("")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("track v1\nbranch 1\nswitch 0 large=1.1 left=1.2 right=1.3\n", "line 3"),
        ("track v1\nbranch 1\nbranch 2\nswitch 0 large=1.1 left=1.2 right=2.1\n", "dangling"),
        ("track v1\nbranch 1\nswitch 0 large=1.1 left=1.2 right=1.1\n", "slot conflict"),
        ("track v2\n", "header"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(TrackError, match=fragment):
        parse_track(text)


def test_bigon_is_rejected():
    # two switches joined by three branches: the theta graph has bigon faces
    sw = [Switch(0, (1, 1), (2, 1), (3, 1)), Switch(1, (1, 2), (3, 2), (2, 2))]
    with pytest.raises(TrackError):
        TrainTrack(sw)


def test_puncture_must_mark_a_monogon(sphere5):
    text = serialize_track(sphere5)
    trigon = [i for i, r in enumerate(complementary_regions(sphere5)) if r.cusps == 3][0]
    with pytest.raises(TrackError, match="punctured"):
        parse_track(text + f"puncture region={trigon}\n")


def test_mirror_keeps_punctures_on_the_same_regions():
    for t in corpus():
        m = t.mirrored()
        assert topological_type(m) == topological_type(t)
        assert m.mirrored() == t


def test_round_trip_fixtures():
    for t in corpus() + [fixture("sphere5.trk"), fixture("genus2max.trk")]:
        text = serialize_track(t)
        assert serialize_track(parse_track(text)) == text
        assert parse_track(text) == t


@given(st.integers(0, 10**6), st.sampled_from([4, 6, 8]))
def test_random_track_invariants(seed, n):
    t = track_from_seed(seed, n)
    if t is None:
        return
    # trivalence
    assert 2 * t.num_branches == 3 * t.num_switches
    # every branch side appears exactly once in the region boundaries
    seen = [h for r in complementary_regions(t) for h in r.boundary]
    assert sorted(seen) == sorted(t.ends())
    ty = topological_type(t)
    assert sum(ty.polygon_orders) == 4 * ty.genus - 4 + ty.punctures
    if any(r.cusps % 2 for r in complementary_regions(t)):
        assert not is_orientable(t)
    assert parse_track(serialize_track(t)) == t


@given(st.integers(0, 10**6))
def test_regions_independent_of_labels(seed):
    t = track_from_seed(seed)
    if t is None:
        return
    perm = list(t.branches)
    perm.reverse()
    bm = dict(zip(t.branches, perm))
    u = t.relabeled(branch_map=bm)
    assert sorted(r.cusps for r in complementary_regions(u)) == sorted(r.cusps for r in complementary_regions(t))
    assert topological_type(u) == topological_type(t)


def test_connectors_are_disjoint():
    for t in corpus() + [fixture("twistconn.trk")]:
        pairs = twist_connectors(t)
        used = [b for p in pairs for b in p]
        assert len(used) == len(set(used))


def test_large_branches_exist_on_corpus():
    for t in corpus():
        assert large_branches(t)
