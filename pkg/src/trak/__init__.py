"""Train tracks, their splitting moves and the symbolic dynamics they generate."""

from .track import (
    TopologicalType,
    TrackError,
    TrackSyntaxError,
    TrainTrack,
    classify_branch,
    complementary_regions,
    is_orientable,
    parse_track,
    read_track,
    serialize_track,
    topological_type,
    twist_connectors,
)

__version__ = "0.1.0"
