"""Exact distributions over {0,1}^n and their entropy measures."""

from .distribution import (
    Distribution,
    EntropyReport,
    min_entropy,
    statistical_distance,
    euclidean_distance,
    restricted_l1,
    restricted_l2,
    mass_above_threshold,
    smooth_min_entropy,
    smoothing_witness,
    biased_set,
    entropy_report,
    TOLERANCE,
    MAX_BITS,
)
from .fixtures import FIXTURE_KINDS, make, pushforward, sample_distinct_points
from .file_formats import dump_json, load_json, dump_binary, load_binary, load_distribution

__all__ = [
    "Distribution",
    "EntropyReport",
    "min_entropy",
    "statistical_distance",
    "euclidean_distance",
    "restricted_l1",
    "restricted_l2",
    "mass_above_threshold",
    "smooth_min_entropy",
    "smoothing_witness",
    "biased_set",
    "entropy_report",
    "TOLERANCE",
    "MAX_BITS",
    "FIXTURE_KINDS",
    "make",
    "pushforward",
    "sample_distinct_points",
    "dump_json",
    "load_json",
    "dump_binary",
    "load_binary",
    "load_distribution",
]
