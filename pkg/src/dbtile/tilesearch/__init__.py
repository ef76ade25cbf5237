"""Tile generators: score construction, exact search, greedy, and bounds."""

from .bounds import BoundReport, lower_bound, path_bound
from .exact import ExactResult, SearchStatus, exact_optimal_tile
from .greedy import greedy_tile
from .score import (
    is_tie_pattern,
    score,
    score_counts,
    score_levels,
    score_tile,
    scaled_score,
    tie_node_count,
    tied_words,
)

__all__ = [
    "BoundReport",
    "ExactResult",
    "SearchStatus",
    "exact_optimal_tile",
    "greedy_tile",
    "is_tie_pattern",
    "lower_bound",
    "path_bound",
    "scaled_score",
    "score",
    "score_counts",
    "score_levels",
    "score_tile",
    "tie_node_count",
    "tied_words",
]
