"""Engine for six families of topological grid puzzles.

Generates, solves, verifies, encodes, corrupts and serves puzzle instances,
plus the proportion statistics used to score solver runs.
"""

from topopuzzles.core import (
    Coord,
    PuzzleInstance,
    Verdict,
    canonical_hash,
    rng_stream,
)

__all__ = [
    "Coord",
    "PuzzleInstance",
    "Verdict",
    "canonical_hash",
    "rng_stream",
]

__version__ = "0.1.0"
