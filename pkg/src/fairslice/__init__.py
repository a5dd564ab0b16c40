"""Envy-free division of a cake, chores or a mixed cake among groups of players."""

from fairslice.core import (
    AdditivePiecewiseConstant, AdditivePlayer, Assignment, Partition, Side,
    TwoPiecePreference, merge_adjacent, validate_partition,
)
from fairslice.protocols import (
    monotone_marks, singleton_first, singleton_last, verify_envy_free,
)
from fairslice.queries import PreferenceOracle, QueryTranscript

__all__ = [
    "AdditivePiecewiseConstant", "AdditivePlayer", "Assignment", "Partition", "PreferenceOracle",
    "QueryTranscript", "Side", "TwoPiecePreference", "merge_adjacent", "monotone_marks",
    "singleton_first", "singleton_last", "validate_partition", "verify_envy_free",
]
__version__ = "0.1.0"
