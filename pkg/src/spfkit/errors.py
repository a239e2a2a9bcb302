"""Exception hierarchy.

Every error carries a stable machine-readable ``category`` string so the
CLI and HTTP service can report failures uniformly.
"""

from __future__ import annotations


class SpfError(Exception):
    """Base class for all toolkit errors."""

    category = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DuplicateIdError(SpfError):
    category = "duplicate_id"


class ScoreOutOfRangeError(SpfError):
    category = "score_out_of_range"


class MalformedRowError(SpfError):
    category = "malformed_row"


class UnknownIdError(SpfError):
    category = "unknown_id"


class PinExcludeConflictError(SpfError):
    category = "pin_exclude_conflict"


class UnknownAttributeError(SpfError):
    category = "unknown_attribute"


class CandidateAlreadyPresentError(SpfError):
    category = "candidate_already_present"


class PoolTooSmallError(SpfError):
    category = "pool_too_small"


class BudgetExceededError(SpfError):
    category = "budget_exceeded"


class EmptyFrontierError(SpfError):
    category = "empty_frontier"


class SizeMismatchError(SpfError):
    category = "size_mismatch"


class InvalidConfigError(SpfError):
    category = "invalid_config"


class InvalidSpecError(SpfError):
    category = "invalid_spec"
