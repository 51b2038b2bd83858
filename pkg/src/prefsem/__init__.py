"""Choice functions, preferential structures and their algebraic conditions."""

from .conditions import ConditionId, ConditionReport, check, check_all, holds
from .construction import build_cum_example, build_fact23_example, verify_cum_example
from .errors import (AtomUnknownError, ClaimViolatedError, KappaOutOfRangeError,
                     NotInDomainError, PreconditionError, SearchSpaceTooLargeError)
from .preferential import PreferentialStructure, induced_choice, is_smooth, mu
from .sets import ChoiceFunction, GroundSet, SetFamily

__version__ = "0.1.0"

__all__ = [
    "AtomUnknownError", "ChoiceFunction", "ClaimViolatedError", "ConditionId", "ConditionReport",
    "GroundSet", "KappaOutOfRangeError", "NotInDomainError", "PreconditionError",
    "PreferentialStructure", "SearchSpaceTooLargeError", "SetFamily", "build_cum_example",
    "build_fact23_example", "check", "check_all", "holds", "induced_choice", "is_smooth", "mu",
    "verify_cum_example",
]
