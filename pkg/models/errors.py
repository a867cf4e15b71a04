"""Exception hierarchy for the NCCW diagonal engine."""
from typing import Any, Optional


class NccwError(ValueError):
    """Base class for all engine errors."""


class InputError(NccwError):
    """Input document could not be parsed or does not match the schema."""


class PreconditionError(NccwError):
    """An operation was applied outside the hypotheses it needs."""


class SearchBudgetError(NccwError):
    """A bounded search ran out of budget before reaching a verdict."""


class PathError(NccwError):
    """A dyadic path is malformed or cannot be lifted/connected."""


class ConditionError(NccwError):
    """A tower condition or block-table inequality is violated.

    Attributes:
        condition: Name of the failing condition (e.g. 'nlc1', 'm>1')
        witness: Concrete violating tuple, if one is available
    """

    def __init__(self, condition: str, message: str, witness: Optional[Any] = None):
        super().__init__(f"[{condition}] {message}")
        self.condition = condition
        self.witness = witness
