"""
Workbench Exceptions
====================
One hierarchy for every failure the engine reports. The CLI maps
BudgetExceededError to exit code 3 and every other WorkbenchError to 2.
"""


class WorkbenchError(Exception):
    """Base class for all engine errors."""


class StructureError(WorkbenchError, ValueError):
    """A structure violates its invariants. Carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid structure")


class NumberDomainError(WorkbenchError, ValueError):
    pass


class InjectionError(WorkbenchError, ValueError):
    pass


class FormulaParseError(WorkbenchError, ValueError):
    """Syntax error at a character offset of the formula text."""

    def __init__(self, message: str, position: int):
        self.message = message
        self.position = position
        super().__init__(f"{message} (at position {position})")


class SortError(WorkbenchError, ValueError):
    pass


class BudgetExceededError(WorkbenchError):
    pass


class InterpretationError(WorkbenchError, ValueError):
    pass


class InconsistentOffsetError(WorkbenchError, ValueError):
    pass


class TreeError(WorkbenchError, ValueError):
    """A node set does not fit the tree or violates an operation's precondition."""


class ConfigError(WorkbenchError, ValueError):
    pass


class ConstantMismatchError(ConfigError):
    pass


class IllegalMoveError(WorkbenchError):
    """A move was rejected. `actor` is the player who forfeits."""

    def __init__(self, actor, reason: str):
        self.actor = actor
        self.reason = reason
        name = getattr(actor, "name", actor)
        super().__init__(f"illegal move by {name}: {reason}")


class TranscriptError(WorkbenchError):
    pass


class OracleLimitError(WorkbenchError, ValueError):
    pass


class UnboundVariableError(WorkbenchError, ValueError):
    pass
