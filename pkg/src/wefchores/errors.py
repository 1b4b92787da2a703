"""Exception hierarchy shared by every module."""


class WefChoresError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(WefChoresError, ValueError):
    """Malformed or invalid instance data.

    ``location`` is a 1-indexed ``(agent, item)`` pair when the problem can be
    pinned to a single cell, ``(agent, None)`` for an agent-level problem and
    ``None`` otherwise.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} at {_format_location(location)}"
        super().__init__(message)


def _format_location(location):
    agent, item = location
    if item is None:
        return f"agent {agent}"
    if agent is None:
        return f"item {item}"
    return f"(agent {agent}, item {item})"


class ParseError(InstanceError):
    pass


class NonPositiveWeight(InstanceError):
    pass


class NegativeCost(InstanceError):
    pass


class DimensionMismatch(InstanceError):
    pass


class ZeroTotalCost(WefChoresError, ValueError):
    """Normalization requested for an agent whose total cost is zero."""

    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"agent {agent + 1} has zero total cost; cannot normalize")


class NotBivalued(WefChoresError, ValueError):
    pass


class InfeasibleParameters(WefChoresError, ValueError):
    pass


class IncompleteAllocation(WefChoresError, ValueError):
    pass


class BudgetExceeded(WefChoresError, RuntimeError):
    def __init__(self, needed, cap, what="states"):
        self.needed = needed
        self.cap = cap
        super().__init__(f"exhaustive search needs {needed} {what}, budget is {cap}")


class WrongAgentCount(WefChoresError, ValueError):
    pass


class UndefinedRatio(WefChoresError, ZeroDivisionError):
    """The optimal social cost is zero, so a cost ratio is undefined."""


class InvalidSpec(WefChoresError, ValueError):
    pass


class InvariantViolation(WefChoresError, AssertionError):
    """A runtime check of the market algorithm failed. Always a bug."""

    def __init__(self, name, round_index, detail=""):
        self.name = name
        self.round = round_index
        msg = f"invariant {name!r} violated in round {round_index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
