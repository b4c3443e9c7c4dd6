"""Exception types shared across the toolkit."""


class RemovalLabError(Exception):
    pass


class BudgetExceededError(RemovalLabError):
    """A search or count ran out of its node-expansion budget.

    Deliberately distinct from a negative answer: callers must never
    interpret budget exhaustion as "no homomorphism" / "count is zero".
    """

    def __init__(self, nodes, message="node-expansion budget exceeded"):
        super().__init__(f"{message} (after {nodes} nodes)")
        self.nodes = nodes


class SizeBudgetError(RemovalLabError, ValueError):
    """Input exceeds the size cap of an exact algorithm."""


class GenerationError(RemovalLabError, RuntimeError):
    """A randomized generator failed to produce a valid object."""


class AuditError(RemovalLabError, AssertionError):
    """An internal structural verification failed.

    Raised by self-checks that are guaranteed to hold for valid inputs;
    seeing one indicates a bug, never a legitimate input condition.
    """
