"""Exception types shared across the package."""


class OwnetError(Exception):
    """Base class for all domain errors (CLI maps these to exit code 1)."""


class GraphLoadError(OwnetError):
    """Malformed input data; carries the offending row number when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class UnknownEntityError(OwnetError):
    """An operation referenced an entity id that is not in the graph."""

    def __init__(self, entity_id: str):
        self.entity_id = entity_id
        super().__init__(f"unknown entity {entity_id!r}")


class InsufficientShareError(OwnetError):
    """A seller was asked to part with more share than it holds."""


class DivergentCycleError(OwnetError):
    """A cycle with edge-weight product >= 1 makes the ownership series diverge.

    ``cycle`` lists the node ids on one witnessing cycle when known.
    """

    def __init__(self, cycle: list[str] | None = None):
        self.cycle = list(cycle) if cycle else []
        detail = " -> ".join(self.cycle) if self.cycle else "unknown cycle"
        super().__init__(f"divergent ownership cycle: {detail}")


class SubgraphError(OwnetError):
    """The claimed subgraph contains entities or edges absent from the base."""


class ConfigError(OwnetError):
    """Infeasible or malformed configuration."""
