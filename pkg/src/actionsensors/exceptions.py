"""Exception taxonomy for the whole package."""

from __future__ import annotations


class ActionSensorsError(Exception):
    """Base class for every error raised by this package."""


class InvariantViolation(ActionSensorsError):
    """A structural invariant of a world, plan, or document is broken."""


class TraceError(ActionSensorsError):
    """Base class for failures while replaying an execution."""


class NoInitialMatch(TraceError):
    """No initial vertex is consistent with the first observation."""


class DeadTrace(TraceError):
    """No edge is consistent with an action/observation step."""


class AmbiguousTrace(TraceError):
    """Several vertices remain consistent; reported rather than resolved."""


class ActionNotOffered(TraceError):
    """The execution takes an action absent from the current plan state."""


class AlphabetMismatch(ActionSensorsError):
    """Plan declares actions or observations outside the world's alphabets."""


class ScopeViolation(ActionSensorsError):
    """World is outside the supported scope (see model.check_scope)."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"world outside supported scope: {report}")


class NotFinite(ActionSensorsError):
    """The joint-execution language is unbounded."""


class BoundExceeded(ActionSensorsError):
    """Execution enumeration hit its explicit length bound."""


class NotASolution(ActionSensorsError):
    """Operation requires a plan that solves the world."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"plan does not solve the world: {report}")


class CrossoverError(ActionSensorsError):
    """No progress measure exists; carries the witnessing conflicts."""

    def __init__(self, conflicts):
        self.conflicts = tuple(conflicts)
        pairs = ", ".join(
            "{%s, %s}" % (c.state_a, c.state_b) for c in self.conflicts
        )
        super().__init__(f"crossover conflicts prevent a progress measure: {pairs}")


class InvalidMeasure(ActionSensorsError):
    """A supplied progress measure fails verification."""


class NoRepresentative(ActionSensorsError):
    """Every branch of the clipping search was pruned."""


class CapExceeded(ActionSensorsError):
    """Exhaustive enumeration would exceed the configured cap."""


class NotACovering(ActionSensorsError):
    """Some reachable non-goal observation has no progress-making action."""


class SelectionOutsideCone(ActionSensorsError):
    """A permissive selection contains an action outside the cone relation."""


class EmptySelection(ActionSensorsError):
    """A permissive selection is empty or missing for some observation."""


class PartitionMismatch(ActionSensorsError):
    """Sensor partition and constraint cover different state sets."""


class ParseError(ActionSensorsError):
    """A document file cannot be parsed against the schema."""


class VersionMismatch(ActionSensorsError):
    """A document declares an unsupported format version."""
