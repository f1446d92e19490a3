"""Exception types shared across the toolkit."""
from __future__ import annotations


class MmconcError(Exception):
    """Base class for every toolkit error."""


class InvalidSpace(MmconcError):
    """Distance matrix violates a construction invariant."""


class InvalidMeasure(MmconcError):
    """Weight vector violates a construction invariant."""


class DimensionMismatch(MmconcError):
    """Operands are defined over point sets of different sizes."""


class MassNotOne(MmconcError):
    """Restriction set does not carry full probability mass."""


class SolverFailure(MmconcError):
    """The LP backend did not return an optimal solution."""


class TooLarge(MmconcError):
    """Instance exceeds the size limit of an exhaustive routine."""


class BadWitness(MmconcError):
    """Claimed equicontinuity witness delta fails on some pair."""


class NotLipschitzOnSubset(MmconcError):
    """Partial function is not k-Lipschitz on its domain."""


class BoundExceeded(MmconcError):
    """Partial function exceeds the requested sup-norm bound."""


class BadFamily(MmconcError):
    """Function family violates the bounded 1-Lipschitz requirement."""


class Infeasible(MmconcError):
    """Requested mass exceeds the total available mass."""


class NotDominated(MmconcError):
    """Expected entrywise ordering between distance matrices fails."""


class InvalidGroup(MmconcError):
    """Multiplication table violates a group axiom."""


class BadElement(MmconcError):
    """Group element index out of range."""


class NotHomomorphism(MmconcError):
    """Map between groups fails the multiplicativity check."""


class NotRightInvariant(MmconcError):
    """Metric fails right invariance on the group."""


class InvalidFlow(MmconcError):
    """Action table violates identity or compatibility."""


class BadPoint(MmconcError):
    """Base point index out of range."""


class EmptyElementSet(MmconcError):
    """Displacement requested over an empty element set."""


class NotInvariant(MmconcError):
    """Measure expected to be invariant under the action is not."""


class MapMismatch(MmconcError):
    """Sequence, target, and maps have inconsistent shapes."""


class InvariantViolation(MmconcError):
    """A verified mathematical guarantee failed at runtime."""


class ConfigError(MmconcError):
    """Scenario or CLI configuration is malformed."""


class UnknownGenerator(MmconcError):
    """Generator name in a JSON spec is not recognized."""


class PartialFailure(MmconcError):
    """Some scenario rows failed; completed rows were still written."""

    def __init__(self, message: str, failures: list[tuple[str, str]] | None = None):
        super().__init__(message)
        self.failures = failures or []
