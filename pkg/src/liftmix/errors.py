"""Exception taxonomy for liftmix.

Every error raised by the library derives from LiftmixError so callers can
catch the whole family at once (the CLI maps them to exit code 2).
"""

from __future__ import annotations


class LiftmixError(Exception):
    """Base class for all liftmix errors."""


class DisconnectedGraph(LiftmixError):
    pass


class NoSpanningTree(LiftmixError):
    pass


class TooManyNodes(LiftmixError):
    pass


class BadSize(LiftmixError):
    pass


class DimensionMismatch(LiftmixError):
    pass


class ReducibleChain(LiftmixError):
    pass


class NotStationary(LiftmixError):
    pass


class EmptyCutWeight(LiftmixError):
    pass


class InfeasibleLP(LiftmixError):
    pass


class BadGamma(LiftmixError):
    pass


class MissingInitMap(LiftmixError):
    pass


class BadChoiceMap(LiftmixError):
    pass


class ZeroMarginalSupport(LiftmixError):
    pass


class LengthMismatch(LiftmixError):
    pass


class EmptyChain(LiftmixError):
    pass


class GammaTooLarge(LiftmixError):
    pass


class GammaTooLargeForDelta(LiftmixError):
    pass


class MissingReferenceChain(LiftmixError):
    pass


class NegativeEntry(LiftmixError):
    pass


class NoConvergence(LiftmixError):
    pass


class BadColumnSum(LiftmixError):
    pass


class LocalityViolation(LiftmixError):
    pass


class BadScenario(LiftmixError):
    pass
