"""Exception hierarchy shared by every analysis module."""


class ReefError(Exception):
    """Base class for all analysis failures."""


class DomainError(ReefError, ValueError):
    """Input outside the domain of the map (e.g. the grazing singularity C = 1)."""


class NotAFixedPoint(ReefError):
    """The supplied state is not a fixed point of the map."""


class InternalInconsistency(ReefError):
    """Two independent computation routes disagree."""


class NotInFlipRegion(ReefError):
    """No admissible positive root of F(-1) = 0 for the requested branch."""


class NotInNsRegion(ReefError):
    """The equilibrium never carries a unit-modulus complex eigenvalue pair."""


class DegenerateTransform(ReefError):
    """A normal-form change of coordinates is singular."""


class InsufficientSamples(ReefError):
    """Too few orbit samples to classify an attractor."""
