"""Exception types raised across the package."""


class FockError(ValueError):
    """Base class for invalid operations on sector states."""


class VacuumError(FockError):
    """An annihilation-type operator was applied to the empty sector."""


class EmptyModeError(FockError):
    """A particle was requested from a mode with zero occupation."""


class SectorMismatchError(FockError):
    """Two states live in different sectors or mode bases."""


class BasisError(FockError):
    """The operation requires a state expressed in a different mode basis."""


class ImpossibleBranchError(FockError):
    """A measurement outcome with zero probability was requested."""


class PhaseUndefinedError(FockError):
    """The state carries no transverse spin, so it has no phase."""


class ConfigError(ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
