class HomologyError(Exception):
    """Base class for every failure raised by the homology engine."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage):
        """Attach a stage name unless a more specific one is already set."""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self):
        if self.stage:
            return f"{self.stage}: {self.message}"
        return self.message


class DimensionMismatchError(HomologyError):
    pass


class DegreeMismatchError(HomologyError):
    pass


class UnsupportedDegreeError(HomologyError):
    pass


class UnderdeterminedBoundaryError(HomologyError):
    """Declared boundary lifts do not span the kernel they are meant to cover."""


class ContradictionError(HomologyError):
    pass


class InconsistentScenarioError(HomologyError):
    pass


class InconsistentModelError(HomologyError):
    """Two computations of the same group disagree."""


class WrongRuleError(HomologyError):
    pass


class UnsupportedWeightError(HomologyError):
    pass


class ScenarioParseError(HomologyError):
    pass
