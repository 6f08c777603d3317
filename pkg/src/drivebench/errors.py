"""Shared exception types."""


class StateIntegrityError(ValueError):
    """A simulation state or action contains non-finite values."""


class PlanShapeError(ValueError):
    """An action plan does not match the expected (agents, horizon) shape."""


class ScenarioValidationError(ValueError):
    """A scenario config failed validation.

    ``violations`` lists every problem found, one message per entry.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class CheckpointFormatError(ValueError):
    """A checkpoint file is malformed or has an unsupported version."""
