"""Exception hierarchy shared by every granflow module."""

from __future__ import annotations


class GranflowError(Exception):
    """Base class for all granflow errors."""


class InvalidInput(GranflowError, ValueError):
    """An argument is outside the domain of the evaluated law."""


class NonPositivePressure(InvalidInput):
    pass


class InvalidMaterial(InvalidInput):
    pass


class DegenerateStrainRate(InvalidInput):
    """The mu(I) director D/|D| is undefined because |D| = 0."""


class SlopeOutOfRange(InvalidInput):
    """Incline angle outside the open interval where the viscous coefficient is defined."""


class NonFiniteState(GranflowError, RuntimeError):
    """A solver field became NaN or infinite."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message if t is None else f"{message} (t = {t!r} s)")
        self.t = t


class ScenarioError(GranflowError, ValueError):
    """Base for scenario validation failures; carries the offending key and line."""

    def __init__(self, key: str, reason: str = "", line: int | None = None):
        self.key = key
        self.reason = reason
        self.line = line
        where = f" (line {line})" if line is not None else ""
        msg = f"{self.label}: {key!r}{where}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)

    label = "scenario error"


class MissingKey(ScenarioError):
    label = "missing key"


class BadValue(ScenarioError):
    label = "bad value"


class InconsistentModel(ScenarioError):
    label = "inconsistent model"
