from __future__ import annotations


class BarnesZetaError(Exception):
    """Base class of all errors raised by this package."""


class PoleError(BarnesZetaError, ValueError):
    """Evaluation requested at (or numerically too close to) a pole."""


class ApproximationError(BarnesZetaError, ValueError):
    """A real number could not be rationalized into a usable positive rational."""


class NoSignChange(BarnesZetaError, ValueError):
    """The bracket handed to the root finder does not enclose a sign change."""


class CapExceededError(BarnesZetaError, ValueError):
    """Arguments beyond the supported orders of the closed-form assembly."""


class ConvergenceError(BarnesZetaError, RuntimeError):
    """A truncated series cannot certify the requested accuracy."""


class InternalError(BarnesZetaError, RuntimeError):
    """An arithmetic invariant that must always hold was violated. This is a bug."""
