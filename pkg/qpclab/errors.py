"""
Exception types raised by qpclab.

Plain ``TypeError`` and ``ValueError`` are used for bad arguments throughout the
package. The classes below mark failures that belong to the simulation itself.
"""


class QpcError(Exception):
    """Base class for errors raised by qpclab."""


class ConfigurationError(QpcError, ValueError):
    """A run or check was configured in a way that cannot be executed."""


class StateCollapseError(QpcError, RuntimeError):
    """A measurement branch with zero probability was asked to renormalize."""


class MalformedMessageError(QpcError, ValueError):
    """A classical message body does not match what its receiver expects."""
