"""Exception types raised by the simulator."""

from __future__ import annotations


class QSSError(Exception):
    """Base class for all simulator errors."""


class ParameterError(QSSError, ValueError):
    """Invalid scheme parameters, indices or field inputs."""


class StateError(QSSError, ValueError):
    """A quantum state violates its normalization or dimension contract."""


class ProtocolOrderError(QSSError, RuntimeError):
    """A protocol phase was invoked before its preconditions were met."""


class EnumerationTooLarge(ParameterError):
    """An exhaustive enumeration would exceed the configured cap."""
