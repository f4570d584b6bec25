from .codes import (
    EXIT_CONFIG_ERROR,
    EXIT_FAILURE,
    EXIT_IDENTITY_VIOLATION,
    EXIT_RESOURCE_LIMIT,
)


class GWIError(Exception):
    exit_code = EXIT_FAILURE


class LawSpecError(GWIError):
    """A law or an ensemble of laws is malformed."""

    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, message: str, law: str | None = None):
        self.law = law
        if law is not None:
            message = f"{law}: {message}"
        super().__init__(message)


class ConfigError(GWIError):
    exit_code = EXIT_CONFIG_ERROR


class ResourceLimitError(GWIError):
    exit_code = EXIT_RESOURCE_LIMIT


class HorizonError(GWIError):
    """A value was requested beyond a simulated or truncated horizon."""

    exit_code = EXIT_RESOURCE_LIMIT


class InsufficientSampleError(GWIError):
    exit_code = EXIT_CONFIG_ERROR


class ForestInvariantError(GWIError):
    exit_code = EXIT_IDENTITY_VIOLATION

    def __init__(self, message: str, vertex: int | None = None):
        self.vertex = vertex
        if vertex is not None:
            message = f"vertex {vertex}: {message}"
        super().__init__(message)


class IdentityViolation(GWIError):
    exit_code = EXIT_IDENTITY_VIOLATION

    def __init__(self, identity: str, i=None, j=None, h=None, index=None):
        self.identity = identity
        self.i, self.j, self.h, self.index = i, j, h, index
        where = ", ".join(
            f"{name}={value}"
            for name, value in (("i", i), ("j", j), ("h", h), ("index", index))
            if value is not None
        )
        super().__init__(f"{identity} violated at {where}")
