"""Exception types shared by every module"""


class ArtifactError(Exception):
    """Base class for all errors raised by the toolkit"""


class PreconditionError(ArtifactError, ValueError):
    """Input violates an operation's precondition"""


class ConfigError(ArtifactError):
    """Malformed or unknown configuration"""


class CacheCorruptionError(ArtifactError):
    """A prime-window cache file is truncated or does not match a fresh sieve"""


class NumericalError(ArtifactError, ArithmeticError):
    """A series failed its reality check"""
