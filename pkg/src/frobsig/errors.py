"""Exception hierarchy; the CLI maps each family to an exit code."""


class FrobsigError(Exception):
    exit_code = 4


class ConfigError(FrobsigError, ValueError):
    exit_code = 1


class NotSmallError(FrobsigError):
    """Raised when a computation needs a small action and the action is not small."""

    exit_code = 2

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceCapError(FrobsigError):
    exit_code = 3


class VerificationError(FrobsigError):
    """An internal consistency check failed; always a bug signal."""

    exit_code = 4


class NonEtaleError(FrobsigError, ValueError):
    exit_code = 1


class NotLinearlyReductiveError(FrobsigError, ValueError):
    exit_code = 1


class DecompositionIncomplete(FrobsigError):
    exit_code = 4


class NotIndecomposableError(FrobsigError, ValueError):
    exit_code = 4
