from core.errors import ConfigError, RecAGTError


class FieldError(RecAGTError):
    pass


class ZeroInverse(FieldError, ZeroDivisionError):
    pass


class InvalidModulus(FieldError, ConfigError):
    pass


class NotPrime(InvalidModulus):
    pass


class PackingUnsupported(FieldError, ConfigError):
    pass
