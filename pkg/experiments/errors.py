from core.errors import ConfigError


class InvalidParams(ConfigError):
    pass
