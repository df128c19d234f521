class RecAGTError(Exception):
    exit_code: int = 1

    def __init__(self, msg: str) -> None:
        super().__init__(msg)
        self.message: str = msg


class ConfigError(RecAGTError):
    exit_code = 3
