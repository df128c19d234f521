from core.errors import ConfigError, RecAGTError


class IdentityError(RecAGTError):
    pass


class MalformedKey(IdentityError):
    pass


class WireFormatError(IdentityError):
    pass


class CommitteeTooLarge(ConfigError):
    def __init__(self, n: int, q: int) -> None:
        super().__init__(f"Cannot assign {n} distinct nonzero scalars in F_{q}")
        self.n: int = n
        self.q: int = q
