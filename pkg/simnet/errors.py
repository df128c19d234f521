from core.errors import RecAGTError


class SimError(RecAGTError):
    pass


class JoinFailed(SimError):
    pass
