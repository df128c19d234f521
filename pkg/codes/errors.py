from typing import Sequence

from core.errors import RecAGTError


class CodesError(RecAGTError):
    pass


class DuplicateScalar(CodesError):
    def __init__(self, scalars: Sequence[int]) -> None:
        super().__init__(f"Evaluation scalars must be pairwise distinct, got duplicates in {list(scalars)}")
        self.scalars = list(scalars)


class ShapeMismatch(CodesError):
    pass


class LengthOverflow(CodesError):
    pass
