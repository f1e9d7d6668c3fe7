# src/utils/errors.py
from typing import Any, Dict, Optional


class ModularGroupError(Exception):
    """Base class for every domain error raised by the package."""

    def to_dict(self) -> Dict[str, Any]:
        return {"success": False, "error": str(self), "kind": type(self).__name__}


class InvalidWordError(ModularGroupError):
    pass


class InvalidInputError(ModularGroupError):
    pass


class InvalidGraphError(ModularGroupError):
    def __init__(self, invariant: str, vertex: Optional[int] = None, detail: str = ""):
        self.invariant = invariant
        self.vertex = vertex
        where = f" at vertex {vertex}" if vertex is not None else ""
        msg = f"invariant '{invariant}' violated{where}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)

    def to_dict(self) -> Dict[str, Any]:
        d = super().to_dict()
        d.update({"invariant": self.invariant, "vertex": self.vertex})
        return d


class MoveNotApplicableError(ModularGroupError):
    def __init__(self, kind: str, pattern: str):
        self.kind = kind
        self.pattern = pattern
        super().__init__(f"{kind} move not applicable: {pattern}")


class PreconditionError(ModularGroupError):
    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(f"precondition violated: {condition}")


class OracleLimitError(ModularGroupError):
    def __init__(self, n: int, limit: int, estimated: int):
        self.n = n
        self.limit = limit
        self.estimated = estimated
        super().__init__(
            f"n={n} exceeds the exhaustive limit {limit} "
            f"(about {estimated} structures would be visited)"
        )


class VerificationError(ModularGroupError):
    """An exact check of the oracle failed."""

    def __init__(self, message: str, row: Optional[Dict[str, Any]] = None):
        self.row = row or {}
        super().__init__(message)
