# src/models/moves.py
from enum import Enum
from typing import Any, Dict, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from src.models.graph import KAPPA_3, LAMBDA_21, LAMBDA_22, LAMBDA_3, TypeDelta


class MoveKind(str, Enum):
    LAMBDA_3 = "Lambda3"
    LAMBDA_21 = "Lambda21"
    LAMBDA_22 = "Lambda22"
    KAPPA_3 = "Kappa3"
    EXCEPTIONAL = "Exceptional"

    @property
    def delta(self) -> TypeDelta:
        """Fixed type change of the move; exceptional moves have none."""
        if self is MoveKind.EXCEPTIONAL:
            raise ValueError("exceptional moves carry a graph dependent delta")
        return _DELTAS[self]

    @property
    def arity(self) -> int:
        return 1 if self in (MoveKind.LAMBDA_3, MoveKind.LAMBDA_21) else 2


_DELTAS = {
    MoveKind.LAMBDA_3: LAMBDA_3,
    MoveKind.LAMBDA_21: LAMBDA_21,
    MoveKind.LAMBDA_22: LAMBDA_22,
    MoveKind.KAPPA_3: KAPPA_3,
}

REGULAR_KINDS = (MoveKind.LAMBDA_3, MoveKind.LAMBDA_21, MoveKind.LAMBDA_22, MoveKind.KAPPA_3)


class MoveRecord(BaseModel):
    """One rewriting step.

    ``pivots`` is ``(v,)`` for λ₃ and λ₂,₁, ``(v, w)`` for λ₂,₂ (a-loop at v,
    isolated b-edge v–w) and κ₃ (isolated b-edge from v to w), and the full
    vertex list for exceptional moves.
    """

    model_config = ConfigDict(frozen=True)

    kind: MoveKind
    pivots: Tuple[int, ...]
    delta: TypeDelta

    @model_validator(mode="after")
    def _check(self) -> "MoveRecord":
        if self.kind is not MoveKind.EXCEPTIONAL:
            if tuple(self.delta) != tuple(self.kind.delta):
                raise ValueError(f"delta {tuple(self.delta)} does not match {self.kind.value}")
            if len(self.pivots) != self.kind.arity:
                raise ValueError(f"{self.kind.value} takes {self.kind.arity} pivot(s)")
        return self

    @classmethod
    def regular(cls, kind: MoveKind, *pivots: int) -> "MoveRecord":
        return cls(kind=kind, pivots=tuple(pivots), delta=kind.delta)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "pivots": list(self.pivots), "delta": list(self.delta)}
