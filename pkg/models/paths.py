"""Dyadic itinerary paths over a single tower level."""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, List, Optional, Tuple

STOP_VALUES = (Fraction(0), Fraction(1, 2), Fraction(1))


class StepKind(str, Enum):
    MOVE = "move"
    STAY = "stay"


@dataclass(frozen=True)
class Token:
    """Monotone piece of a path on one edge: from ``start`` to ``end`` (equal for STAY)."""
    edge: Hashable
    start: Fraction
    end: Fraction

    @property
    def kind(self) -> StepKind:
        return StepKind.STAY if self.start == self.end else StepKind.MOVE

    @property
    def is_stop(self) -> bool:
        """A STAY at 0, 1/2 or 1."""
        return self.kind == StepKind.STAY and self.start in STOP_VALUES

    @classmethod
    def move(cls, edge: Hashable, start, end) -> "Token":
        return cls(edge, Fraction(start), Fraction(end))

    @classmethod
    def stay(cls, edge: Hashable, value) -> "Token":
        value = Fraction(value)
        return cls(edge, value, value)


@dataclass
class DyadicPath:
    """
    Token list describing a continuous path in a spectrum approximation.

    Attributes:
        tokens: ordered tokens; consecutive tokens meet at the same spectrum point
        starts_moving: the path must begin with a MOVE out of its start point
        provenance: for lifted paths, index of the base token each token covers
    """
    tokens: List[Token] = field(default_factory=list)
    starts_moving: bool = False
    provenance: Optional[List[int]] = None

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def has_stop(self) -> bool:
        return any(token.is_stop for token in self.tokens)

    def endpoints(self) -> Tuple[Token, Token]:
        return self.tokens[0], self.tokens[-1]
