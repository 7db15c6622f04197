"""Win/tie/loss outcome labels shared by all criteria."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Outcome(enum.Enum):
    WIN = "win"
    TIE = "tie"
    LOSS = "loss"

    @property
    def symbol(self) -> str:
        return {Outcome.WIN: "✓", Outcome.TIE: "≈", Outcome.LOSS: "✗"}[self]


@dataclass(frozen=True)
class OutcomeLabel:
    """An outcome plus a short evidence note explaining how it was reached."""

    outcome: Outcome
    note: str = ""

    @property
    def symbol(self) -> str:
        return self.outcome.symbol

    def is_win(self) -> bool:
        return self.outcome is Outcome.WIN

    def is_loss(self) -> bool:
        return self.outcome is Outcome.LOSS
