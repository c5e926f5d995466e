"""Scoring of submitted selections and the session accept/reject decision."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ValidationError


@dataclass(frozen=True)
class Selection:
    session_id: str
    screen_no: int
    chosen: frozenset[str]


@dataclass(frozen=True)
class VerificationResult:
    per_screen_scores: tuple[int, ...]
    total: int
    decision: str  # "accept" | "reject"
    mode: str

    def to_dict(self) -> dict:
        return {"total": self.total, "decision": self.decision}


def score_screen(screen, chosen: Iterable[str], keys_per_screen: int) -> int:
    """Count correct selections on one screen.

    The score is the size of the intersection with the hidden key set; which
    individual selections were wrong is never part of the result.
    """
    chosen = frozenset(chosen)
    if len(chosen) != keys_per_screen:
        raise ValidationError(
            f"must select exactly {keys_per_screen} images, got {len(chosen)}"
        )
    displayed = set(screen.displayed)
    stray = chosen - displayed
    if stray:
        raise ValidationError(f"selection includes images not on screen: {sorted(stray)}")
    return len(chosen & screen.key_set)


def decide_session(scores: Sequence[int], policy) -> VerificationResult:
    """Combine per-screen scores into the session decision.

    Strict mode accepts only a perfect session; threshold mode accepts when
    the total reaches the configured threshold (inclusive).
    """
    scores = tuple(int(s) for s in scores)
    if len(scores) != policy.screens_per_session:
        raise ValidationError(
            f"expected {policy.screens_per_session} screen scores, got {len(scores)}"
        )
    for s in scores:
        if not 0 <= s <= policy.keys_per_screen:
            raise ValidationError(f"screen score {s} outside [0, {policy.keys_per_screen}]")
    total = sum(scores)
    if policy.mode == "strict":
        accept = total == policy.max_total
    else:
        accept = total >= policy.threshold
    return VerificationResult(
        per_screen_scores=scores,
        total=total,
        decision="accept" if accept else "reject",
        mode=policy.mode,
    )
