"""Challenge generation and the session state machine.

Each session holds several screens; each screen displays a shuffled mix of
keys (from the user's key pool) and decoys (from the decoy pool) with no image
repeated anywhere in the session. Key membership never leaves the server:
clients only ever see the ordered list of displayed image ids.
"""

from __future__ import annotations

import random
import uuid
from dataclasses import dataclass
from typing import Iterable

from .enrollment import EnrollmentPolicy, PortfolioPartition, eligibility_check
from .errors import (
    IneligibleError,
    InfeasibleError,
    StateError,
    ValidationError,
)
from .randutil import sample_without_replacement, shuffled
from . import verification

MODE_STRICT = "strict"
MODE_THRESHOLD = "threshold"

SESSION_OPEN = "open"
SESSION_COMPLETED = "completed"
SESSION_EXPIRED = "expired"

KIND_AUTH = "auth"
KIND_GAME = "game"
KIND_ADVERSARIAL = "adversarial"

MAX_SCREEN_ATTEMPTS = 1000
DEFAULT_SESSION_TTL = 600.0  # seconds
DEFAULT_KEY_COOLDOWN_SESSIONS = 2


@dataclass(frozen=True)
class AuthPolicy:
    images_per_screen: int = 8
    keys_per_screen: int = 2
    screens_per_session: int = 4
    margin: int = 2
    mode: str = MODE_STRICT
    threshold: int | None = None
    interactive: bool = True

    def __post_init__(self):
        if self.images_per_screen <= 2:
            raise ValidationError("images_per_screen must exceed 2")
        if not 1 <= self.keys_per_screen <= self.images_per_screen:
            raise ValidationError("keys_per_screen must lie in [1, images_per_screen]")
        if self.screens_per_session < 1:
            raise ValidationError("screens_per_session must be >= 1")
        if self.interactive and not 3 <= self.screens_per_session <= 5:
            raise ValidationError(
                "interactive sessions use 3..5 screens; "
                "pass interactive=False for simulation policies"
            )
        if self.margin < 0:
            raise ValidationError("margin must be >= 0")
        if self.mode not in (MODE_STRICT, MODE_THRESHOLD):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_THRESHOLD:
            if self.threshold is None:
                raise ValidationError("threshold mode requires a threshold")
            if not 0 <= self.threshold <= self.max_total:
                raise ValidationError("threshold outside [0, max_total]")
        elif self.threshold is not None:
            raise ValidationError("threshold only valid in threshold mode")

    @property
    def decoys_per_screen(self) -> int:
        return self.images_per_screen - self.keys_per_screen

    @property
    def max_total(self) -> int:
        return self.keys_per_screen * self.screens_per_session

    def to_dict(self) -> dict:
        return {
            "images_per_screen": self.images_per_screen,
            "keys_per_screen": self.keys_per_screen,
            "screens_per_session": self.screens_per_session,
            "margin": self.margin,
            "mode": self.mode,
            "threshold": self.threshold,
            "interactive": self.interactive,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AuthPolicy":
        return cls(**doc)


@dataclass(frozen=True)
class ScreenSpec:
    screen_no: int
    displayed: tuple[str, ...]
    key_set: frozenset[str]

    def __post_init__(self):
        if len(set(self.displayed)) != len(self.displayed):
            raise ValidationError("displayed images must be distinct")
        if not self.key_set <= set(self.displayed):
            raise ValidationError("key_set must be a subset of displayed")


@dataclass
class SessionSpec:
    session_id: str
    user_id: str
    kind: str
    policy: AuthPolicy
    screens: tuple[ScreenSpec, ...]
    seed: int
    created_at: float = 0.0
    status: str = SESSION_OPEN

    def all_image_ids(self) -> set[str]:
        return {i for screen in self.screens for i in screen.displayed}

    def key_ids(self) -> set[str]:
        return {i for screen in self.screens for i in screen.key_set}


def generate_session(
    partition: PortfolioPartition,
    policy: AuthPolicy,
    seed: int,
    enrollment_policy: EnrollmentPolicy | None = None,
    kind: str = KIND_AUTH,
    session_id: str | None = None,
    created_at: float = 0.0,
    exclude_keys: Iterable[str] = (),
) -> SessionSpec:
    """Generate a randomized challenge session for an eligible portfolio.

    Keys are drawn uniformly without replacement from the key pool and decoys
    from the decoy pool, subject to the per-screen rating margin and to no
    image repeating within the session. ``exclude_keys`` removes images on
    key-reuse cooldown from the effective key pool. Identical (partition,
    policy, seed) always yields an identical session.
    """
    report = eligibility_check(partition, policy, enrollment_policy)
    if not report.eligible:
        raise IneligibleError(report.reasons)

    excluded = set(exclude_keys)
    key_pool = [i for i in partition.key_pool if i not in excluded]
    decoy_pool = list(partition.decoy_pool)
    keys_needed = policy.keys_per_screen * policy.screens_per_session
    if len(key_pool) < keys_needed:
        raise InfeasibleError(
            f"effective key pool {len(key_pool)} cannot fill {keys_needed} key slots"
        )
    decoys_needed = policy.decoys_per_screen * policy.screens_per_session
    if len(decoy_pool) < decoys_needed:
        raise InfeasibleError(
            f"decoy pool {len(decoy_pool)} cannot fill {decoys_needed} decoy slots"
        )

    rng = random.Random(seed)
    ratings = partition.ratings
    screens = []
    for screen_no in range(1, policy.screens_per_session + 1):
        for _ in range(MAX_SCREEN_ATTEMPTS):
            keys = sample_without_replacement(rng, key_pool, policy.keys_per_screen)
            decoys = sample_without_replacement(rng, decoy_pool, policy.decoys_per_screen)
            gap = min(ratings[k] for k in keys) - (
                max(ratings[d] for d in decoys) if decoys else 0
            )
            if not decoys or gap >= policy.margin:
                break
        else:
            raise InfeasibleError(
                f"no margin-feasible screen {screen_no} found in "
                f"{MAX_SCREEN_ATTEMPTS} attempts"
            )
        key_pool = [i for i in key_pool if i not in keys]
        decoy_pool = [i for i in decoy_pool if i not in decoys]
        screens.append(
            ScreenSpec(
                screen_no=screen_no,
                displayed=tuple(shuffled(rng, keys + decoys)),
                key_set=frozenset(keys),
            )
        )

    return SessionSpec(
        session_id=session_id or uuid.uuid4().hex,
        user_id=partition.user_id,
        kind=kind,
        policy=policy,
        screens=tuple(screens),
        seed=seed,
        created_at=created_at,
    )


def screen_client_view(session: SessionSpec, screen: ScreenSpec) -> dict:
    """Wire form of a screen. Key membership is deliberately absent."""
    return {
        "session_id": session.session_id,
        "screen_no": screen.screen_no,
        "image_ids": list(screen.displayed),
    }


class SessionRun:
    """Serving and scoring state for one session.

    Screens are served strictly in order and each is scored exactly once; the
    next screen is only served after the previous one was scored. Expiry is
    checked lazily against the supplied clock value.
    """

    def __init__(self, spec: SessionSpec, ttl: float = DEFAULT_SESSION_TTL):
        self.spec = spec
        self.ttl = ttl
        self.served_upto = 0     # highest screen_no handed to the client
        self.scores: list[int] = []
        self.result_: verification.VerificationResult | None = None

    @property
    def policy(self) -> AuthPolicy:
        return self.spec.policy

    @property
    def status(self) -> str:
        return self.spec.status

    def check_open(self, now: float | None = None) -> None:
        if self.spec.status == SESSION_COMPLETED:
            raise StateError(f"session {self.spec.session_id} already completed")
        if self.spec.status == SESSION_EXPIRED:
            raise StateError(f"session {self.spec.session_id} expired")
        if now is not None and now - self.spec.created_at > self.ttl:
            self.spec.status = SESSION_EXPIRED
            raise StateError(f"session {self.spec.session_id} expired")

    def screen_for_display(self, screen_no: int, now: float | None = None) -> dict:
        """Serve screen ``screen_no`` to the client, enforcing order."""
        self.check_open(now)
        if not 1 <= screen_no <= len(self.spec.screens):
            raise ValidationError(f"screen_no {screen_no} outside session")
        expected = len(self.scores) + 1
        if screen_no != expected:
            raise StateError(
                f"screens are served in order; expected screen {expected}, "
                f"got {screen_no}"
            )
        self.served_upto = max(self.served_upto, screen_no)
        return screen_client_view(self.spec, self.spec.screens[screen_no - 1])

    def submit_selection(
        self, screen_no: int, chosen: Iterable[str], now: float | None = None
    ) -> dict:
        """Score one screen's selection; returns count-only feedback."""
        self.check_open(now)
        expected = len(self.scores) + 1
        if screen_no != expected:
            raise StateError(
                f"screen {screen_no} not awaiting a selection "
                f"(expected screen {expected})"
            )
        if screen_no > self.served_upto:
            raise StateError(f"screen {screen_no} was never served")
        screen = self.spec.screens[screen_no - 1]
        score = verification.score_screen(screen, chosen, self.policy.keys_per_screen)
        self.scores.append(score)
        remaining = len(self.spec.screens) - len(self.scores)
        feedback = {
            "screen_no": screen_no,
            "screen_score": score,
            "screens_remaining": remaining,
        }
        if remaining == 0:
            self.result_ = verification.decide_session(self.scores, self.policy)
            self.spec.status = SESSION_COMPLETED
            feedback["total"] = self.result_.total
            feedback["decision"] = self.result_.decision
        return feedback

    def result(self) -> verification.VerificationResult:
        if self.result_ is None:
            raise StateError("session has unscored screens")
        return self.result_
