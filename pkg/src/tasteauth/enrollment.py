"""Enrollment: rating capture, revision, and portfolio partitioning.

A user's liking ratings are the authentication secret. The portfolio is split
by rank into a key pool (top fraction), a buffer band that is never shown on
challenge screens, and a decoy pool (bottom fraction). Eligibility checks that
the pools can sustain challenge generation under a given screen policy.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable

from .bank import ImageBank, ImageRecord, validate_rating
from .errors import DuplicateError, NotFoundError, StateError, ValidationError
from .randutil import sample_without_replacement


@dataclass
class RatingRecord:
    user_id: str
    image_id: str
    value: int
    created_at: float = 0.0
    updated_at: float = 0.0
    revisions: int = 0
    history: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class EnrollmentPolicy:
    r_min: int = 72
    p_key: float = 0.20
    p_decoy: float = 0.60
    margin: int = 2

    def __post_init__(self):
        if not 0 < self.p_key <= 1 or not 0 < self.p_decoy <= 1:
            raise ValidationError("pool fractions must lie in (0, 1]")
        if self.p_key + self.p_decoy > 1 + 1e-12:
            raise ValidationError("p_key + p_decoy must not exceed 1")
        if self.r_min < 1:
            raise ValidationError("r_min must be >= 1")
        if self.margin < 0:
            raise ValidationError("margin must be >= 0")


@dataclass
class Portfolio:
    user_id: str
    ratings: dict[str, RatingRecord] = field(default_factory=dict)

    @property
    def rated_count(self) -> int:
        return len(self.ratings)

    def values(self) -> dict[str, int]:
        return {image_id: rec.value for image_id, rec in self.ratings.items()}

    def to_json(self) -> str:
        return json.dumps(
            {
                "user_id": self.user_id,
                "ratings": [
                    {"image_id": r.image_id, "value": r.value, "revisions": r.revisions}
                    for r in sorted(self.ratings.values(), key=lambda r: r.image_id)
                ],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Portfolio":
        doc = json.loads(text)
        portfolio = cls(user_id=doc["user_id"])
        for entry in doc["ratings"]:
            value = validate_rating(entry["value"])
            image_id = entry["image_id"]
            if image_id in portfolio.ratings:
                raise DuplicateError(f"duplicate rating for {image_id}")
            portfolio.ratings[image_id] = RatingRecord(
                user_id=doc["user_id"],
                image_id=image_id,
                value=value,
                revisions=int(entry.get("revisions", 0)),
            )
        return portfolio

    @classmethod
    def from_values(cls, user_id: str, values: dict[str, int]) -> "Portfolio":
        portfolio = cls(user_id=user_id)
        for image_id, value in values.items():
            portfolio.ratings[image_id] = RatingRecord(
                user_id=user_id, image_id=image_id, value=validate_rating(value)
            )
        return portfolio


@dataclass(frozen=True)
class PortfolioPartition:
    user_id: str
    key_pool: tuple[str, ...]
    buffer: tuple[str, ...]
    decoy_pool: tuple[str, ...]
    order: tuple[str, ...]          # full rank order, best-liked first
    ratings: dict[str, int]         # image id -> current rating value

    @property
    def min_key_rating(self) -> int:
        return min(self.ratings[i] for i in self.key_pool)

    @property
    def max_decoy_rating(self) -> int:
        return max(self.ratings[i] for i in self.decoy_pool) if self.decoy_pool else 0


def rank_tiebreak(user_id: str, image_id: str) -> int:
    """Stable per-(user, image) hash used to order equal ratings.

    Pure function of its inputs, so partitions reproduce across runs and
    platforms and cannot be steered by insertion order.
    """
    digest = hashlib.sha256(f"{user_id}|{image_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def partition_portfolio(
    portfolio: Portfolio, policy: EnrollmentPolicy | None = None
) -> PortfolioPartition:
    """Split a portfolio into key/buffer/decoy bands by rating rank.

    Band sizes are ceil(p_key * R) and ceil(p_decoy * R); when the ceilings
    would overlap, the decoy band shrinks so the three bands partition the
    rated set exactly.
    """
    policy = policy or EnrollmentPolicy()
    r = portfolio.rated_count
    if r < 1:
        raise ValidationError("cannot partition an empty portfolio")
    values = portfolio.values()
    order = sorted(
        values,
        key=lambda image_id: (
            -values[image_id],
            rank_tiebreak(portfolio.user_id, image_id),
            image_id,
        ),
    )
    key_n = math.ceil(policy.p_key * r)
    decoy_n = min(math.ceil(policy.p_decoy * r), r - key_n)
    buffer_n = r - key_n - decoy_n
    return PortfolioPartition(
        user_id=portfolio.user_id,
        key_pool=tuple(order[:key_n]),
        buffer=tuple(order[key_n : key_n + buffer_n]),
        decoy_pool=tuple(order[key_n + buffer_n :]),
        order=tuple(order),
        ratings=values,
    )


@dataclass(frozen=True)
class EligibilityReport:
    eligible: bool
    reasons: tuple[str, ...] = ()


def eligibility_check(
    partition: PortfolioPartition,
    auth_policy,
    enrollment_policy: EnrollmentPolicy | None = None,
) -> EligibilityReport:
    """Judge whether a partitioned portfolio can sustain authentication.

    Checks minimum rated count, that both pools can fill every screen of a
    session without repeats, and that the pools are separated by the required
    rating margin. Always returns a report; every failed clause is listed.
    """
    enrollment_policy = enrollment_policy or EnrollmentPolicy()
    reasons: list[str] = []
    r = len(partition.order)
    if r < enrollment_policy.r_min:
        reasons.append(
            f"rated {r} images, need at least {enrollment_policy.r_min}"
        )
    keys_needed = auth_policy.keys_per_screen * auth_policy.screens_per_session
    if len(partition.key_pool) < keys_needed:
        reasons.append(
            f"key pool {len(partition.key_pool)} < {keys_needed} needed for a session"
        )
    decoys_needed = auth_policy.decoys_per_screen * auth_policy.screens_per_session
    if len(partition.decoy_pool) < decoys_needed:
        reasons.append(
            f"decoy pool {len(partition.decoy_pool)} < {decoys_needed} needed for a session"
        )
    if partition.key_pool and partition.decoy_pool:
        gap = partition.min_key_rating - partition.max_decoy_rating
        margin = max(enrollment_policy.margin, auth_policy.margin)
        if gap < margin:
            reasons.append(
                f"key/decoy rating gap {gap} below required margin {margin}"
            )
    return EligibilityReport(eligible=not reasons, reasons=tuple(reasons))


class EnrollmentLedger:
    """Per-user rating state against an image bank.

    Tracks which images were served for rating (a rating is only accepted for
    an image that was actually served), current ratings, and revision history.
    A ``session_guard`` callable blocks rating revision while the user has an
    open challenge session.
    """

    def __init__(
        self,
        bank: ImageBank,
        policy: EnrollmentPolicy | None = None,
        session_guard: Callable[[str], bool] | None = None,
    ):
        self.bank = bank
        self.policy = policy or EnrollmentPolicy()
        self.session_guard = session_guard or (lambda user_id: False)
        self._served: dict[str, set[str]] = {}
        self._portfolios: dict[str, Portfolio] = {}

    def portfolio(self, user_id: str) -> Portfolio:
        if user_id not in self._portfolios:
            self._portfolios[user_id] = Portfolio(user_id=user_id)
        return self._portfolios[user_id]

    def served_ids(self, user_id: str) -> set[str]:
        return self._served.setdefault(user_id, set())

    def next_rating_batch(self, user_id: str, n: int, rng) -> list[ImageRecord]:
        """Draw up to ``n`` unseen active images uniformly without replacement.

        Returns fewer than ``n`` only when the bank is exhausted for this user;
        an empty result is not an error. The draw is a pure function of the
        supplied ``rng`` state and the user's served set.
        """
        if n < 1:
            raise ValidationError("batch size must be >= 1")
        served = self.served_ids(user_id)
        unseen = [i for i in self.bank.active_ids() if i not in served]
        chosen = sample_without_replacement(rng, unseen, min(n, len(unseen)))
        served.update(chosen)
        return [self.bank.get(i) for i in chosen]

    def mark_served(self, user_id: str, image_ids) -> None:
        """Replay hook: restore a previously served batch without redrawing."""
        self.served_ids(user_id).update(image_ids)

    def record_rating(
        self, user_id: str, image_id: str, value: int, now: float = 0.0
    ) -> RatingRecord:
        validate_rating(value)
        if image_id not in self.served_ids(user_id):
            raise StateError(f"image {image_id} was never served to {user_id}")
        portfolio = self.portfolio(user_id)
        if image_id in portfolio.ratings:
            raise DuplicateError(
                f"{user_id} already rated {image_id}; use revise_rating"
            )
        record = RatingRecord(
            user_id=user_id,
            image_id=image_id,
            value=value,
            created_at=now,
            updated_at=now,
        )
        portfolio.ratings[image_id] = record
        return record

    def revise_rating(
        self, user_id: str, image_id: str, new_value: int, now: float = 0.0
    ) -> RatingRecord:
        validate_rating(new_value)
        if self.session_guard(user_id):
            raise StateError(
                "cannot revise ratings while a challenge session is in progress"
            )
        portfolio = self.portfolio(user_id)
        record = portfolio.ratings.get(image_id)
        if record is None:
            raise NotFoundError(f"{user_id} has no rating for {image_id}")
        record.history.append(record.value)
        record.value = new_value
        record.revisions += 1
        record.updated_at = now
        return record
