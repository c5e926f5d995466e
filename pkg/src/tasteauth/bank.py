"""Image bank: ingestion, lifecycle, rating aggregates, and pretest curation.

The bank holds the pool of candidate images that challenges draw from. Images
enter as ``candidate``, are promoted to ``active`` for serving, and move to
``retired`` when curation excludes them (they are never deleted, so historical
sessions stay replayable).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DuplicateError, NotFoundError, ValidationError

CATEGORIES = (
    "Universe",
    "Nature",
    "Mountains",
    "Forest",
    "Flowers",
    "Cityscapes",
    "Seaside",
    "Other",
)

STATUS_CANDIDATE = "candidate"
STATUS_ACTIVE = "active"
STATUS_RETIRED = "retired"
_STATUSES = (STATUS_CANDIDATE, STATUS_ACTIVE, STATUS_RETIRED)

RATING_MIN = 1
RATING_MAX = 10


@dataclass
class ImageRecord:
    image_id: str
    uri: str
    category: str
    source: str = ""
    status: str = STATUS_CANDIDATE

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValidationError(
                f"unknown category {self.category!r}; expected one of {CATEGORIES}"
            )
        if self.status not in _STATUSES:
            raise ValidationError(f"unknown status {self.status!r}")
        if not self.uri:
            raise ValidationError("uri must be nonempty")


@dataclass(frozen=True)
class ImageStats:
    """Aggregate rating statistics for one image.

    ``sd`` is the sample standard deviation (0.0 when fewer than two ratings).
    ``unreliable`` is set when the image has fewer ratings than the policy
    minimum and its stats should not drive curation decisions.
    """

    image_id: str
    n: int
    mean: float
    low: int
    high: int
    sd: float
    unreliable: bool


@dataclass(frozen=True)
class BankPolicy:
    ap_min: int = 200
    ap_max: int = 1000
    lower_bound: float = 4.00
    upper_bound: float = 8.00
    min_ratings: int = 5
    min_range: int = 5

    def __post_init__(self):
        if not self.ap_min < self.ap_max:
            raise ValidationError("ap_min must be < ap_max")
        if not (1 <= self.lower_bound < self.upper_bound <= 10):
            raise ValidationError("bounds must satisfy 1 <= lower < upper <= 10")
        if self.min_ratings < 1:
            raise ValidationError("min_ratings must be >= 1")


@dataclass(frozen=True)
class Verdict:
    KEEP = "keep"
    EXCLUDE = "exclude"
    INSUFFICIENT_DATA = "insufficient_data"

    action: str
    reason: str | None = None


def validate_rating(value) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"rating must be an integer, got {value!r}")
    if not RATING_MIN <= value <= RATING_MAX:
        raise ValidationError(
            f"rating {value} outside [{RATING_MIN}, {RATING_MAX}]"
        )
    return value


def compute_image_stats(
    ratings: Iterable[int], image_id: str = "", min_ratings: int = 5
) -> ImageStats:
    """Aggregate a list of 1-10 ratings into per-image statistics."""
    values = [validate_rating(r) for r in ratings]
    if not values:
        raise ValidationError("cannot compute stats over zero ratings")
    n = len(values)
    mean = sum(values) / n
    if n >= 2:
        var = sum((v - mean) ** 2 for v in values) / (n - 1)
        sd = math.sqrt(var)
    else:
        sd = 0.0
    return ImageStats(
        image_id=image_id,
        n=n,
        mean=mean,
        low=min(values),
        high=max(values),
        sd=sd,
        unreliable=n < min_ratings,
    )


def pretest_filter(stats: ImageStats, policy: BankPolicy) -> Verdict:
    """Decide whether an image stays in the servable bank.

    Excludes extreme-average images (mean at or beyond the policy bounds) and,
    once enough ratings exist, images whose ratings barely disperse; too few
    ratings yields an insufficient-data verdict instead of a decision.
    """
    if stats.n < policy.min_ratings:
        return Verdict(Verdict.INSUFFICIENT_DATA)
    if stats.mean <= policy.lower_bound:
        return Verdict(Verdict.EXCLUDE, f"mean {stats.mean:.2f} <= lower bound {policy.lower_bound}")
    if stats.mean >= policy.upper_bound:
        return Verdict(Verdict.EXCLUDE, f"mean {stats.mean:.2f} >= upper bound {policy.upper_bound}")
    if stats.n >= 10 and (stats.high - stats.low) < policy.min_range:
        return Verdict(
            Verdict.EXCLUDE,
            f"rating range {stats.high - stats.low} < minimum dispersion {policy.min_range}",
        )
    return Verdict(Verdict.KEEP)


def _image_id_for(uri: str) -> str:
    return "img-" + hashlib.sha256(uri.encode("utf-8")).hexdigest()[:12]


@dataclass
class CurationReport:
    kept: list[str] = field(default_factory=list)
    retired: list[tuple[str, str]] = field(default_factory=list)
    insufficient: list[str] = field(default_factory=list)
    size_violation: str | None = None


class ImageBank:
    """Mutable registry of images with single-writer curation."""

    def __init__(self, policy: BankPolicy | None = None):
        self.policy = policy or BankPolicy()
        self._records: dict[str, ImageRecord] = {}
        self._by_uri: dict[str, str] = {}
        self._ratings: dict[str, list[int]] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._records

    def get(self, image_id: str) -> ImageRecord:
        try:
            return self._records[image_id]
        except KeyError:
            raise NotFoundError(f"no image {image_id!r}") from None

    def ingest_image(self, uri: str, category: str, source: str = "") -> ImageRecord:
        if not uri:
            raise ValidationError("uri must be nonempty")
        if uri in self._by_uri:
            raise DuplicateError(f"uri already ingested: {uri}")
        record = ImageRecord(
            image_id=_image_id_for(uri), uri=uri, category=category, source=source
        )
        if record.image_id in self._records:  # hash collision; practically unreachable
            raise DuplicateError(f"image id collision for {uri}")
        self._records[record.image_id] = record
        self._by_uri[uri] = record.image_id
        return record

    def activate(self, image_id: str) -> ImageRecord:
        record = self.get(image_id)
        if record.status == STATUS_RETIRED:
            raise ValidationError(f"retired image {image_id} cannot be reactivated")
        record.status = STATUS_ACTIVE
        return record

    def activate_all(self) -> int:
        n = 0
        for record in self._records.values():
            if record.status == STATUS_CANDIDATE:
                record.status = STATUS_ACTIVE
                n += 1
        return n

    def retire(self, image_id: str) -> ImageRecord:
        record = self.get(image_id)
        record.status = STATUS_RETIRED
        return record

    def active_images(self) -> list[ImageRecord]:
        """Snapshot of servable images, in stable id order."""
        return sorted(
            (r for r in self._records.values() if r.status == STATUS_ACTIVE),
            key=lambda r: r.image_id,
        )

    def active_ids(self) -> list[str]:
        return [r.image_id for r in self.active_images()]

    # ---- rating aggregates -------------------------------------------------

    def add_rating(self, image_id: str, value: int) -> None:
        self.get(image_id)
        self._ratings.setdefault(image_id, []).append(validate_rating(value))

    def stats_for(self, image_id: str) -> ImageStats:
        values = self._ratings.get(image_id, [])
        return compute_image_stats(values, image_id, self.policy.min_ratings)

    def curate(self) -> CurationReport:
        """Recompute aggregates for every active image and retire failures.

        Explicit administrative action; nothing in the serving path triggers it.
        """
        report = CurationReport()
        for record in self.active_images():
            values = self._ratings.get(record.image_id, [])
            if not values:
                report.insufficient.append(record.image_id)
                continue
            verdict = pretest_filter(self.stats_for(record.image_id), self.policy)
            if verdict.action == Verdict.EXCLUDE:
                self.retire(record.image_id)
                report.retired.append((record.image_id, verdict.reason or ""))
            elif verdict.action == Verdict.INSUFFICIENT_DATA:
                report.insufficient.append(record.image_id)
            else:
                report.kept.append(record.image_id)
        active = len(self.active_ids())
        if not self.policy.ap_min <= active <= self.policy.ap_max:
            report.size_violation = (
                f"active bank size {active} outside "
                f"[{self.policy.ap_min}, {self.policy.ap_max}]"
            )
        return report


def parse_manifest(text: str) -> list[dict]:
    """Parse a bank manifest: a JSON array or one JSON object per line."""
    stripped = text.strip()
    if not stripped:
        return []
    if stripped.startswith("["):
        entries = json.loads(stripped)
    else:
        entries = [json.loads(line) for line in stripped.splitlines() if line.strip()]
    for entry in entries:
        if not isinstance(entry, dict) or "uri" not in entry or "category" not in entry:
            raise ValidationError(f"manifest entry must have uri and category: {entry!r}")
    return entries


def load_manifest(
    path: str | Path, policy: BankPolicy | None = None, activate: bool = True
) -> ImageBank:
    bank = ImageBank(policy)
    for entry in parse_manifest(Path(path).read_text(encoding="utf-8")):
        bank.ingest_image(entry["uri"], entry["category"], entry.get("source", ""))
    if activate:
        bank.activate_all()
    return bank
