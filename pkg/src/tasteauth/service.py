"""Study service: registration, rating flow, games, leaderboards, analytics.

All state mutations are committed to the event log (one event per command,
fsynced) before they are applied in memory, so a crash between any two
requests is recoverable by replay. Commands validate against current state,
then emit; apply handlers are unconditional and drive both live execution and
replay.
"""

from __future__ import annotations

import datetime as _dt
import json
import random
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import analytics
from .bank import CATEGORIES, BankPolicy, ImageBank, validate_rating
from .challenge import (
    KIND_ADVERSARIAL,
    KIND_GAME,
    SESSION_COMPLETED,
    SESSION_OPEN,
    AuthPolicy,
    ScreenSpec,
    SessionRun,
    SessionSpec,
    generate_session,
)
from .enrollment import (
    EnrollmentLedger,
    EnrollmentPolicy,
    Portfolio,
    RatingRecord,
    partition_portfolio,
)
from .errors import (
    DuplicateError,
    NotFoundError,
    StateError,
    ValidationError,
)
from .randutil import sample_without_replacement
from .storage import EventLog
from .verification import decide_session, score_screen

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")

MANDATORY_RATINGS = 72
INTERSTITIAL_MILESTONES = (24, 48)


class DailyLimitError(StateError):
    def __init__(self, retry_after: float):
        self.retry_after = retry_after
        super().__init__("only one game session per day; try again tomorrow")


@dataclass
class ServiceConfig:
    auth_policy: AuthPolicy = field(default_factory=AuthPolicy)
    enrollment_policy: EnrollmentPolicy = field(default_factory=EnrollmentPolicy)
    bank_policy: BankPolicy = field(default_factory=BankPolicy)
    data_dir: str | None = None
    admin_token: str = ""
    allow_revision: bool = True   # False reproduces the serial-only rating protocol
    session_ttl: float = 600.0
    cooldown_sessions: int = 2
    snapshot_every: int = 1000
    seed: int = 0
    preview_size: int = 16
    manifest: str | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        kwargs = {}
        if "auth_policy" in doc:
            kwargs["auth_policy"] = AuthPolicy(**doc["auth_policy"])
        if "enrollment_policy" in doc:
            kwargs["enrollment_policy"] = EnrollmentPolicy(**doc["enrollment_policy"])
        if "bank_policy" in doc:
            kwargs["bank_policy"] = BankPolicy(**doc["bank_policy"])
        for key in (
            "data_dir",
            "admin_token",
            "allow_revision",
            "session_ttl",
            "cooldown_sessions",
            "snapshot_every",
            "seed",
            "preview_size",
            "manifest",
        ):
            if key in doc:
                kwargs[key] = doc[key]
        return cls(**kwargs)


def _screen_to_dict(screen: ScreenSpec) -> dict:
    return {
        "screen_no": screen.screen_no,
        "displayed": list(screen.displayed),
        "key_set": sorted(screen.key_set),
    }


def _screen_from_dict(doc: dict) -> ScreenSpec:
    return ScreenSpec(
        screen_no=doc["screen_no"],
        displayed=tuple(doc["displayed"]),
        key_set=frozenset(doc["key_set"]),
    )


def _spec_to_dict(spec: SessionSpec) -> dict:
    return {
        "session_id": spec.session_id,
        "user_id": spec.user_id,
        "kind": spec.kind,
        "policy": spec.policy.to_dict(),
        "screens": [_screen_to_dict(s) for s in spec.screens],
        "seed": spec.seed,
        "created_at": spec.created_at,
        "status": spec.status,
    }


def _spec_from_dict(doc: dict) -> SessionSpec:
    return SessionSpec(
        session_id=doc["session_id"],
        user_id=doc["user_id"],
        kind=doc["kind"],
        policy=AuthPolicy.from_dict(doc["policy"]),
        screens=tuple(_screen_from_dict(s) for s in doc["screens"]),
        seed=doc["seed"],
        created_at=doc["created_at"],
        status=doc["status"],
    )


class StudyService:
    """Single-process service state; all mutations serialize on one lock."""

    def __init__(self, bank: ImageBank, config: ServiceConfig | None = None, clock=time.time):
        self.bank = bank
        self.config = config or ServiceConfig()
        self.clock = clock
        self._lock = threading.RLock()
        self._rng = random.Random(self.config.seed)

        self.users: dict[str, dict] = {}
        self.tokens: dict[str, str] = {}
        self._nicknames: set[str] = set()
        self._user_counter = 0
        self.ledger = EnrollmentLedger(
            bank, self.config.enrollment_policy, session_guard=self._has_open_session
        )
        self.sessions: dict[str, SessionRun] = {}
        self._victim_of: dict[str, str] = {}
        self._game_date: dict[str, str] = {}
        self._last_played: dict[str, float] = {}
        self._points: dict[str, dict[str, int]] = {KIND_GAME: {}, KIND_ADVERSARIAL: {}}
        self._achieved: dict[str, dict[str, float]] = {KIND_GAME: {}, KIND_ADVERSARIAL: {}}
        self._recent_keys: dict[str, list[list[str]]] = {}
        self._session_order: list[str] = []

        self.log = EventLog(self.config.data_dir) if self.config.data_dir else None
        if self.log is not None:
            self._restore()

    # ---- persistence ---------------------------------------------------

    def _restore(self) -> None:
        snapshot = self.log.load_snapshot()
        after = 0
        if snapshot is not None:
            after, state = snapshot
            self._restore_state(state)
        for event in self.log.events(after_seq=after):
            self._apply(event["kind"], event["payload"])

    def _commit(self, kind: str, payload: dict) -> None:
        if self.log is not None:
            event = self.log.append(kind, payload)
            self._apply(kind, payload)
            if self.config.snapshot_every and event["seq"] % self.config.snapshot_every == 0:
                self.log.write_snapshot(self._state())
        else:
            self._apply(kind, payload)

    def _apply(self, kind: str, payload: dict) -> None:
        getattr(self, f"_apply_{kind}")(payload)

    def _state(self) -> dict:
        return {
            "users": self.users,
            "tokens": self.tokens,
            "user_counter": self._user_counter,
            "served": {u: sorted(ids) for u, ids in self.ledger._served.items()},
            "ratings": {
                user_id: {
                    image_id: {
                        "value": rec.value,
                        "revisions": rec.revisions,
                        "created_at": rec.created_at,
                        "updated_at": rec.updated_at,
                        "history": rec.history,
                    }
                    for image_id, rec in portfolio.ratings.items()
                }
                for user_id, portfolio in self.ledger._portfolios.items()
            },
            "sessions": {
                sid: {
                    "spec": _spec_to_dict(run.spec),
                    "scores": list(run.scores),
                    "served_upto": run.served_upto,
                }
                for sid, run in self.sessions.items()
            },
            "session_order": self._session_order,
            "victim_of": self._victim_of,
            "game_date": self._game_date,
            "last_played": self._last_played,
            "points": self._points,
            "achieved": self._achieved,
            "recent_keys": self._recent_keys,
        }

    def _restore_state(self, state: dict) -> None:
        self.users = state["users"]
        self.tokens = state["tokens"]
        self._user_counter = state["user_counter"]
        self._nicknames = {u["nickname"] for u in self.users.values()}
        for user_id, ids in state["served"].items():
            self.ledger.mark_served(user_id, ids)
        for user_id, ratings in state["ratings"].items():
            portfolio = Portfolio(user_id=user_id)
            for image_id, doc in ratings.items():
                portfolio.ratings[image_id] = RatingRecord(
                    user_id=user_id,
                    image_id=image_id,
                    value=doc["value"],
                    created_at=doc["created_at"],
                    updated_at=doc["updated_at"],
                    revisions=doc["revisions"],
                    history=list(doc["history"]),
                )
            self.ledger._portfolios[user_id] = portfolio
        for sid, doc in state["sessions"].items():
            run = SessionRun(_spec_from_dict(doc["spec"]), ttl=self.config.session_ttl)
            run.served_upto = doc["served_upto"]
            run.scores.extend(doc["scores"])
            if len(run.scores) == run.policy.screens_per_session:
                run.result_ = decide_session(run.scores, run.policy)
            self.sessions[sid] = run
        self._session_order = state["session_order"]
        self._victim_of = state["victim_of"]
        self._game_date = state["game_date"]
        self._last_played = state["last_played"]
        self._points = state["points"]
        self._achieved = state["achieved"]
        self._recent_keys = state["recent_keys"]

    # ---- helpers ---------------------------------------------------------

    def _today(self) -> str:
        return _dt.datetime.fromtimestamp(self.clock()).date().isoformat()

    def _seconds_to_midnight(self) -> float:
        now = _dt.datetime.fromtimestamp(self.clock())
        tomorrow = _dt.datetime.combine(
            now.date() + _dt.timedelta(days=1), _dt.time.min
        )
        return (tomorrow - now).total_seconds()

    def _has_open_session(self, user_id: str) -> bool:
        now = self.clock()
        for run in self.sessions.values():
            if run.spec.user_id != user_id or run.spec.status != SESSION_OPEN:
                continue
            if now - run.spec.created_at <= run.ttl:
                return True
        return False

    def user_for_token(self, token: str) -> str:
        user_id = self.tokens.get(token)
        if user_id is None:
            raise NotFoundError("unknown or expired token")
        return user_id

    def _require_user(self, user_id: str) -> dict:
        try:
            return self.users[user_id]
        except KeyError:
            raise NotFoundError(f"no user {user_id!r}") from None

    def _get_run(self, user_id: str, session_id: str) -> SessionRun:
        run = self.sessions.get(session_id)
        if run is None:
            raise NotFoundError(f"no session {session_id!r}")
        if run.spec.user_id != user_id:
            raise NotFoundError(f"no session {session_id!r}")  # do not leak others' ids
        return run

    def rated_count(self, user_id: str) -> int:
        return self.ledger.portfolio(user_id).rated_count

    def mandatory_done(self, user_id: str) -> bool:
        return self.rated_count(user_id) >= self.config.enrollment_policy.r_min

    # ---- commands: registration -----------------------------------------

    def register(self, email: str, nickname: str, consent: bool) -> dict:
        with self._lock:
            if not consent:
                raise ValidationError("consent is required before any data collection")
            if not _EMAIL_RE.match(email or ""):
                raise ValidationError(f"invalid email address: {email!r}")
            nickname = (nickname or "").strip()
            if not nickname:
                raise ValidationError("nickname must be nonempty")
            if nickname in self._nicknames:
                raise DuplicateError(f"nickname already taken: {nickname}")
            user_id = f"u{self._user_counter + 1:05d}"
            token = secrets.token_hex(16)
            self._commit(
                "user_registered",
                {
                    "user_id": user_id,
                    "email": email,
                    "nickname": nickname,
                    "consent_at": self.clock(),
                    "token": token,
                },
            )
            return {"user_id": user_id, "token": token, "nickname": nickname, "next": "preview"}

    def _apply_user_registered(self, p: dict) -> None:
        self.users[p["user_id"]] = {
            "email": p["email"],
            "nickname": p["nickname"],
            "consent_at": p["consent_at"],
        }
        self.tokens[p["token"]] = p["user_id"]
        self._nicknames.add(p["nickname"])
        self._user_counter += 1

    # ---- queries: preview, progress, images ------------------------------

    def preview(self, user_id: str) -> dict:
        """A sample of active images spanning every category (best effort).

        Previewed images are not marked served, so they can still appear for
        rating later. Unseeded: repeated calls may differ.
        """
        with self._lock:
            self._require_user(user_id)
            by_category: dict[str, list[str]] = {c: [] for c in CATEGORIES}
            for record in self.bank.active_images():
                by_category[record.category].append(record.image_id)
            chosen: list[str] = []
            degraded = False
            for category in CATEGORIES:
                ids = by_category[category]
                if not ids:
                    degraded = True
                    continue
                chosen.append(ids[self._rng.randrange(len(ids))])
            remaining = [
                i for ids in by_category.values() for i in ids if i not in set(chosen)
            ]
            fill = min(self.config.preview_size - len(chosen), len(remaining))
            if fill > 0:
                chosen.extend(sample_without_replacement(self._rng, remaining, fill))
            return {
                "images": [self._image_payload(i) for i in chosen],
                "degraded": degraded,
            }

    def _image_payload(self, image_id: str) -> dict:
        record = self.bank.get(image_id)
        return {"image_id": record.image_id, "uri": record.uri, "category": record.category}

    def image_meta(self, image_id: str) -> dict:
        with self._lock:
            return self._image_payload(image_id)

    def progress(self, user_id: str) -> dict:
        with self._lock:
            self._require_user(user_id)
            rated = self.rated_count(user_id)
            required = self.config.enrollment_policy.r_min
            interstitial = None
            if rated in INTERSTITIAL_MILESTONES:
                interstitial = f"{rated} of {required}"
            return {
                "rated_count": rated,
                "required": required,
                "mandatory_done": rated >= required,
                "interstitial": interstitial,
            }

    # ---- commands: rating -------------------------------------------------

    def next_batch(self, user_id: str, n: int) -> dict:
        with self._lock:
            self._require_user(user_id)
            if n < 1:
                raise ValidationError("n must be >= 1")
            served = self.ledger.served_ids(user_id)
            unseen = [i for i in self.bank.active_ids() if i not in served]
            chosen = sample_without_replacement(self._rng, unseen, min(n, len(unseen)))
            if chosen:
                self._commit("batch_served", {"user_id": user_id, "image_ids": chosen})
            return {
                "images": [self._image_payload(i) for i in chosen],
                "exhausted": len(chosen) < n,
            }

    def _apply_batch_served(self, p: dict) -> None:
        self.ledger.mark_served(p["user_id"], p["image_ids"])

    def record_rating(self, user_id: str, image_id: str, value: int) -> dict:
        with self._lock:
            self._require_user(user_id)
            now = self.clock()
            # validate against current state without mutating, then commit
            validate_rating(value)
            if image_id not in self.ledger.served_ids(user_id):
                raise StateError(f"image {image_id} was never served to this user")
            if image_id in self.ledger.portfolio(user_id).ratings:
                raise DuplicateError("already rated; revise instead")
            self._commit(
                "rating_recorded",
                {"user_id": user_id, "image_id": image_id, "value": value, "ts": now},
            )
            return {
                "image_id": image_id,
                "value": value,
                "rated_count": self.rated_count(user_id),
            }

    def _apply_rating_recorded(self, p: dict) -> None:
        self.ledger.record_rating(p["user_id"], p["image_id"], p["value"], now=p["ts"])

    def revise_rating(self, user_id: str, image_id: str, value: int) -> dict:
        with self._lock:
            self._require_user(user_id)
            if not self.config.allow_revision:
                raise StateError("rating revision is disabled in study-reproduction mode")
            validate_rating(value)
            if self._has_open_session(user_id):
                raise StateError("cannot revise ratings while a session is in progress")
            if image_id not in self.ledger.portfolio(user_id).ratings:
                raise NotFoundError(f"no rating for {image_id}")
            self._commit(
                "rating_revised",
                {
                    "user_id": user_id,
                    "image_id": image_id,
                    "value": value,
                    "ts": self.clock(),
                },
            )
            record = self.ledger.portfolio(user_id).ratings[image_id]
            return {
                "image_id": image_id,
                "value": record.value,
                "revisions": record.revisions,
            }

    def _apply_rating_revised(self, p: dict) -> None:
        guard = self.ledger.session_guard
        self.ledger.session_guard = lambda _uid: False  # command already checked
        try:
            self.ledger.revise_rating(p["user_id"], p["image_id"], p["value"], now=p["ts"])
        finally:
            self.ledger.session_guard = guard

    def gallery(self, user_id: str) -> dict:
        """Rated images with current values, for the revision gallery view."""
        with self._lock:
            self._require_user(user_id)
            portfolio = self.ledger.portfolio(user_id)
            items = []
            for image_id in sorted(portfolio.ratings):
                rec = portfolio.ratings[image_id]
                payload = self._image_payload(image_id)
                payload["value"] = rec.value
                payload["revisions"] = rec.revisions
                items.append(payload)
            return {"items": items, "revision_enabled": self.config.allow_revision}

    # ---- commands: sessions ------------------------------------------------

    def start_session(self, user_id: str, kind: str) -> dict:
        if kind == KIND_GAME:
            return self.start_game(user_id)
        if kind == KIND_ADVERSARIAL:
            return self.start_adversarial(user_id)
        raise ValidationError(f"unknown session kind {kind!r}")

    def start_game(self, user_id: str) -> dict:
        with self._lock:
            self._require_user(user_id)
            if not self.mandatory_done(user_id):
                raise StateError(
                    f"rate at least {self.config.enrollment_policy.r_min} images first "
                    f"({self.rated_count(user_id)} so far)"
                )
            today = self._today()
            if self._game_date.get(user_id) == today:
                raise DailyLimitError(self._seconds_to_midnight())
            partition = partition_portfolio(
                self.ledger.portfolio(user_id), self.config.enrollment_policy
            )
            spec = generate_session(
                partition,
                self.config.auth_policy,
                seed=self._rng.getrandbits(63),
                enrollment_policy=self.config.enrollment_policy,
                kind=KIND_GAME,
                created_at=self.clock(),
                exclude_keys=self._cooldown_keys(user_id, partition),
            )
            self._commit(
                "session_created",
                {"spec": _spec_to_dict(spec), "date": today, "victim_session_id": None},
            )
            return self._session_payload(spec)

    def _cooldown_keys(self, user_id: str, partition) -> set[str]:
        """Keys on reuse cooldown, shed oldest-first if they starve the pool."""
        recent = list(self._recent_keys.get(user_id, []))
        needed = (
            self.config.auth_policy.keys_per_screen
            * self.config.auth_policy.screens_per_session
        )
        while recent:
            excluded = {k for keys in recent for k in keys}
            if len([i for i in partition.key_pool if i not in excluded]) >= needed:
                return excluded
            recent = recent[1:]
        return set()

    def start_adversarial(self, user_id: str) -> dict:
        with self._lock:
            self._require_user(user_id)
            if not self.mandatory_done(user_id):
                raise StateError(
                    f"rate at least {self.config.enrollment_policy.r_min} images first"
                )
            pool = [
                sid
                for sid in self._session_order
                if (run := self.sessions[sid]).spec.kind == KIND_GAME
                and run.spec.status == SESSION_COMPLETED
                and run.spec.user_id != user_id
            ]
            if not pool:
                raise StateError("no completed sessions by other players yet")
            victim_sid = pool[self._rng.randrange(len(pool))]
            victim = self.sessions[victim_sid].spec
            spec = SessionSpec(
                session_id=f"s{len(self.sessions) + 1:06d}-{secrets.token_hex(4)}",
                user_id=user_id,
                kind=KIND_ADVERSARIAL,
                policy=victim.policy,
                screens=victim.screens,
                seed=victim.seed,
                created_at=self.clock(),
            )
            self._commit(
                "session_created",
                {
                    "spec": _spec_to_dict(spec),
                    "date": self._today(),
                    "victim_session_id": victim_sid,
                },
            )
            return self._session_payload(spec)

    def _session_payload(self, spec: SessionSpec) -> dict:
        return {
            "session_id": spec.session_id,
            "kind": spec.kind,
            "screens_per_session": spec.policy.screens_per_session,
            "images_per_screen": spec.policy.images_per_screen,
            "keys_per_screen": spec.policy.keys_per_screen,
        }

    def _apply_session_created(self, p: dict) -> None:
        spec = _spec_from_dict(p["spec"])
        run = SessionRun(spec, ttl=self.config.session_ttl)
        self.sessions[spec.session_id] = run
        self._session_order.append(spec.session_id)
        if spec.kind == KIND_GAME:
            self._game_date[spec.user_id] = p["date"]
        if p.get("victim_session_id"):
            self._victim_of[spec.session_id] = p["victim_session_id"]

    def get_screen(self, user_id: str, session_id: str, screen_no: int) -> dict:
        with self._lock:
            run = self._get_run(user_id, session_id)
            # validate first (raises on out-of-order/expired), then commit
            view = run.screen_for_display(screen_no, now=self.clock())
            self._commit(
                "screen_served", {"session_id": session_id, "screen_no": screen_no}
            )
            return view

    def _apply_screen_served(self, p: dict) -> None:
        run = self.sessions[p["session_id"]]
        run.served_upto = max(run.served_upto, p["screen_no"])

    def submit_selection(
        self, user_id: str, session_id: str, screen_no: int, chosen: list[str]
    ) -> dict:
        with self._lock:
            run = self._get_run(user_id, session_id)
            run.check_open(now=self.clock())
            # dry-run validation against the live run before committing
            expected = len(run.scores) + 1
            if screen_no != expected:
                raise StateError(
                    f"screen {screen_no} not awaiting a selection (expected {expected})"
                )
            if screen_no > run.served_upto:
                raise StateError(f"screen {screen_no} was never served")
            screen = run.spec.screens[screen_no - 1]
            score = score_screen(screen, chosen, run.policy.keys_per_screen)
            now = self.clock()
            final = screen_no == run.policy.screens_per_session
            payload = {
                "session_id": session_id,
                "screen_no": screen_no,
                "chosen": sorted(set(chosen)),
                "score": score,
                "ts": now,
                "final": final,
            }
            self._commit("selection_scored", payload)
            feedback = {
                "screen_no": screen_no,
                "screen_score": score,
                "screens_remaining": run.policy.screens_per_session - screen_no,
            }
            if final:
                result = run.result()
                kind = run.spec.kind
                feedback["total"] = result.total
                feedback["decision"] = result.decision
                feedback["session_points"] = result.total
                feedback["overall_points"] = self._points[kind].get(user_id, 0)
            return feedback

    def _apply_selection_scored(self, p: dict) -> None:
        run = self.sessions[p["session_id"]]
        run.submit_selection(p["screen_no"], p["chosen"])
        if p["final"]:
            result = run.result()
            user_id = run.spec.user_id
            kind = run.spec.kind
            board = self._points[kind]
            previous = board.get(user_id, 0)
            board[user_id] = previous + result.total
            if result.total > 0 or user_id not in self._achieved[kind]:
                self._achieved[kind][user_id] = p["ts"]
            if kind == KIND_GAME:
                self._last_played[user_id] = p["ts"]
                window = self.config.cooldown_sessions
                keys = self._recent_keys.get(user_id, [])
                keys = keys + [sorted(run.spec.key_ids())]
                self._recent_keys[user_id] = keys[-window:] if window > 0 else []

    def session_result(self, user_id: str, session_id: str) -> dict:
        with self._lock:
            run = self._get_run(user_id, session_id)
            if run.spec.status != SESSION_COMPLETED:
                raise StateError("session not completed yet")
            result = run.result()
            return {
                "session_id": session_id,
                "total": result.total,
                "decision": result.decision,
            }

    # ---- queries: leaderboard, profile, analytics -------------------------

    def leaderboard(self, kind: str) -> dict:
        if kind not in (KIND_GAME, KIND_ADVERSARIAL):
            raise ValidationError(f"unknown leaderboard kind {kind!r}")
        with self._lock:
            board = self._points[kind]
            achieved = self._achieved[kind]
            entries = sorted(
                board.items(), key=lambda kv: (-kv[1], achieved.get(kv[0], 0.0), kv[0])
            )
            return {
                "kind": kind,
                "entries": [
                    {"nickname": self.users[u]["nickname"], "total": total}
                    for u, total in entries
                ],
            }

    def me(self, user_id: str) -> dict:
        with self._lock:
            user = self._require_user(user_id)
            last = self._last_played.get(user_id)
            return {
                "user_id": user_id,
                "nickname": user["nickname"],
                "rated_count": self.rated_count(user_id),
                "mandatory_done": self.mandatory_done(user_id),
                "last_played": last,
                "last_played_date": (
                    _dt.datetime.fromtimestamp(last).date().isoformat() if last else None
                ),
                "game_points": self._points[KIND_GAME].get(user_id, 0),
                "adversarial_points": self._points[KIND_ADVERSARIAL].get(user_id, 0),
                "revision_enabled": self.config.allow_revision,
            }

    def fpfn_analytics(self) -> dict:
        """FP/FN curves from completed session logs, plus performance cohorts."""
        with self._lock:
            legit: list[int] = []
            attacker: list[int] = []
            per_user_scores: dict[str, list[int]] = {}
            for sid in self._session_order:
                run = self.sessions[sid]
                if run.spec.status != SESSION_COMPLETED:
                    continue
                total = run.result().total
                if run.spec.kind == KIND_GAME:
                    legit.append(total)
                    per_user_scores.setdefault(run.spec.user_id, []).append(total)
                elif run.spec.kind == KIND_ADVERSARIAL:
                    attacker.append(total)
            max_total = self.config.auth_policy.max_total
            curves = [analytics.fpfn_curves(legit, attacker, max_total, cohort="all")]
            if per_user_scores:
                means = {u: sum(v) / len(v) for u, v in per_user_scores.items()}
                for label, fraction in (("top-half", 0.5), ("top-third", 1 / 3)):
                    cohort_users = set(analytics.cohort_filter(means, fraction))
                    cohort_totals = [
                        run.result().total
                        for sid in self._session_order
                        if (run := self.sessions[sid]).spec.kind == KIND_GAME
                        and run.spec.status == SESSION_COMPLETED
                        and run.spec.user_id in cohort_users
                    ]
                    curves.append(
                        analytics.fpfn_curves(cohort_totals, attacker, max_total, cohort=label)
                    )
            return {
                "curves": [
                    {
                        "cohort": c.cohort,
                        "thresholds": list(c.thresholds),
                        "fp": list(c.fp) if c.fp is not None else None,
                        "fn": list(c.fn) if c.fn is not None else None,
                    }
                    for c in curves
                ],
                "sessions": {"game": len(legit), "adversarial": len(attacker)},
            }
