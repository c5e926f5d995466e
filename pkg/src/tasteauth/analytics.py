"""Password-strength, guessing-baseline, and error-rate analytics.

All distributions here are exact (``fractions.Fraction``); consumers convert
to float for display. Curves export as CSV, plotting stays out of scope.
"""

from __future__ import annotations

import io
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

# Reference strengths of common memorized-secret classes, in bits.
MEMORIZED_SECRET_CLASSES = (
    ("4-digit PIN", math.log2(10**4)),
    ("6-digit PIN", math.log2(10**6)),
    ("7-digit PIN", math.log2(10**7)),
    ("8-character password (72-symbol alphabet)", math.log2(72**8)),
)


@dataclass(frozen=True)
class StrengthReport:
    images_per_screen: int
    keys_per_screen: int
    screens_per_session: int
    per_screen_bits: float
    total_bits: float
    printed_bits: int
    comparable: str

    def to_dict(self) -> dict:
        return {
            "images_per_screen": self.images_per_screen,
            "keys_per_screen": self.keys_per_screen,
            "screens_per_session": self.screens_per_session,
            "per_screen_bits": self.per_screen_bits,
            "total_bits": self.total_bits,
            "printed_bits": self.printed_bits,
            "comparable": self.comparable,
        }


def password_bits(
    images_per_screen: int, keys_per_screen: int, screens_per_session: int
) -> StrengthReport:
    """Theoretical selection-space size of a session, in bits.

    A screen admits C(D, k) equally likely selections and screens are
    independent, so the session space is C(D, k)^S. Real-valued bits are
    reported exactly; the printed integer rounds to nearest.
    """
    if keys_per_screen > images_per_screen:
        raise ValidationError("keys_per_screen cannot exceed images_per_screen")
    if images_per_screen < 1 or keys_per_screen < 1 or screens_per_session < 1:
        raise ValidationError("policy parameters must be positive")
    per_screen = math.log2(math.comb(images_per_screen, keys_per_screen))
    total = screens_per_session * per_screen
    comparable = min(
        MEMORIZED_SECRET_CLASSES, key=lambda cls: abs(total - cls[1])
    )[0]
    return StrengthReport(
        images_per_screen=images_per_screen,
        keys_per_screen=keys_per_screen,
        screens_per_session=screens_per_session,
        per_screen_bits=per_screen,
        total_bits=total,
        printed_bits=round(total),
        comparable=comparable,
    )


def screen_score_pmf(
    images_per_screen: int, keys_per_screen: int
) -> dict[int, Fraction]:
    """Exact score distribution for a uniformly guessing attacker on one screen.

    Drawing k images out of D of which k are keys is hypergeometric:
    P(score = j) = C(k, j) * C(D - k, k - j) / C(D, k).
    """
    if not 1 <= keys_per_screen <= images_per_screen:
        raise ValidationError("keys_per_screen must lie in [1, images_per_screen]")
    d, k = images_per_screen, keys_per_screen
    denom = math.comb(d, k)
    pmf = {}
    for j in range(k + 1):
        if k - j <= d - k:
            pmf[j] = Fraction(math.comb(k, j) * math.comb(d - k, k - j), denom)
        else:
            pmf[j] = Fraction(0)
    return pmf


def convolve_pmfs(a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for x, px in a.items():
        for y, py in b.items():
            out[x + y] = out.get(x + y, Fraction(0)) + px * py
    return out


def session_score_pmf(
    images_per_screen: int, keys_per_screen: int, screens_per_session: int
) -> dict[int, Fraction]:
    """Exact total-score distribution over a whole session of independent screens."""
    single = screen_score_pmf(images_per_screen, keys_per_screen)
    pmf = {0: Fraction(1)}
    for _ in range(screens_per_session):
        pmf = convolve_pmfs(pmf, single)
    return pmf


def pmf_mean(pmf: Mapping[int, Fraction]) -> Fraction:
    return sum((Fraction(score) * p for score, p in pmf.items()), Fraction(0))


def pmf_tail(pmf: Mapping[int, Fraction], threshold: int) -> Fraction:
    """P(score >= threshold)."""
    return sum((p for score, p in pmf.items() if score >= threshold), Fraction(0))


@dataclass(frozen=True)
class FpFnCurve:
    thresholds: tuple[int, ...]
    fp: tuple[float, ...] | None   # None when no attacker sessions exist
    fn: tuple[float, ...] | None   # None when no legitimate sessions exist
    cohort: str = "all"

    @property
    def fp_defined(self) -> bool:
        return self.fp is not None

    @property
    def fn_defined(self) -> bool:
        return self.fn is not None

    def to_rows(self) -> list[tuple]:
        rows = []
        for i, t in enumerate(self.thresholds):
            rows.append(
                (
                    t,
                    self.fp[i] if self.fp is not None else None,
                    self.fn[i] if self.fn is not None else None,
                    self.cohort,
                )
            )
        return rows


def fpfn_curves(
    legit_totals: Sequence[int],
    attacker_totals: Sequence[int],
    max_total: int,
    cohort: str = "all",
) -> FpFnCurve:
    """Error-rate curves over every candidate acceptance threshold.

    For threshold t, the false-positive rate is the fraction of attacker
    sessions with total >= t and the false-negative rate is the fraction of
    legitimate sessions with total < t. An empty cohort leaves that curve
    undefined rather than zero.
    """
    for label, totals in (("legit", legit_totals), ("attacker", attacker_totals)):
        for total in totals:
            if not 0 <= total <= max_total:
                raise ValidationError(
                    f"{label} total {total} outside [0, {max_total}]"
                )
    thresholds = tuple(range(max_total + 1))
    fp = None
    if attacker_totals:
        n = len(attacker_totals)
        fp = tuple(sum(1 for a in attacker_totals if a >= t) / n for t in thresholds)
    fn = None
    if legit_totals:
        n = len(legit_totals)
        fn = tuple(sum(1 for l in legit_totals if l < t) / n for t in thresholds)
    return FpFnCurve(thresholds=thresholds, fp=fp, fn=fn, cohort=cohort)


def curves_to_csv(curves: Iterable[FpFnCurve]) -> str:
    """CSV with columns threshold,fp,fn,cohort; undefined rates print empty."""
    buf = io.StringIO()
    buf.write("threshold,fp,fn,cohort\n")
    for curve in curves:
        for t, fp, fn, cohort in curve.to_rows():
            fp_s = "" if fp is None else repr(fp)
            fn_s = "" if fn is None else repr(fn)
            buf.write(f"{t},{fp_s},{fn_s},{cohort}\n")
    return buf.getvalue()


@dataclass(frozen=True)
class RatingSummary:
    histogram: dict[int, int]      # value 1..10 -> count
    mean: float
    median: float
    scale_span: dict[str, int]     # user -> max - min + 1 of values used
    total: int


def rating_summary(ratings_by_user: Mapping[str, Sequence[int]]) -> RatingSummary:
    """Histogram and central tendency of ratings pooled across users."""
    histogram = {v: 0 for v in range(1, 11)}
    pooled: list[int] = []
    spans: dict[str, int] = {}
    for user_id, values in ratings_by_user.items():
        for v in values:
            if not 1 <= v <= 10:
                raise ValidationError(f"rating {v} outside [1, 10]")
            histogram[v] += 1
            pooled.append(v)
        if values:
            spans[user_id] = max(values) - min(values) + 1
    if not pooled:
        raise ValidationError("no ratings supplied")
    return RatingSummary(
        histogram=histogram,
        mean=sum(pooled) / len(pooled),
        median=float(statistics.median(pooled)),
        scale_span=spans,
        total=len(pooled),
    )


def cohort_filter(per_user_mean_scores: Mapping[str, float], fraction: float) -> list[str]:
    """Top performers by mean session score.

    Users rank by mean score descending with user id as tie-break; the top
    ceil(fraction * N) user ids are returned in rank order.
    """
    if not per_user_mean_scores:
        raise ValidationError("no users to rank")
    if not 0 < fraction <= 1:
        raise ValidationError("fraction must lie in (0, 1]")
    ranked = sorted(per_user_mean_scores, key=lambda u: (-per_user_mean_scores[u], u))
    return ranked[: math.ceil(fraction * len(ranked))]


def order_score_correlation(scores: Sequence[float]) -> float:
    """Pearson correlation between play order (1..n) and session score.

    Ships for analysis over real logs; there is no synthetic target for it.
    """
    n = len(scores)
    if n < 2:
        raise ValidationError("need at least two sessions")
    xs = range(1, n + 1)
    mx = (n + 1) / 2
    my = sum(scores) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, scores))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in scores)
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)
