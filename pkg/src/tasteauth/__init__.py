"""Aesthetic-preference authentication: rate images once, then prove it's you
by picking your favorites out of decoy lineups."""

from .bank import (
    CATEGORIES,
    RATING_MAX,
    RATING_MIN,
    BankPolicy,
    ImageBank,
    ImageRecord,
    ImageStats,
    Verdict,
    compute_image_stats,
    load_manifest,
    parse_manifest,
    pretest_filter,
    validate_rating,
)
from .challenge import (
    AuthPolicy,
    ScreenSpec,
    SessionRun,
    SessionSpec,
    generate_session,
    screen_client_view,
)
from .enrollment import (
    EligibilityReport,
    EnrollmentLedger,
    EnrollmentPolicy,
    Portfolio,
    PortfolioPartition,
    eligibility_check,
    partition_portfolio,
)
from .errors import (
    DuplicateError,
    IneligibleError,
    InfeasibleError,
    NotFoundError,
    StateError,
    TasteAuthError,
    ValidationError,
)
from .verification import VerificationResult, decide_session, score_screen
from .analytics import (
    FpFnCurve,
    StrengthReport,
    cohort_filter,
    fpfn_curves,
    password_bits,
    screen_score_pmf,
    session_score_pmf,
)
from .service import ServiceConfig, StudyService
from .api import build_service, create_app

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "RATING_MAX",
    "RATING_MIN",
    "AuthPolicy",
    "BankPolicy",
    "DuplicateError",
    "EligibilityReport",
    "EnrollmentLedger",
    "EnrollmentPolicy",
    "FpFnCurve",
    "ImageBank",
    "ImageRecord",
    "ImageStats",
    "IneligibleError",
    "InfeasibleError",
    "NotFoundError",
    "Portfolio",
    "PortfolioPartition",
    "ScreenSpec",
    "ServiceConfig",
    "SessionRun",
    "SessionSpec",
    "StateError",
    "StrengthReport",
    "StudyService",
    "TasteAuthError",
    "ValidationError",
    "Verdict",
    "VerificationResult",
    "build_service",
    "cohort_filter",
    "compute_image_stats",
    "create_app",
    "decide_session",
    "eligibility_check",
    "fpfn_curves",
    "generate_session",
    "load_manifest",
    "parse_manifest",
    "partition_portfolio",
    "password_bits",
    "pretest_filter",
    "screen_client_view",
    "screen_score_pmf",
    "score_screen",
    "session_score_pmf",
    "validate_rating",
]
