"""HTTP layer: a thin FastAPI wrapper over StudyService.

Every response body is built from whitelisted fields; key membership and
other server-private session internals never appear on the wire.
"""

from __future__ import annotations

import os

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .bank import ImageBank, load_manifest
from .errors import (
    DuplicateError,
    IneligibleError,
    InfeasibleError,
    NotFoundError,
    StateError,
    TasteAuthError,
    ValidationError,
)
from .service import DailyLimitError, ServiceConfig, StudyService


class RegisterBody(BaseModel):
    email: str
    nickname: str
    consent: bool = False


class RatingBody(BaseModel):
    image_id: str
    value: int


class ReviseBody(BaseModel):
    value: int


class SelectionBody(BaseModel):
    chosen: list[str] = Field(default_factory=list)


def build_service(config: ServiceConfig, clock=None) -> StudyService:
    """Construct a service with its bank loaded from the configured manifest."""
    if config.manifest:
        bank = load_manifest(config.manifest, policy=config.bank_policy)
    else:
        bank = ImageBank(policy=config.bank_policy)
    kwargs = {"clock": clock} if clock is not None else {}
    return StudyService(bank, config, **kwargs)


def config_from_env() -> ServiceConfig:
    path = os.environ.get("TASTEAUTH_CONFIG")
    config = ServiceConfig.from_file(path) if path else ServiceConfig()
    data_dir = os.environ.get("TASTEAUTH_DATA_DIR")
    if data_dir:
        config.data_dir = data_dir
    admin = os.environ.get("TASTEAUTH_ADMIN_TOKEN")
    if admin:
        config.admin_token = admin
    return config


def create_app(service: StudyService) -> FastAPI:
    app = FastAPI(title="tasteauth", docs_url=None, redoc_url=None)
    app.state.service = service

    def current_user(authorization: str = Header(default="")) -> str:
        scheme, _, token = authorization.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise HTTPException(status_code=401, detail="bearer token required")
        try:
            return service.user_for_token(token.strip())
        except NotFoundError:
            raise HTTPException(status_code=401, detail="invalid token") from None

    def require_admin(authorization: str = Header(default="")) -> None:
        scheme, _, token = authorization.partition(" ")
        expected = service.config.admin_token
        if not expected or scheme.lower() != "bearer" or token.strip() != expected:
            raise HTTPException(status_code=403, detail="admin token required")

    @app.exception_handler(TasteAuthError)
    async def tasteauth_error(request: Request, exc: TasteAuthError):
        if isinstance(exc, DailyLimitError):
            return JSONResponse(
                status_code=429,
                content={"error": str(exc), "retry_after": int(exc.retry_after)},
                headers={"Retry-After": str(int(exc.retry_after))},
            )
        if isinstance(exc, IneligibleError):
            return JSONResponse(
                status_code=409, content={"error": str(exc), "reasons": exc.reasons}
            )
        if isinstance(exc, DuplicateError):
            status = 409
        elif isinstance(exc, ValidationError):
            status = 400
        elif isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, (StateError, InfeasibleError)):
            status = 409
        else:
            status = 500
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/users", status_code=201)
    def register(body: RegisterBody):
        return service.register(body.email, body.nickname, body.consent)

    @app.get("/users/me")
    def me(user_id: str = Depends(current_user)):
        return service.me(user_id)

    @app.get("/preview")
    def preview(user_id: str = Depends(current_user)):
        return service.preview(user_id)

    @app.get("/images/{image_id}")
    def image_meta(image_id: str, user_id: str = Depends(current_user)):
        return service.image_meta(image_id)

    @app.get("/rating/next")
    def next_batch(n: int = 12, user_id: str = Depends(current_user)):
        return service.next_batch(user_id, n)

    @app.get("/rating/progress")
    def progress(user_id: str = Depends(current_user)):
        return service.progress(user_id)

    @app.post("/ratings", status_code=201)
    def record_rating(body: RatingBody, user_id: str = Depends(current_user)):
        return service.record_rating(user_id, body.image_id, body.value)

    @app.get("/ratings")
    def gallery(user_id: str = Depends(current_user)):
        return service.gallery(user_id)

    @app.patch("/ratings/{image_id}")
    def revise_rating(
        image_id: str, body: ReviseBody, user_id: str = Depends(current_user)
    ):
        return service.revise_rating(user_id, image_id, body.value)

    @app.post("/sessions", status_code=201)
    def start_session(kind: str = "game", user_id: str = Depends(current_user)):
        return service.start_session(user_id, kind)

    @app.get("/sessions/{session_id}/screens/{screen_no}")
    def get_screen(
        session_id: str, screen_no: int, user_id: str = Depends(current_user)
    ):
        return service.get_screen(user_id, session_id, screen_no)

    @app.post("/sessions/{session_id}/screens/{screen_no}/selection")
    def submit_selection(
        session_id: str,
        screen_no: int,
        body: SelectionBody,
        user_id: str = Depends(current_user),
    ):
        return service.submit_selection(user_id, session_id, screen_no, body.chosen)

    @app.get("/sessions/{session_id}/result")
    def session_result(session_id: str, user_id: str = Depends(current_user)):
        return service.session_result(user_id, session_id)

    @app.get("/leaderboard")
    def leaderboard(kind: str = "game"):
        return service.leaderboard(kind)

    @app.get("/admin/analytics/fpfn")
    def fpfn(_: None = Depends(require_admin)):
        return service.fpfn_analytics()

    return app


def app_from_env() -> FastAPI:
    """Entry point for ``uvicorn tasteauth.api:app_from_env --factory``."""
    return create_app(build_service(config_from_env()))
