"""HTTP/JSON API over a FortressStore.

All responses are JSON.  Errors share one shape:

    {"code": "<ErrorName>", "message": "...", "details": [...]}

mapped onto 400 (bad input), 401 (authentication), 404 (unknown ids),
and 409 (conflicts).  Authenticated calls carry an opaque session token
in an `Authorization: Bearer <token>` header.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .store import (
    BadCredentials,
    BackpackFull,
    FortressRecord,
    FortressStore,
    NoCriteria,
    StoreError,
    UnknownEntity,
    UnknownId,
    UnknownParent,
    UsernameTaken,
    UserAccount,
    ValidationFailed,
    class_to_dict,
)

_STATUS = {
    ValidationFailed: 400,
    NoCriteria: 400,
    BadCredentials: 401,
    UnknownId: 404,
    UnknownParent: 404,
    UnknownEntity: 404,
    UsernameTaken: 409,
    BackpackFull: 409,
}


class AuthRequired(StoreError):
    code = "AuthRequired"


_STATUS[AuthRequired] = 401


def _record_json(record: FortressRecord) -> dict:
    return {
        "id": record.id,
        "name": record.name,
        "author": record.author,
        "notes": record.notes,
        "text": record.fortress_text,
        "parent_id": record.parent_id,
        "created_at": record.created_at,
        "play_count": record.play_count,
        "has_player": record.has_player,
    }


class SubmitBody(BaseModel):
    text: str
    parent_id: int | None = None


class RegisterBody(BaseModel):
    username: str
    password: str
    email: str | None = None


class LoginBody(BaseModel):
    username: str
    password: str


class BackpackBody(BaseModel):
    fortress_id: int
    entity_char: str


def create_app(store: FortressStore) -> FastAPI:
    app = FastAPI(title="fortress service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(StoreError)
    async def store_error(_request: Request, exc: StoreError):
        details = []
        if isinstance(exc, ValidationFailed):
            details = [
                {"code": e.code.value, "line": e.line, "message": e.message}
                for e in exc.errors
            ]
        return JSONResponse(
            status_code=_STATUS.get(type(exc), 400),
            content={"code": exc.code, "message": str(exc), "details": details},
        )

    def optional_user(
        authorization: str | None = Header(default=None),
    ) -> UserAccount | None:
        if not authorization or not authorization.startswith("Bearer "):
            return None
        return store.session_user(authorization.removeprefix("Bearer "))

    def required_user(
        user: UserAccount | None = Depends(optional_user),
    ) -> UserAccount:
        if user is None:
            raise AuthRequired("a valid session token is required")
        return user

    # -- fortresses -------------------------------------------------------

    @app.post("/api/fortress", status_code=201)
    def submit(body: SubmitBody, user: UserAccount | None = Depends(optional_user)):
        record = store.submit(
            body.text,
            author=user.username if user else None,
            parent_id=body.parent_id,
        )
        return _record_json(record)

    @app.get("/api/fortress")
    def recent(limit: int = Query(default=120, ge=1, le=120)):
        return [_record_json(r) for r in store.recent(limit)]

    @app.get("/api/fortress/{fortress_id}")
    def get_fortress(fortress_id: int):
        return _record_json(store.get(fortress_id))

    @app.get("/api/fortress/{fortress_id}/lineage")
    def lineage(fortress_id: int):
        return {"lineage": store.lineage(fortress_id)}

    @app.post("/api/fortress/{fortress_id}/play")
    def play(fortress_id: int):
        return {"id": fortress_id, "play_count": store.record_play(fortress_id)}

    @app.get("/api/search")
    def search(
        user: str | None = Query(default=None),
        name: str | None = Query(default=None),
    ):
        return [_record_json(r) for r in store.search(user, name)]

    @app.get("/api/stats/nodes")
    def node_stats():
        return store.node_stats()

    # -- users -------------------------------------------------------------

    @app.post("/api/users/register", status_code=201)
    def register(body: RegisterBody):
        account = store.register(body.username, body.password, body.email)
        return {"username": account.username}

    @app.post("/api/users/login")
    def login(body: LoginBody):
        return {"token": store.login(body.username, body.password)}

    # -- backpacks -----------------------------------------------------------

    @app.get("/api/backpack")
    def backpack(user: UserAccount = Depends(required_user)):
        return {"backpack": [class_to_dict(c) for c in user.backpack]}

    @app.post("/api/backpack")
    def backpack_add(body: BackpackBody, user: UserAccount = Depends(required_user)):
        updated = store.backpack_add(user.username, body.fortress_id, body.entity_char)
        return {"backpack": [class_to_dict(c) for c in updated]}

    return app


def serve_app(app: FastAPI, ui_dir: str | None = None) -> FastAPI:
    """Optionally mount a built web UI at the root path."""
    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
