"""HTTP/JSON boundary under /api/v1.

Stateless handlers translating requests into workspace commands. Bearer
tokens in the Authorization header; the admin token only opens /admin
routes. Non-membership of a private channel reads as 404, the same as a
channel that does not exist.
"""

from __future__ import annotations

from datetime import date as date_type
from datetime import time, timedelta
from pathlib import Path
from typing import Any

from fastapi import Depends, FastAPI, Header, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from nooks.adapter import AdapterError
from nooks.core.model import Choice
from nooks.core.ops import DomainError
from nooks.service import ValidationFailed, Workspace

# service/adapter error code -> HTTP status
_STATUS = {
    "NotOnboarded": 403,
    "ConsentRequired": 403,
    "ExcludedUser": 403,
    "NotAuthorized": 403,
    "UnknownInviteCode": 401,
    "UnknownResource": 404,
    "NotAMember": 404,
    "UnknownChannel": 404,
    "UnknownUser": 422,
    "ValidationFailed": 422,
    "SeedEntryInvalid": 422,
    "ResponseWindowClosed": 409,
    "NotIncubating": 409,
    "AlreadyOnboarded": 409,
    "AlreadyMember": 409,
    "AlreadyArchived": 409,
    "AlreadyActive": 409,
    "ChannelArchived": 409,
    "DuplicateSeed": 409,
    "WorkspaceLocked": 503,
}


class SignupBody(BaseModel):
    invite_code: str
    display_name: str = ""
    demographics: dict[str, str] | None = None
    consent: bool = False


class NookBody(BaseModel):
    topic: str
    initial_thoughts: str = ""
    channel_title: str
    excluded: list[str] = Field(default_factory=list)
    require_two_others: bool = False


class ResponseBody(BaseModel):
    choice: str


class MessageBody(BaseModel):
    body: str


class MemberBody(BaseModel):
    user_id: str


class PredefinedEntry(BaseModel):
    topic: str
    initial_thoughts: str = ""
    channel_title: str | None = None
    batch_date: date_type


class PredefinedBody(BaseModel):
    nooks: list[PredefinedEntry]


class OnboardBody(BaseModel):
    channel_name: str | None = None
    user_names: list[str] | None = None


class ScheduleBody(BaseModel):
    timezone: str | None = None
    batch_cutoff: str | None = None
    activation_time: str | None = None
    channel_lifetime_seconds: int | None = None
    min_members_to_activate: int | None = None


class SampleEntry(BaseModel):
    topic: str
    initial_thoughts: str = ""


class SamplesBody(BaseModel):
    samples: list[SampleEntry]


def create_app(workspace: Workspace, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="nooks", docs_url=None, redoc_url=None)
    app.state.workspace = workspace

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse({"error": code, "message": message}, status_code=status)

    @app.exception_handler(DomainError)
    async def domain_error_handler(_request: Request, exc: DomainError):
        status = _STATUS.get(exc.code, 400)
        payload: dict[str, Any] = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, ValidationFailed):
            payload["errors"] = [e.as_dict() for e in exc.errors]
        return JSONResponse(payload, status_code=status)

    @app.exception_handler(AdapterError)
    async def adapter_error_handler(_request: Request, exc: AdapterError):
        return error(_STATUS.get(exc.code, 400), exc.code, str(exc))

    def bearer(authorization: str | None) -> str | None:
        if authorization and authorization.startswith("Bearer "):
            return authorization.removeprefix("Bearer ").strip()
        return None

    class Unauthenticated(Exception):
        pass

    @app.exception_handler(Unauthenticated)
    async def unauthenticated_handler(_request: Request, _exc: Unauthenticated):
        return error(401, "Unauthenticated", "provide a valid bearer token")

    def current_user(authorization: str | None = Header(default=None)) -> str:
        token = bearer(authorization)
        user = workspace.user_for_token(token) if token else None
        if user is None:
            raise Unauthenticated()
        return user

    def require_admin(authorization: str | None = Header(default=None)) -> None:
        token = bearer(authorization)
        if token is None or not workspace.is_admin_token(token):
            raise Unauthenticated()

    # -- member routes -----------------------------------------------------

    @app.post("/api/v1/signup", status_code=201)
    def signup(body: SignupBody):
        return workspace.signup(
            body.invite_code, body.display_name, body.demographics, body.consent
        )

    @app.get("/api/v1/home")
    def home(user: str = Depends(current_user)):
        return workspace.home(user)

    @app.get("/api/v1/samples")
    def samples(page: int = 0, _user: str = Depends(current_user)):
        return workspace.samples_page(page)

    @app.post("/api/v1/nooks", status_code=201)
    def create_nook(body: NookBody, user: str = Depends(current_user)):
        nook = workspace.create_nook(
            user,
            body.topic,
            body.initial_thoughts,
            body.channel_title,
            excluded=body.excluded,
            require_two_others=body.require_two_others,
        )
        return {"nook_id": nook.id, "batch_date": nook.batch_date.isoformat()}

    @app.post("/api/v1/nooks/{nook_id}/response")
    def respond(nook_id: str, body: ResponseBody, user: str = Depends(current_user)):
        try:
            choice = Choice(body.choice)
        except ValueError:
            return error(422, "BadChoice", "choice must be 'interested' or 'not_for_me'")
        workspace.respond(user, nook_id, choice)
        return {"nook_id": nook_id, "choice": choice.value}

    @app.get("/api/v1/channels")
    def channels(user: str = Depends(current_user)):
        return {"channels": workspace.my_channels(user)}

    @app.get("/api/v1/channels/{nook_id}/messages")
    def channel_messages(nook_id: str, user: str = Depends(current_user)):
        return {"messages": workspace.channel_messages(user, nook_id)}

    @app.post("/api/v1/channels/{nook_id}/messages", status_code=201)
    def post_message(nook_id: str, body: MessageBody, user: str = Depends(current_user)):
        return workspace.post_channel_message(user, nook_id, body.body)

    @app.post("/api/v1/channels/{nook_id}/unarchive")
    def unarchive(nook_id: str, user: str = Depends(current_user)):
        return workspace.unarchive_channel(user, nook_id)

    @app.post("/api/v1/channels/{nook_id}/members")
    def add_member(nook_id: str, body: MemberBody, user: str = Depends(current_user)):
        return workspace.add_channel_member(user, nook_id, body.user_id)

    @app.post("/api/v1/users/{user_id}/direct")
    def direct(user_id: str, body: MessageBody, user: str = Depends(current_user)):
        workspace.send_direct_message(user, user_id, body.body)
        return {"delivered_to": user_id}

    @app.get("/api/v1/inbox")
    def inbox(user: str = Depends(current_user)):
        return {"messages": workspace.inbox(user)}

    @app.get("/api/v1/members")
    def members(user: str = Depends(current_user)):
        return {"members": workspace.member_directory()}

    # -- admin routes ------------------------------------------------------

    @app.post("/api/v1/admin/onboard")
    def onboard(body: OnboardBody, _admin: None = Depends(require_admin)):
        invited = workspace.onboard(channel=body.channel_name, users=body.user_names)
        return {"invited": invited}

    @app.post("/api/v1/admin/predefined", status_code=201)
    def predefined(body: PredefinedBody, _admin: None = Depends(require_admin)):
        created = workspace.create_predefined([entry.model_dump() for entry in body.nooks])
        return {"nook_ids": [n.id for n in created]}

    @app.put("/api/v1/admin/schedule")
    def set_schedule(body: ScheduleBody, _admin: None = Depends(require_admin)):
        overrides: dict[str, Any] = {}
        if body.timezone is not None:
            overrides["timezone"] = body.timezone
        if body.batch_cutoff is not None:
            overrides["batch_cutoff"] = time.fromisoformat(body.batch_cutoff)
        if body.activation_time is not None:
            overrides["activation_time"] = time.fromisoformat(body.activation_time)
        if body.channel_lifetime_seconds is not None:
            overrides["channel_lifetime"] = timedelta(seconds=body.channel_lifetime_seconds)
        if body.min_members_to_activate is not None:
            overrides["min_members_to_activate"] = body.min_members_to_activate
        try:
            workspace.set_schedule(**overrides)
        except ValueError as exc:
            return error(422, "BadSchedule", str(exc))
        return {"ok": True}

    @app.put("/api/v1/admin/samples")
    def set_samples(body: SamplesBody, _admin: None = Depends(require_admin)):
        workspace.set_samples([(s.topic, s.initial_thoughts) for s in body.samples])
        return {"ok": True}

    # -- static frontend -----------------------------------------------------

    # mounted last so /api/v1 wins; html=True makes "/" serve index.html
    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="ui")

    return app
