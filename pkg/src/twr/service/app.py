"""FastAPI service wrapping the permission engine.

One service instance models one device: a gesture database (optionally
persisted to a file), a single proximity detector state, and a permission
check endpoint. Sensor data arrives in the trace text format.
"""

from __future__ import annotations

import os
from typing import Optional

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..permission_engine import (
    AccessRequest,
    DatabaseIntegrityError,
    GestureDatabase,
    GesturePolicy,
    PolicyKind,
    SensorContext,
    check_permission,
    create_template,
    load_db,
    register_policy,
    remove_policy,
    remove_template,
    save_db,
)
from ..prox_detector import ProxConfig, ProxDetectorState, is_unlocked, on_change
from ..sensor_model import TraceFormatError, parse_accel_trace
from ..tap_detector import AxisRule, match
from . import schemas

__all__ = ["create_app"]


def _policy_info(p: GesturePolicy) -> schemas.PolicyInfo:
    return schemas.PolicyInfo(service=p.service, kind=p.kind.value,
                              template_id=p.template_id,
                              capture_window_ms=p.capture_window_ms)


def _template_info(tid: str, t) -> schemas.TemplateInfo:
    return schemas.TemplateInfo(template_id=tid, n=t.n,
                                axis_rule=t.axis_rule.value,
                                threshold=t.threshold,
                                created_from=t.created_from)


def create_app(db_path: Optional[str] = None,
               prox_config: ProxConfig = ProxConfig()) -> FastAPI:
    app = FastAPI(title="twr", version=__version__)

    if db_path and os.path.exists(db_path):
        db = load_db(db_path)
    else:
        db = GestureDatabase()
    prox_state = ProxDetectorState(wind_sz=prox_config.wind_sz)

    app.state.db = db
    app.state.db_path = db_path
    app.state.prox_config = prox_config
    app.state.prox_state = prox_state

    def persist() -> None:
        if app.state.db_path:
            save_db(app.state.db, app.state.db_path)

    def parse_trace_or_422(text: str):
        try:
            return parse_accel_trace(text)
        except TraceFormatError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/db", response_model=schemas.DatabaseInfo)
    def get_db():
        db = app.state.db
        return schemas.DatabaseInfo(
            version=db.version,
            policies=[_policy_info(p) for _, p in sorted(db.policies.items())],
            templates=[_template_info(tid, t)
                       for tid, t in sorted(db.templates.items())])

    @app.post("/templates/{template_id}", response_model=schemas.TemplateInfo)
    def train_template(template_id: str, req: schemas.TrainRequest):
        traces = [parse_trace_or_422(t) for t in req.traces]
        try:
            rule = AxisRule(req.axis_rule)
            create_template(app.state.db, template_id, traces,
                            n=req.n, axis_rule=rule)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        persist()
        return _template_info(template_id, app.state.db.templates[template_id])

    @app.delete("/templates/{template_id}")
    def delete_template(template_id: str):
        if template_id not in app.state.db.templates:
            raise HTTPException(status_code=404,
                                detail=f"no template {template_id!r}")
        try:
            remove_template(app.state.db, template_id)
        except DatabaseIntegrityError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        persist()
        return {"removed": template_id}

    @app.post("/policies", response_model=schemas.PolicyInfo)
    def add_policy(req: schemas.PolicyRequest):
        try:
            policy = GesturePolicy(service=req.service,
                                   kind=PolicyKind(req.kind),
                                   template_id=req.template_id,
                                   capture_window_ms=req.capture_window_ms)
            register_policy(app.state.db, policy)
        except DatabaseIntegrityError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        persist()
        return _policy_info(policy)

    @app.delete("/policies/{service}")
    def delete_policy(service: str):
        remove_policy(app.state.db, service)
        persist()
        return {"removed": service}

    @app.post("/match", response_model=schemas.MatchResponse)
    def match_trace(req: schemas.MatchRequest):
        template = app.state.db.templates.get(req.template_id)
        if template is None:
            raise HTTPException(status_code=404,
                                detail=f"no template {req.template_id!r}")
        trace = parse_trace_or_422(req.trace)
        try:
            result = match(trace, template)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.MatchResponse(score=result.score,
                                     matched=result.matched)

    @app.post("/prox/change", response_model=schemas.ProxChangeResponse)
    def prox_change(req: schemas.ProxChangeRequest):
        try:
            window = on_change(app.state.prox_state, req.t,
                               app.state.prox_config)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        unlock = None
        if window is not None:
            unlock = schemas.UnlockWindowInfo(start=window.start,
                                              end=window.end)
        return schemas.ProxChangeResponse(unlock=unlock)

    @app.get("/prox/unlocked", response_model=schemas.UnlockedResponse)
    def prox_unlocked(t: int):
        return schemas.UnlockedResponse(
            unlocked=is_unlocked(app.state.prox_state, t))

    @app.post("/check", response_model=schemas.DecisionResponse)
    def check(req: schemas.CheckRequest):
        buffer = None
        if req.accel_trace is not None:
            buffer = parse_trace_or_422(req.accel_trace)
        try:
            request = AccessRequest(app_id=req.app_id, service=req.service,
                                    t=req.t)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        sensors = SensorContext(accel_buffer=buffer,
                                wait_forward_ms=req.wait_forward_ms)
        decision = check_permission(request, app.state.db, sensors,
                                    app.state.prox_state)
        return schemas.DecisionResponse(outcome=decision.outcome.value,
                                        reason=decision.reason.value,
                                        score=decision.score)

    return app
