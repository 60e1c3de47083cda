"""Gesture-gated permission pipeline.

An access request for a protected service is forwarded only when the
required gesture was observed: a matching accelerometer tap inside the
capture window, or an open proximity unlock window. Unprotected services
pass straight through to the downstream permission check.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .prox_detector import ProxDetectorState, is_unlocked
from .sensor_model import (
    AccelTrace,
    parse_accel_trace,
    serialize_accel_trace,
)
from .tap_detector import AxisRule, GestureTemplate, build_template, scan_stream

__all__ = [
    "PolicyKind",
    "GesturePolicy",
    "GestureDatabase",
    "AccessRequest",
    "Outcome",
    "Reason",
    "Decision",
    "SensorContext",
    "DatabaseIntegrityError",
    "check_permission",
    "register_policy",
    "remove_policy",
    "create_template",
    "remove_template",
    "load_db",
    "save_db",
    "decision_log_line",
]

DB_FORMAT_VERSION = 1


class PolicyKind(str, Enum):
    USER_DEPENDENT_TAP = "user_dependent_tap"
    USER_INDEPENDENT_PROX = "user_independent_prox"
    UNPROTECTED = "unprotected"


class Outcome(str, Enum):
    FORWARD = "FORWARD"
    REJECT = "REJECT"


class Reason(str, Enum):
    UNPROTECTED = "UNPROTECTED"
    GESTURE_MATCHED = "GESTURE_MATCHED"
    WITHIN_UNLOCK_WINDOW = "WITHIN_UNLOCK_WINDOW"
    NO_GESTURE = "NO_GESTURE"
    TEMPLATE_MISSING = "TEMPLATE_MISSING"

FORWARD_REASONS = {Reason.UNPROTECTED, Reason.GESTURE_MATCHED,
                   Reason.WITHIN_UNLOCK_WINDOW}


class DatabaseIntegrityError(ValueError):
    pass


@dataclass(frozen=True)
class GesturePolicy:
    service: str
    kind: PolicyKind
    template_id: Optional[str] = None
    capture_window_ms: int = 2000

    def __post_init__(self):
        if not self.service:
            raise ValueError("service identifier must be non-empty")
        if self.kind is PolicyKind.USER_DEPENDENT_TAP and not self.template_id:
            raise ValueError(
                f"tap policy for {self.service!r} needs a template_id")
        if self.capture_window_ms <= 0:
            raise ValueError("capture window must be positive")


@dataclass
class GestureDatabase:
    policies: dict[str, GesturePolicy] = field(default_factory=dict)
    templates: dict[str, GestureTemplate] = field(default_factory=dict)
    version: int = DB_FORMAT_VERSION

    def validate(self) -> None:
        for service, policy in self.policies.items():
            if policy.service != service:
                raise DatabaseIntegrityError(
                    f"policy keyed {service!r} names service {policy.service!r}")
            if (policy.kind is PolicyKind.USER_DEPENDENT_TAP
                    and policy.template_id not in self.templates):
                raise DatabaseIntegrityError(
                    f"service {service!r} references missing template "
                    f"{policy.template_id!r}")


@dataclass(frozen=True)
class AccessRequest:
    app_id: str
    service: str
    t: int  # ms on the simulated clock

    def __post_init__(self):
        if not self.app_id or not self.service:
            raise ValueError("app_id and service must be non-empty")


@dataclass(frozen=True)
class Decision:
    outcome: Outcome
    reason: Reason
    score: Optional[float] = None

    def __post_init__(self):
        forward = self.outcome is Outcome.FORWARD
        if forward != (self.reason in FORWARD_REASONS):
            raise ValueError(
                f"inconsistent decision {self.outcome}/{self.reason}")


@dataclass(frozen=True)
class SensorContext:
    """Sensor data available to the checker at request time."""
    accel_buffer: Optional[AccelTrace] = None
    wait_forward_ms: int = 0


def check_permission(req: AccessRequest, db: GestureDatabase,
                     sensors: SensorContext,
                     prox_state: ProxDetectorState) -> Decision:
    """Decide one access request against the gesture database."""
    policy = db.policies.get(req.service)
    if policy is None or policy.kind is PolicyKind.UNPROTECTED:
        return Decision(Outcome.FORWARD, Reason.UNPROTECTED)

    if policy.kind is PolicyKind.USER_INDEPENDENT_PROX:
        if is_unlocked(prox_state, req.t):
            return Decision(Outcome.FORWARD, Reason.WITHIN_UNLOCK_WINDOW)
        return Decision(Outcome.REJECT, Reason.NO_GESTURE)

    # USER_DEPENDENT_TAP
    template = db.templates.get(policy.template_id)
    if template is None:
        return Decision(Outcome.REJECT, Reason.TEMPLATE_MISSING)

    start = req.t - policy.capture_window_ms
    end = req.t + sensors.wait_forward_ms
    buffer = None
    if sensors.accel_buffer is not None:
        buffer = sensors.accel_buffer.slice_ms(start, end)
    if buffer is None:
        return Decision(Outcome.REJECT, Reason.NO_GESTURE)
    try:
        hits = scan_stream(buffer, template)
    except ValueError:
        return Decision(Outcome.REJECT, Reason.NO_GESTURE)
    if hits:
        best = max(h.score for h in hits)
        return Decision(Outcome.FORWARD, Reason.GESTURE_MATCHED, score=best)
    return Decision(Outcome.REJECT, Reason.NO_GESTURE)


def register_policy(db: GestureDatabase, policy: GesturePolicy) -> GestureDatabase:
    if (policy.kind is PolicyKind.USER_DEPENDENT_TAP
            and policy.template_id not in db.templates):
        raise DatabaseIntegrityError(
            f"cannot register {policy.service!r}: template "
            f"{policy.template_id!r} not in database")
    db.policies[policy.service] = policy
    return db


def remove_policy(db: GestureDatabase, service: str) -> GestureDatabase:
    db.policies.pop(service, None)  # removing an absent policy is a no-op
    return db


def create_template(db: GestureDatabase, template_id: str,
                    traces: Sequence[AccelTrace], n: int = 100,
                    axis_rule: AxisRule = AxisRule.MEAN) -> GestureDatabase:
    """Create or replace a template built from training traces."""
    if not template_id:
        raise ValueError("template_id must be non-empty")
    db.templates[template_id] = build_template(traces, n=n, axis_rule=axis_rule)
    return db


def remove_template(db: GestureDatabase, template_id: str) -> GestureDatabase:
    users = [s for s, p in db.policies.items() if p.template_id == template_id]
    if users:
        raise DatabaseIntegrityError(
            f"template {template_id!r} still referenced by {users}")
    db.templates.pop(template_id, None)
    return db


def _template_to_doc(t: GestureTemplate) -> dict:
    return {
        "n": t.n,
        "axis_rule": t.axis_rule.value,
        "threshold": t.threshold,
        "created_from": t.created_from,
        "reference": serialize_accel_trace(t.reference),
    }


def _template_from_doc(doc: dict) -> GestureTemplate:
    return GestureTemplate(
        reference=parse_accel_trace(doc["reference"]),
        n=int(doc["n"]),
        threshold=float(doc["threshold"]),
        axis_rule=AxisRule(doc["axis_rule"]),
        created_from=int(doc["created_from"]),
    )


def save_db(db: GestureDatabase, path: str | os.PathLike) -> None:
    db.validate()
    doc = {
        "version": db.version,
        "policies": {
            s: {
                "service": p.service,
                "kind": p.kind.value,
                "template_id": p.template_id,
                "capture_window_ms": p.capture_window_ms,
            }
            for s, p in sorted(db.policies.items())
        },
        "templates": {
            tid: _template_to_doc(t) for tid, t in sorted(db.templates.items())
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_db(path: str | os.PathLike) -> GestureDatabase:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("version")
    if version != DB_FORMAT_VERSION:
        raise DatabaseIntegrityError(
            f"unsupported database version {version!r} "
            f"(expected {DB_FORMAT_VERSION})")
    templates = {tid: _template_from_doc(d)
                 for tid, d in doc.get("templates", {}).items()}
    policies = {}
    for service, p in doc.get("policies", {}).items():
        policies[service] = GesturePolicy(
            service=p["service"],
            kind=PolicyKind(p["kind"]),
            template_id=p.get("template_id"),
            capture_window_ms=int(p.get("capture_window_ms", 2000)),
        )
    db = GestureDatabase(policies=policies, templates=templates,
                         version=version)
    db.validate()
    return db


def decision_log_line(req: AccessRequest, decision: Decision) -> str:
    """One decision as `t_ms,app_id,service,outcome,reason,score`."""
    score = "" if decision.score is None else repr(decision.score)
    return (f"{req.t},{req.app_id},{req.service},"
            f"{decision.outcome.value},{decision.reason.value},{score}")
