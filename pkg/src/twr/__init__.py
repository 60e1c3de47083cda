"""Gesture-gated permission checking for simulated mobile services.

Two detectors gate access requests: accelerometer tap matching against a
per-user template, and template-free wave/tap/rub detection from proximity
sensor fluctuations. A synthetic trace harness evaluates both with
confusion-matrix reports.
"""

from .sensor_model import (
    AccelSample,
    AccelTrace,
    ProxSample,
    ProxTrace,
    TraceFormatError,
    parse_accel_trace,
    parse_prox_trace,
    resample,
    serialize_accel_trace,
    serialize_prox_trace,
)
from .tap_detector import (
    AxisRule,
    GestureTemplate,
    MatchResult,
    build_template,
    compute_threshold,
    cross_correlation,
    match,
    pearson,
    scan_stream,
)
from .prox_detector import (
    ProxConfig,
    ProxDetectorState,
    UnlockWindow,
    detect_changes,
    is_unlocked,
    on_change,
    run_detector,
)
from .permission_engine import (
    AccessRequest,
    Decision,
    GestureDatabase,
    GesturePolicy,
    Outcome,
    PolicyKind,
    Reason,
    SensorContext,
    check_permission,
    create_template,
    load_db,
    register_policy,
    remove_policy,
    save_db,
)

__version__ = "0.1.0"
