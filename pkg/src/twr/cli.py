"""Command-line front end.

Exit codes: 0 success (or matched / zero mismatches), 1 clean negative
(no match, replay mismatches), 2 usage or input error.
"""

from __future__ import annotations

import sys
from dataclasses import replace

import click

from .permission_engine import (
    DatabaseIntegrityError,
    GestureDatabase,
    GesturePolicy,
    PolicyKind,
    create_template,
    load_db,
    register_policy,
    remove_policy,
    remove_template,
    save_db,
)
from .prox_detector import DEFAULT_EPSILON_CM, ProxConfig, run_detector
from .sensor_model import (
    TraceFormatError,
    parse_accel_trace,
    parse_prox_trace,
    serialize_accel_trace,
    serialize_prox_trace,
)
from .synth_harness import (
    ActivityKind,
    GenParams,
    ProxStreamKind,
    build_demo_database,
    gen_activity_trace,
    gen_corpus,
    gen_prox_corpus,
    gen_prox_stream,
    gen_tap_trace,
    load_scenario,
    run_prox_evaluation,
    run_scenario,
    run_tap_evaluation,
)
from .tap_detector import AxisRule, match

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

GEN_KINDS = (["tap1", "tap2", "tap3"]
             + [f"accel-{k.value}" for k in ActivityKind]
             + [f"prox-{k.value}" for k in ProxStreamKind])


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


def _load_db_or_new(path: str) -> GestureDatabase:
    import os
    if os.path.exists(path):
        try:
            return load_db(path)
        except (DatabaseIntegrityError, ValueError, OSError) as exc:
            _fail(f"cannot load database {path}: {exc}")
    return GestureDatabase()


def _load_db_required(path: str) -> GestureDatabase:
    try:
        return load_db(path)
    except FileNotFoundError:
        _fail(f"database {path} not found")
    except (DatabaseIntegrityError, ValueError) as exc:
        _fail(f"cannot load database {path}: {exc}")


def _read_accel(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_accel_trace(fh.read())
    except (TraceFormatError, OSError) as exc:
        _fail(f"{path}: {exc}")


prox_options = [
    click.option("--wind-sz", default=6, show_default=True),
    click.option("--wave-time-limit-ms", default=1500, show_default=True),
    click.option("--unlock-time-frame-ms", default=1000, show_default=True),
    click.option("--prox-epsilon-cm", default=DEFAULT_EPSILON_CM,
                 show_default=True),
]


def with_prox_options(f):
    for opt in reversed(prox_options):
        f = opt(f)
    return f


@click.group()
def main():
    """Gesture-gated permission tooling: train, match, detect, evaluate."""


@main.command()
@click.argument("trace_files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--template-id", required=True)
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--n", default=100, show_default=True)
@click.option("--axis-rule", default="mean", show_default=True,
              type=click.Choice([r.value for r in AxisRule]))
def train(trace_files, template_id, db_path, n, axis_rule):
    """Build a gesture template from two or more recorded traces."""
    if len(trace_files) < 2:
        _fail("need at least 2 traces")
    traces = [_read_accel(f) for f in trace_files]
    db = _load_db_or_new(db_path)
    try:
        create_template(db, template_id, traces, n=n,
                        axis_rule=AxisRule(axis_rule))
        save_db(db, db_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    template = db.templates[template_id]
    click.echo(f"threshold={template.threshold!r}")


@main.command("match")
@click.argument("trace_file", type=click.Path(exists=True))
@click.option("--template-id", required=True)
@click.option("--db", "db_path", required=True, type=click.Path())
def match_cmd(trace_file, template_id, db_path):
    """Match one trace against a stored template; exit 0 iff it matches."""
    db = _load_db_required(db_path)
    template = db.templates.get(template_id)
    if template is None:
        _fail(f"unknown template {template_id!r}")
    trace = _read_accel(trace_file)
    try:
        result = match(trace, template)
    except ValueError as exc:
        _fail(str(exc))
    click.echo(f"score={result.score!r} matched={str(result.matched).lower()}")
    sys.exit(EXIT_OK if result.matched else EXIT_NEGATIVE)


@main.command("prox-run")
@click.argument("prox_file", type=click.Path(exists=True))
@with_prox_options
def prox_run(prox_file, wind_sz, wave_time_limit_ms, unlock_time_frame_ms,
             prox_epsilon_cm):
    """Run the proximity detector over a trace; print unlock windows."""
    try:
        with open(prox_file, encoding="utf-8") as fh:
            trace = parse_prox_trace(fh.read())
        cfg = ProxConfig(wind_sz=wind_sz,
                         wave_time_limit_ms=wave_time_limit_ms,
                         unlock_time_frame_ms=unlock_time_frame_ms)
        windows = run_detector(trace, cfg, prox_epsilon_cm)
    except (TraceFormatError, ValueError, OSError) as exc:
        _fail(f"{prox_file}: {exc}")
    for w in windows:
        click.echo(f"unlock,{w.start},{w.end}")


@main.group()
def db():
    """Inspect and administer a gesture database file."""


@db.command("list")
@click.option("--db", "db_path", required=True, type=click.Path())
def db_list(db_path):
    database = _load_db_required(db_path)
    for service, p in sorted(database.policies.items()):
        tid = p.template_id or "-"
        click.echo(f"policy,{service},{p.kind.value},{tid},"
                   f"{p.capture_window_ms}")
    for tid, t in sorted(database.templates.items()):
        click.echo(f"template,{tid},{t.n},{t.axis_rule.value},"
                   f"{t.threshold!r},{t.created_from}")


@db.command("add-policy")
@click.argument("service")
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--kind", required=True,
              type=click.Choice([k.value for k in PolicyKind]))
@click.option("--template-id", default=None)
@click.option("--capture-window-ms", default=2000, show_default=True)
def db_add_policy(service, db_path, kind, template_id, capture_window_ms):
    database = _load_db_or_new(db_path)
    try:
        register_policy(database, GesturePolicy(
            service=service, kind=PolicyKind(kind), template_id=template_id,
            capture_window_ms=capture_window_ms))
        save_db(database, db_path)
    except (DatabaseIntegrityError, ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"registered,{service}")


@db.command("rm-policy")
@click.argument("service")
@click.option("--db", "db_path", required=True, type=click.Path())
def db_rm_policy(service, db_path):
    database = _load_db_required(db_path)
    if service not in database.policies:
        click.echo(f"warning: no policy for {service!r}", err=True)
    remove_policy(database, service)
    try:
        save_db(database, db_path)
    except OSError as exc:
        _fail(str(exc))
    click.echo(f"removed,{service}")


@db.command("rm-template")
@click.argument("template_id")
@click.option("--db", "db_path", required=True, type=click.Path())
def db_rm_template(template_id, db_path):
    database = _load_db_required(db_path)
    if template_id not in database.templates:
        click.echo(f"warning: no template {template_id!r}", err=True)
    try:
        remove_template(database, template_id)
        save_db(database, db_path)
    except (DatabaseIntegrityError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"removed,{template_id}")


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True))
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--wait-forward-ms", default=0, show_default=True)
@with_prox_options
def replay(scenario_file, db_path, wait_forward_ms, wind_sz,
           wave_time_limit_ms, unlock_time_frame_ms, prox_epsilon_cm):
    """Replay a scenario file; exit 0 iff every decision matched."""
    database = _load_db_required(db_path)
    try:
        scenario = load_scenario(scenario_file)
        cfg = ProxConfig(wind_sz=wind_sz,
                         wave_time_limit_ms=wave_time_limit_ms,
                         unlock_time_frame_ms=unlock_time_frame_ms)
        result = run_scenario(scenario, database, cfg, prox_epsilon_cm,
                              wait_forward_ms=wait_forward_ms)
    except (ValueError, OSError) as exc:
        _fail(f"{scenario_file}: {exc}")
    for line in result.log_lines:
        click.echo(line)
    for m in result.mismatches:
        click.echo(f"mismatch: {m}", err=True)
    click.echo(f"mismatches={len(result.mismatches)}")
    sys.exit(EXIT_OK if not result.mismatches else EXIT_NEGATIVE)


@main.command("eval")
@click.argument("suite", type=click.Choice(["tap", "prox"]))
@click.option("--seed", default=1000, show_default=True)
@click.option("--traces", "trace_count", default=150, show_default=True)
@click.option("--train-count", default=30, show_default=True)
@click.option("--n", default=100, show_default=True)
@with_prox_options
def eval_cmd(suite, seed, trace_count, train_count, n, wind_sz,
             wave_time_limit_ms, unlock_time_frame_ms, prox_epsilon_cm):
    """Run the confusion-matrix evaluation on fixed-seed synthetic corpora."""
    from .tap_detector import build_template

    if suite == "tap":
        templates = {}
        corpora = {}
        for taps in (1, 2, 3):
            p = GenParams(rng_seed=seed + taps * 10_000,
                          taps_per_window=taps)
            templates[f"tapping_x{taps}"] = build_template(
                gen_corpus(None, p, train_count), n)
            corpora[f"tapping_x{taps}"] = gen_corpus(
                None, replace(p, rng_seed=p.rng_seed + 5000), trace_count)
        for kind in ActivityKind:
            p = GenParams(rng_seed=seed + 90_000)
            corpora[kind.value] = gen_corpus(kind, p, trace_count)
        report = run_tap_evaluation(templates, corpora)
    else:
        cfg = ProxConfig(wind_sz=wind_sz,
                         wave_time_limit_ms=wave_time_limit_ms,
                         unlock_time_frame_ms=unlock_time_frame_ms)
        corpora = {
            kind.value: gen_prox_corpus(
                kind, GenParams(rng_seed=seed + 50_000), trace_count)
            for kind in ProxStreamKind
        }
        report = run_prox_evaluation(corpora, cfg, prox_epsilon_cm)

    click.echo(report.table())
    click.echo("")
    for line in report.machine_lines():
        click.echo(line)
    click.echo(f"runtime_s={report.runtime_s:.3f}")


@main.command()
@click.option("--kind", required=True, type=click.Choice(GEN_KINDS))
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--sample-rate-hz", default=50, show_default=True)
@click.option("--noise-sigma", default=0.3, show_default=True)
@click.option("--impulse-amplitude", default=8.0, show_default=True)
@click.option("--impulse-width-ms", default=200, show_default=True)
@click.option("--prox-transition-period-ms", default=150, show_default=True)
def gen(kind, seed, out_path, sample_rate_hz, noise_sigma, impulse_amplitude,
        impulse_width_ms, prox_transition_period_ms):
    """Generate one seeded synthetic trace file."""
    p = GenParams(rng_seed=seed, sample_rate_hz=sample_rate_hz,
                  noise_sigma=noise_sigma,
                  impulse_amplitude=impulse_amplitude,
                  impulse_width_ms=impulse_width_ms,
                  prox_transition_period_ms=prox_transition_period_ms)
    try:
        if kind.startswith("tap"):
            trace = gen_tap_trace(replace(p, taps_per_window=int(kind[3:])))
            text = serialize_accel_trace(trace)
        elif kind.startswith("accel-"):
            trace = gen_activity_trace(ActivityKind(kind[len("accel-"):]), p)
            text = serialize_accel_trace(trace)
        else:
            trace = gen_prox_stream(ProxStreamKind(kind[len("prox-"):]), p)
            text = serialize_prox_trace(trace)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote={out_path}")


@main.command()
@click.option("--db", "db_path", default=None, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@with_prox_options
def serve(db_path, host, port, wind_sz, wave_time_limit_ms,
          unlock_time_frame_ms, prox_epsilon_cm):
    """Run the HTTP service wrapping the permission engine."""
    import uvicorn

    from .service import create_app

    cfg = ProxConfig(wind_sz=wind_sz, wave_time_limit_ms=wave_time_limit_ms,
                     unlock_time_frame_ms=unlock_time_frame_ms)
    uvicorn.run(create_app(db_path, cfg), host=host, port=port)


@main.command("demo-db")
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--seed", default=12345, show_default=True)
def demo_db(db_path, seed):
    """Write a demo database (nfc tap policy + sms proximity policy)."""
    try:
        save_db(build_demo_database(seed=seed), db_path)
    except OSError as exc:
        _fail(str(exc))
    click.echo(f"wrote={db_path}")


if __name__ == "__main__":
    main()
