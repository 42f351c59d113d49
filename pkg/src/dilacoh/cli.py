"""Command-line front end.

    dilacoh visibility   [--lambda1 --delta --w0 --kappa-tau --direction --t-max]
    dilacoh sweep-frame  [--range lo:hi --steps]
    dilacoh sweep-3d     [--range lo:hi --steps]
    dilacoh feedback     [--r-phase --n --t-max --dt --n-modes]
    dilacoh oracle-check

Settings come from (lowest to highest priority) built-in per-command
defaults, an optional ``--config`` file with ``[section]`` headers and
``key = value`` lines, and explicit flags.  Output is CSV (default) or JSON,
to ``--out`` or stdout.  Exit codes: 0 ok, 2 config, 3 I/O, 4 numerical guard.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import feedback, frames, model, oracle, three_d
from .config import ConvergenceError, Direction, DomainError, GuardError, PhysicsConfig

SCHEMA = "dilacoh-v1"
EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_GUARD = 0, 2, 3, 4

_FIG2 = {"lambda1": 1.0, "delta": 1e-6, "w0": 1e6, "kappa_tau": 1e-2}
_COMMAND_DEFAULTS = {
    "visibility": dict(_FIG2),
    "sweep-frame": dict(_FIG2, range=(0.0, 5.0), steps=2000),
    "sweep-3d": {"lambda1": 1.0, "delta": 0.0, "w0": 10.0, "range": (0.0, 2.0), "steps": 21},
    # feedback defaults to the centered frame (lambda1 = 1 - delta/2)
    "feedback": {"delta": 1e-3, "w0": 1e3, "kappa_tau": 1e-2, "n": 1},
    "oracle-check": {},
}


@dataclass
class RunConfig:
    command: str
    lambda1: float | None = None
    delta: float = 0.0
    w0: float = 1.0
    kappa_tau: float = 0.0
    direction: str = "up"
    range: tuple[float, float] | None = None
    steps: int | None = None
    n_modes: int | None = None
    dt: float | None = None
    t_max: float | None = None
    r_phase: float | None = None
    n: int = 1
    threshold: float = 0.1
    format: str = "csv"
    out: str | None = None
    threads: int = 1

    def physics(self) -> PhysicsConfig:
        lam1 = self.lambda1 if self.lambda1 is not None else 1 - self.delta / 2
        return PhysicsConfig.from_delta(lam1, self.delta, self.w0, self.kappa_tau,
                                        Direction.parse(self.direction))


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _parse_range(text) -> tuple[float, float]:
    if isinstance(text, tuple):
        return text
    parts = str(text).split(":")
    if len(parts) != 2:
        raise DomainError(f"range must look like lo:hi, got {text!r}")
    return float(parts[0]), float(parts[1])


def _coerce(key: str, value):
    if value is None:
        return None
    typ = _FIELD_TYPES[key]
    if key == "range":
        return _parse_range(value)
    if typ.startswith("int"):
        f = float(value)
        if f != int(f):
            raise DomainError(f"{key} must be an integer, got {value!r}")
        return int(f)
    if typ.startswith("float"):
        return float(value)
    return str(value)


def _read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc.strerror}") from exc
    except configparser.Error as exc:
        raise DomainError(f"malformed config file {path}: {exc}") from exc
    values = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = key.replace("-", "_")
            if name not in _FIELD_TYPES or name == "command":
                raise DomainError(f"unknown config key {key!r} in [{section}]")
            values[name] = value
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values = dict(_COMMAND_DEFAULTS[args.command])
    if args.config:
        values.update(_read_config_file(args.config))
    for name in _FIELD_TYPES:
        v = getattr(args, name, None)
        if v is not None and name != "command":
            values[name] = v
    if "threads" not in values:
        env = os.environ.get("DILACOH_THREADS")
        if env:
            values["threads"] = env
    cfg = RunConfig(args.command, **{k: _coerce(k, v) for k, v in values.items()})
    if cfg.format not in ("csv", "json"):
        raise DomainError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.threads < 1:
        raise DomainError("threads must be >= 1")
    Direction.parse(cfg.direction)
    return cfg


# ----------------------------------------------------------------- output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def _json(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(obj)


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    comments: list[str] = dataclasses.field(default_factory=list)
    extra: dict = dataclasses.field(default_factory=dict)


def render(table: Table, command: str, fmt: str) -> str:
    if fmt == "json":
        keys = [c.lower() for c in table.columns]
        records = [dict(zip(keys, r)) for r in table.rows]
        if table.extra:
            return _json({"schema": SCHEMA, "command": command, **table.extra, "rows": records}) + "\n"
        return _json(records) + "\n"
    buf = io.StringIO()
    buf.write(f"# {SCHEMA} {command}\n")
    for c in table.comments:
        buf.write(f"# {c}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(_fmt(x) for x in r) + "\n")
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _pool_map(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------- commands

def cmd_visibility(rc: RunConfig) -> Table:
    cfg = rc.physics()
    key = "v_upward" if cfg.direction is Direction.UPWARD else "v_downward"
    dom = model.dominance_margin(cfg, rc.threshold)
    lim = three_d.visibility_3d_limits(cfg)
    rec = {
        "lambda1": cfg.lambda1, "lambda2": cfg.lambda2, "delta": cfg.delta, "w0": cfg.w0,
        "kappa_tau": cfg.kappa_tau, "direction": cfg.direction.value,
        key: model.visibility_asymptotic(cfg),
        "v_3d": three_d.visibility_3d_closed(cfg),
        "v_3d_small_limit": lim.small_limit, "v_3d_large_limit": lim.large_limit,
        "regime_3d": lim.applicable.value,
        "baseline": math.exp(-cfg.kappa_tau),
        "ratio": dom.ratio, "dominant": dom.dominant,
    }
    if rc.t_max is not None:
        rec["t"] = rc.t_max
        rec["v_t"] = model.visibility_time(cfg, rc.t_max)
    return Table(list(rec), [list(rec.values())])


def cmd_sweep_frame(rc: RunConfig) -> Table:
    lam = frames.lambda_grid(rc.range, rc.steps)
    v = _pool_map(lambda x: model.visibility_frame(float(x), rc.delta, rc.w0, rc.kappa_tau),
                  lam, rc.threads)
    curve = model.VisibilityCurve(lam, np.array(v), model.Source.CLOSED_FORM, "lambda1")
    best = frames.optimal_frame(rc.delta, rc.w0, rc.kappa_tau)
    print(f"optimal frame: lambda1={best.lambda1:.10g} V={best.v:.10g}"
          f"{' (boundary)' if best.boundary else ''}", file=sys.stderr)
    return Table(["lambda1", "V"], [[a, b] for a, b in curve.points])


def cmd_sweep_3d(rc: RunConfig) -> Table:
    lo, hi = rc.range
    if rc.steps is None or rc.steps < 2 or not 0 <= lo < hi:
        raise DomainError("sweep-3d needs 0 <= lo < hi and steps >= 2")
    taus = np.linspace(lo, hi, rc.steps)
    base = rc.physics()

    def row(kt):
        cfg = base.with_(kappa_tau=float(kt))
        return [float(kt), model.visibility_asymptotic(cfg),
                three_d.visibility_3d_closed(cfg), three_d.visibility_3d_quadrature(cfg)]

    return Table(["kappa_tau", "V", "V3_closed", "V3_quadrature"],
                 _pool_map(row, taus, rc.threads))


def cmd_feedback(rc: RunConfig) -> Table:
    cfg = rc.physics()
    r_phase = rc.r_phase if rc.r_phase is not None else float(rc.n)
    r = r_phase * math.pi / (2 * cfg.lambda2 * cfg.w0)
    fb = feedback.FeedbackConfig.from_geometry(cfg, r, rc.n)
    rep = feedback.resonance_check(cfg, fb)
    try:
        asym = feedback.c2_asymptotic(cfg, fb)
    except DomainError:
        asym = None
    t_max = rc.t_max if rc.t_max is not None else 20.0 / min(cfg.lambdas) ** 2
    dt = rc.dt if rc.dt is not None else min(fb.delays(cfg)) / 20
    dde = feedback.integrate_dde(cfg, fb, t_max, dt)
    run = feedback.run_mirror_oracle(cfg, fb, t_max, rc.n_modes, n_save=40)
    rows = []
    for s in run.states:
        c1 = complex(np.interp(s.t, dde.t, dde.c1.real) + 1j * np.interp(s.t, dde.t, dde.c1.imag))
        c2 = complex(np.interp(s.t, dde.t, dde.c2.real) + 1j * np.interp(s.t, dde.t, dde.c2.imag))
        rel = complex(math.cos(cfg.delta * cfg.w0 * s.t), -math.sin(cfg.delta * cfg.w0 * s.t))
        v = 2 * abs(rel * c1.conjugate() * c2 + s.overlap)
        rows.append([s.t, 2 * abs(c1) ** 2, 2 * abs(c2) ** 2, v])
    info = {"phi1": fb.phi1, "phi2": fb.phi2, "on_resonance_2": rep.on_resonance_2,
            "excluded_1": rep.excluded_1, "c2_asymptotic": asym,
            "c2_bound_state": feedback.bound_state_fraction(cfg, fb)}
    comments = [" ".join(f"{k}={_fmt(v) if v is not None else 'none'}" for k, v in info.items())]
    return Table(["t", "abs_c1_sq", "abs_c2_sq", "V"], rows, comments, {"resonance": info})


# oracle-check: (name, function returning max deviation, tolerance)

def _check_overlap():
    worst = 0.0
    for lam1, delta, kt in [(1.0, 1e-3, 0.01), (1.5, 0.2, 0.7), (0.8, -0.1, 1.3)]:
        for d in (Direction.UPWARD, Direction.DOWNWARD):
            cfg = PhysicsConfig.from_delta(lam1, delta, 10.0, kt, d)
            for t in (0.5 * kt, kt, 2 * kt + 0.3):
                worst = max(worst, abs(model.photon_overlap(cfg, t) - oracle.overlap_quadrature(cfg, t)))
    return worst


def _check_3d():
    worst = 0.0
    for lam1, delta, w0, kt in [(1.0, 0.05, 10.0, 0.5), (2.0, -0.3, 3.0, 0.01), (0.7, 0.0, 50.0, 4.0)]:
        cfg = PhysicsConfig.from_delta(lam1, delta, w0, kt)
        worst = max(worst, abs(three_d.visibility_3d_closed(cfg) - three_d.visibility_3d_quadrature(cfg)))
    return worst


def _check_mode_oracle():
    cfg = PhysicsConfig.from_delta(1.0, 1e-3, 1e3, 1e-2)
    t_max = 15.0
    grid = oracle.build_grid(cfg, t_max, n_modes=None)
    run = oracle.integrate(cfg, grid, t_max, oracle.max_stable_dt(cfg, grid), n_save=3)
    s = run.final
    v_num = 2 * abs(oracle.coherence_numeric(s))
    return abs(v_num - model.visibility_time(cfg, s.t)) / model.visibility_time(cfg, s.t)


def _check_mode_norm():
    cfg = PhysicsConfig.from_delta(1.0, 1e-3, 1e3, 1e-2)
    grid = oracle.build_grid(cfg, 5.0, n_modes=None)
    run = oracle.integrate(cfg, grid, 5.0, oracle.max_stable_dt(cfg, grid), n_save=5)
    return max(abs(n - 0.5) for st in run.states for n in st.norms)


def _check_dde_exact():
    cfg = PhysicsConfig.centered(1e-3, 1e3, 1e-2)
    fb = feedback.FeedbackConfig.from_geometry(cfg, feedback.resonant_r(cfg, 1), 1)
    T = fb.delays(cfg)
    run = feedback.integrate_dde(cfg, fb, 3.0, min(T) / 20)
    worst = 0.0
    for idx in range(0, len(run.t), max(1, len(run.t) // 25)):
        t = float(run.t[idx])
        for b, c in ((0, run.c1), (1, run.c2)):
            lam = cfg.lambdas[b]
            ex = feedback.dde_series_solution(lam * lam, complex(math.cos(lam * cfg.w0 * T[b]),
                                              math.sin(lam * cfg.w0 * T[b])), T[b], t)
            worst = max(worst, abs(c[idx] - ex))
    return worst


def _check_dde_vs_modes():
    cfg = PhysicsConfig.centered(1e-3, 1e3, 1e-2)
    fb = feedback.FeedbackConfig.from_geometry(cfg, feedback.resonant_r(cfg, 1), 1)
    run = feedback.run_mirror_oracle(cfg, fb, 5.0, n_save=25)
    _, b = oracle.rotating_amplitudes(run)
    dde = feedback.integrate_dde(cfg, fb, 5.0, min(fb.delays(cfg)) / 20)
    ref = np.interp(run.times, dde.t, np.abs(dde.c2))
    return float(np.max(np.abs(np.abs(b) - ref)) / abs(dde.c2[0]))


ORACLE_CHECKS = [
    ("overlap_residue_vs_quadrature", _check_overlap, 1e-8),
    ("v3d_closed_vs_quadrature", _check_3d, 1e-10),
    ("mode_oracle_vs_closed_form_rel", _check_mode_oracle, 1e-2),
    ("mode_oracle_norm_drift", _check_mode_norm, 1e-7),
    ("dde_vs_series_solution", _check_dde_exact, 1e-9),
    ("dde_vs_mirror_modes_c2", _check_dde_vs_modes, 1e-2),
]


def cmd_oracle_check(rc: RunConfig) -> tuple[Table, bool]:
    devs = _pool_map(lambda chk: chk[1](), ORACLE_CHECKS, rc.threads)
    rows = [[name, dev, tol, "pass" if dev <= tol else "fail"]
            for (name, _, tol), dev in zip(ORACLE_CHECKS, devs)]
    return Table(["check", "max_deviation", "tolerance", "status"], rows), all(r[3] == "pass" for r in rows)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file with [section] key = value lines")
    common.add_argument("--lambda1", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--w0", type=float)
    common.add_argument("--kappa-tau", dest="kappa_tau", type=float)
    common.add_argument("--direction", choices=["up", "down"])
    common.add_argument("--range", help="sweep range lo:hi")
    common.add_argument("--steps", type=int)
    common.add_argument("--n-modes", dest="n_modes", type=int)
    common.add_argument("--dt", type=float)
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--r-phase", dest="r_phase", type=float,
                        help="branch-2 half round-trip phase in units of pi (default: n)")
    common.add_argument("--n", type=int)
    common.add_argument("--threshold", type=float, help="dominance ratio threshold")
    common.add_argument("--out")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--threads", type=int, help="worker pool width (env DILACOH_THREADS)")
    parser = argparse.ArgumentParser(prog="dilacoh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMAND_DEFAULTS:
        sub.add_parser(name, parents=[common])
    return parser


_COMMANDS = {
    "visibility": cmd_visibility,
    "sweep-frame": cmd_sweep_frame,
    "sweep-3d": cmd_sweep_3d,
    "feedback": cmd_feedback,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = build_config(args)
        if rc.command == "oracle-check":
            table, ok = cmd_oracle_check(rc)
        else:
            table, ok = _COMMANDS[rc.command](rc), True
        text = render(table, rc.command, rc.format)
    except (DomainError, ValueError) as exc:
        print(f"dilacoh: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GuardError, ConvergenceError) as exc:
        print(f"dilacoh: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    try:
        emit(text, rc.out)
    except OSError as exc:
        print(f"dilacoh: cannot write {rc.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if ok else 1


if __name__ == "__main__":
    sys.exit(main())
