"""One test per acceptance criterion; each prints a PASS/FAIL summary line."""
import math
import subprocess
import sys
import time

import numpy as np

from dilacoh import feedback, frames, model, oracle, three_d
from dilacoh.config import Direction, PhysicsConfig


def _line(report, n, ok, detail):
    report(f"criterion {n} {'PASS' if ok else 'FAIL'}: {detail}")


def test_criterion_1_no_dilation_baseline(report):
    worst, best_time = 0.0, math.inf
    for kt in (0.0, 1e-3, 1e-2, 0.5, 3.0):
        cfg = PhysicsConfig(1.0, 1.0, 1e6, kt)
        for _ in range(20):
            t0 = time.perf_counter()
            v = model.visibility_asymptotic(cfg)
            best_time = min(best_time, time.perf_counter() - t0)
        worst = max(worst, abs(v - math.exp(-kt)))
    ok = worst <= 1e-12 and best_time < 1e-3
    _line(report, 1, ok, f"max |V - exp(-k tau)| = {worst:.2e}, call time {best_time * 1e6:.1f} us")
    assert ok


def test_criterion_2_frame_curve(report):
    w0, d, kt = 1e6, 1e-6, 1e-2
    t0 = time.perf_counter()
    curve = frames.sweep_lambda(d, w0, kt, (0.0, 5.0), 2000)
    opt = frames.optimal_frame(d, w0, kt)
    elapsed = time.perf_counter() - t0
    v = curve.v
    n_interior = int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])))
    brute = frames.sweep_lambda(d, w0, kt, (0.0, 5.0), 100_000)
    lam_b, v_b = brute.argmax()
    v1 = model.visibility_frame(1.0, d, w0, kt)
    ok = (n_interior == 1 and not opt.boundary and 1.6 <= opt.lambda1 <= 1.8
          and 0.94 <= opt.v <= 0.97 and abs(lam_b - opt.lambda1) <= 5e-5
          and v_b <= opt.v + 1e-12 and abs(v1 - 0.8855) <= 5e-4 and elapsed < 1.0)
    _line(report, 2, ok,
          f"lambda* = {opt.lambda1:.5f} (grid {lam_b:.5f}), V* = {opt.v:.5f}, "
          f"interior maxima = {n_interior}, V(1) = {v1:.5f}, {elapsed:.3f} s")
    assert ok


def test_criterion_3_mode_oracle(report):
    cfg = PhysicsConfig.from_delta(1.0, 1e-3, 1e3, 1e-2)
    t_max = 50.0
    t0 = time.perf_counter()
    grid = oracle.build_grid(cfg, t_max)
    run = oracle.integrate(cfg, grid, t_max, oracle.max_stable_dt(cfg, grid), n_save=100)
    elapsed = time.perf_counter() - t0
    v_num = 2 * abs(oracle.coherence_numeric(run.final))
    v_ref = model.visibility_asymptotic(cfg)
    v_err = abs(v_num - v_ref) / v_ref
    drift = max(abs(n - 0.5) for s in run.states for n in s.norms)
    a1, _ = oracle.rotating_amplitudes(run)
    rate = oracle.fit_decay_rate(run.times, a1, 1.0, 10.0)
    half = 0.5 * cfg.lambda1**2
    rate_ok = abs(rate - half) <= 0.01 * half
    ok = v_err <= 0.01 and drift <= 1e-7 and rate_ok
    _line(report, 3, ok,
          f"n_modes = {grid.n_modes}, V rel dev = {v_err:.2e}, norm drift = {drift:.1e}, "
          f"fitted |C1| rate = {rate:.4f} vs required {half:.4f} "
          f"(model rate lambda1^2 = {cfg.lambda1**2:.4f}), {elapsed:.0f} s")
    assert v_err <= 0.01 and drift <= 1e-7
    # Known failure: the amplitude in this model decays at lambda1^2 kappa.
    assert rate_ok, f"fitted rate {rate:.4f} is not within 1% of {half:.4f}"


def _overlap_matrix():
    cfgs = [
        PhysicsConfig.from_delta(1.0, 0.1, 5.0, 0.4),
        PhysicsConfig.from_delta(1.3, -0.2, 20.0, 1.0, Direction.DOWNWARD),
        PhysicsConfig.from_delta(0.8, 0.05, 2.0, 0.05),
        PhysicsConfig.from_delta(2.0, 0.3, 10.0, 2.0, Direction.DOWNWARD),
        PhysicsConfig.from_delta(1.0, 1e-3, 1e3, 1e-2),
    ]
    return [(cfg, frac * cfg.kappa_tau) for cfg in cfgs for frac in (0.5, 1.0, 1.5, 4.0)]


def test_criterion_4_residue_overlap(report):
    t0 = time.perf_counter()
    worst = 0.0
    for cfg, t in _overlap_matrix():
        worst = max(worst, abs(model.photon_overlap(cfg, t) - oracle.overlap_quadrature(cfg, t)))
    jump = 0.0
    for cfg, t in _overlap_matrix()[1::4]:
        eps = 1e-9
        jump = max(jump, abs(model.photon_overlap(cfg, t + eps) - model.photon_overlap(cfg, t - eps)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and jump <= 1e-6 and elapsed < 10
    _line(report, 4, ok, f"20-point max abs dev = {worst:.1e}, jump at t = tau = {jump:.1e}, {elapsed:.2f} s")
    assert ok


def test_criterion_5_three_dimensional(report):
    rng = np.random.default_rng(20240917)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        cfg = PhysicsConfig.from_delta(rng.uniform(0.3, 3.0), rng.uniform(-0.2, 0.5),
                                       rng.uniform(0.1, 200.0), rng.uniform(0.0, 3.0))
        worst = max(worst, abs(three_d.visibility_3d_closed(cfg) - three_d.visibility_3d_quadrature(cfg)))
    v0 = three_d.visibility_3d_closed(PhysicsConfig(1.0, 1.0, 1e3, 0.0))
    small = [PhysicsConfig.from_delta(1.0, 1e-6, 1e6, kt) for kt in np.geomspace(1e-10, 1e-7, 12)]
    small_ok = all(three_d.visibility_3d_closed(c) < model.visibility_asymptotic(c) for c in small)
    large = [PhysicsConfig.from_delta(1.0, 0.01, w0, kt)
             for w0 in np.linspace(0.8, 1.5, 4) for kt in np.linspace(15.0, 50.0, 8)]
    large_ok = all(three_d.visibility_3d_closed(c) > model.visibility_asymptotic(c) for c in large)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and v0 == 1.0 and small_ok and large_ok and elapsed < 30
    _line(report, 5, ok,
          f"closed vs quadrature max dev = {worst:.1e}, V3(0) = {v0!r}, "
          f"small-k V3 < V: {small_ok}, large-k V3 > V: {large_ok}, {elapsed:.1f} s")
    assert ok


def test_criterion_6_feedback(report):
    cfg = PhysicsConfig.centered(1e-3, 1e3, 1e-2)
    fb = feedback.FeedbackConfig.from_geometry(cfg, feedback.resonant_r(cfg, 1), 1)
    target = math.exp(-math.pi * (1 + cfg.delta / 2) / cfg.w0)
    t0 = time.perf_counter()
    dde = feedback.integrate_dde(cfg, fb, 20.0, min(fb.delays(cfg)) / 20)
    p_dde = float(dde.population(2)[-1])
    run = feedback.run_mirror_oracle(cfg, fb, 20.0, n_save=2)
    _, a2 = oracle.rotating_amplitudes(run)
    p_modes = 2 * abs(a2[-1]) ** 2
    v_asym = feedback.visibility_feedback(cfg, fb, 20.0).v
    sym = PhysicsConfig.centered(0.0, 1e3, 0.0)
    fb_sym = feedback.FeedbackConfig.from_geometry(sym, feedback.resonant_r(sym, 1), 1)
    v_sym = feedback.visibility_feedback(sym, fb_sym, 20.0).v
    elapsed = time.perf_counter() - t0
    dev_dde = abs(p_dde - target) / target
    dev_modes = abs(p_modes - target) / target
    ok = dev_dde <= 0.02 and dev_modes <= 0.02 and v_asym <= 0.05 and v_sym >= 0.9
    _line(report, 6, ok,
          f"|C2|^2 target {target:.5f}: delay eq {p_dde:.5f} ({dev_dde:.2%}), "
          f"modes {p_modes:.5f} ({dev_modes:.2%}); V asymmetric = {v_asym:.4f}, "
          f"V symmetric = {v_sym:.4f}, {elapsed:.0f} s")
    assert ok


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "dilacoh", *argv], capture_output=True, check=False)


def test_criterion_7_determinism(report):
    cases = [("visibility",), ("sweep-frame", "--steps", "500"), ("sweep-3d", "--threads", "2"),
             ("feedback", "--t-max", "3", "--format", "json")]
    same = True
    for argv in cases:
        a, b = _cli(*argv), _cli(*argv)
        same &= a.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    chk = _cli("oracle-check")
    ok = same and chk.returncode == 0
    _line(report, 7, ok, f"repeated runs byte-identical: {same}, oracle-check exit code {chk.returncode}")
    assert ok
