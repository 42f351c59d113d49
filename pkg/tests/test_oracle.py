import math

import numpy as np
import pytest

from dilacoh import model, oracle, three_d
from dilacoh.config import DomainError, GuardError, PhysicsConfig


@pytest.fixture(scope="module")
def short_run():
    cfg = PhysicsConfig.from_delta(1.0, 0.2, 10.0, 0.5)
    t_max = 6.0
    grid = oracle.build_grid(cfg, t_max)
    run = oracle.integrate(cfg, grid, t_max, oracle.max_stable_dt(cfg, grid), n_save=30,
                           keep_modes=True)
    return cfg, run


def test_recurrence_guard_names_remedy():
    cfg = PhysicsConfig(1.0, 1.0, 10.0, 0.0)
    need = oracle.min_modes(cfg, 5.0)
    with pytest.raises(GuardError, match=f"n_modes >= {need}"):
        oracle.build_grid(cfg, 5.0, n_modes=need // 2)
    assert oracle.build_grid(cfg, 5.0, n_modes=need).n_modes == need


def test_step_guard():
    cfg = PhysicsConfig(1.0, 1.0, 10.0, 0.0)
    grid = oracle.build_grid(cfg, 1.0)
    with pytest.raises(GuardError):
        oracle.integrate(cfg, grid, 1.0, 10 * oracle.max_stable_dt(cfg, grid))
    with pytest.raises(DomainError):
        oracle.integrate(cfg, grid, 1.0, -1.0)


def test_norm_conserved(short_run):
    _, run = short_run
    drift = max(abs(n - 0.5) for s in run.states for n in s.norms)
    assert drift < 1e-7


def test_excited_amplitude_follows_exponential(short_run):
    cfg, run = short_run
    a1, a2 = oracle.rotating_amplitudes(run)
    for t, x1, x2 in zip(run.times, a1, a2):
        e1, e2 = model.excited_amplitudes(cfg, t)
        # the +-40 linewidth window shifts the rate by ~1.6 %
        assert abs(abs(x1) - abs(e1)) < 1e-2 * 0.7071
        assert abs(abs(x2) - abs(e2)) < 1e-2 * 0.7071


def test_decay_rate_fit_near_lambda_squared(short_run):
    _, run = short_run
    a1, _ = oracle.rotating_amplitudes(run)
    rate = oracle.fit_decay_rate(run.times, a1, 1.0, 5.0)
    assert rate == pytest.approx(1.0, rel=0.03)


def test_visibility_tracks_closed_form(short_run):
    cfg, run = short_run
    curve = oracle.visibility_numeric(run)
    ref = np.array([model.visibility_time(cfg, t) for t in curve.abscissa])
    assert np.max(np.abs(curve.v - ref)) < 0.015
    assert abs(curve.v[-1] - ref[-1]) < 0.01


def test_mode_amplitudes_match_spectral_density(short_run):
    cfg, run = short_run
    s = run.final
    grid = run.grid
    near = np.abs(grid.mode_freqs - cfg.lambda1 * cfg.w0) < 3.0
    num = np.abs(s.c1w[near]) / math.sqrt(grid.spacing)
    ref = np.abs(model.spectral_amplitude(cfg, 1, grid.mode_freqs[near], s.t))
    assert np.max(np.abs(num - ref)) < 0.02 * ref.max()


def test_overlap_quadrature_continuity():
    cfg = PhysicsConfig.from_delta(1.2, 0.1, 5.0, 0.4)
    a = oracle.overlap_quadrature(cfg, 0.4 - 1e-9)
    b = oracle.overlap_quadrature(cfg, 0.4 + 1e-9)
    assert abs(a - b) < 1e-6


@pytest.mark.slow
def test_three_dimensional_oracle_matches_angular_formula():
    cfg = PhysicsConfig.from_delta(1.0, 0.05, 10.0, 0.5)
    t_max = 8.0
    n = oracle.min_modes(cfg, t_max)
    grid = oracle.build_grid_3d(cfg, t_max, n, n_angles=12)
    run = oracle.integrate(cfg, grid, t_max, oracle.max_stable_dt(cfg, grid), n_save=4)
    v = 2 * abs(oracle.coherence_numeric(run.final))
    assert v == pytest.approx(three_d.visibility_3d_closed(cfg), rel=0.02)
