"""Atom in front of a mirror: delayed self-coupling of each branch.

A perfect mirror at distance L_i from branch i turns the flat coupling into
the standing-wave profile sqrt(2) sin(w L_i).  Eliminating the field gives
the delay equation (branch rotating frame, gamma_i = lam_i^2 kappa)

    dc_i/dt = -gamma_i [c_i(t) - exp(i lam_i w0 T_i) c_i(t - T_i) H(t - T_i)]

with round-trip delay T_i = 2 L_i.  Emission is suppressed when the
half round-trip phase phi_i = lam_i w0 L_i is a multiple of pi.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import model, oracle
from .config import Direction, DomainError, GuardError, PhysicsConfig


@dataclass(frozen=True)
class FeedbackConfig:
    """Mirror geometry stored as the half round-trip phases of both branches."""

    phi1: float
    phi2: float
    n: int = 1
    m_exclusion_margin: float = 0.1 * math.pi

    def __post_init__(self):
        if self.phi1 <= 0 or self.phi2 <= 0:
            raise DomainError("mirror phases must be positive (mirror above both positions)")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"resonance integer n must be >= 1, got {self.n}")

    @classmethod
    def from_geometry(cls, cfg: PhysicsConfig, r: float, n: int = 1,
                      m_exclusion_margin: float = 0.1 * math.pi) -> "FeedbackConfig":
        """Mirror a distance 2 r (units c/kappa) above the upper position.

        The lower branch sits one light delay tau further away, at 2 r + tau.
        """
        if r <= 0:
            raise DomainError("r must be positive")
        phi2 = cfg.lambda2 * cfg.w0 * 2 * r
        phi1 = cfg.lambda1 * cfg.w0 * (2 * r + cfg.kappa_tau)
        return cls(phi1, phi2, n, m_exclusion_margin)

    @classmethod
    def from_physical(cls, r: float, g: float, c: float, w0: float, delta: float, n: int = 1,
                      m_exclusion_margin: float = 0.1 * math.pi) -> "FeedbackConfig":
        """Phases from mirror distance r, gravity g and light speed c (consistent units)."""
        if r <= 0 or g <= 0 or c <= 0:
            raise DomainError("r, g and c must be positive")
        phi2 = w0 * (1 + delta / 2) * 2 * r / c
        # position separation delta c^2 / g
        phi1 = w0 * (1 - delta / 2) * (2 * r + delta * c * c / g) / c
        return cls(phi1, phi2, n, m_exclusion_margin)

    def delays(self, cfg: PhysicsConfig) -> tuple[float, float]:
        """Round-trip delays (T_1, T_2)."""
        return (2 * self.phi1 / (cfg.lambda1 * cfg.w0), 2 * self.phi2 / (cfg.lambda2 * cfg.w0))

    def lengths(self, cfg: PhysicsConfig) -> tuple[float, float]:
        t1, t2 = self.delays(cfg)
        return (t1 / 2, t2 / 2)


def resonant_r(cfg: PhysicsConfig, n: int = 1) -> float:
    """Mirror distance that puts branch 2 exactly on its n-th resonance."""
    return n * math.pi / (2 * cfg.lambda2 * cfg.w0)


def _distance_to_multiple_of_pi(phi: float) -> float:
    x = math.fmod(phi, math.pi)
    return min(x, math.pi - x)


@dataclass(frozen=True)
class ResonanceReport:
    on_resonance_2: bool
    excluded_1: bool
    detuning_2: float
    distance_1: float


def resonance_check(cfg: PhysicsConfig, fb: FeedbackConfig, atol: float = 1e-9) -> ResonanceReport:
    d2 = fb.phi2 - fb.n * math.pi
    d1 = _distance_to_multiple_of_pi(fb.phi1)
    return ResonanceReport(abs(d2) < atol, d1 >= fb.m_exclusion_margin, d2, d1)


def c2_asymptotic(cfg: PhysicsConfig, fb: FeedbackConfig) -> float:
    """Long-time trapped fraction of branch 2, exp(-n pi kappa lam_2 / w0).

    Expressed relative to the initial branch weight.  Raises DomainError when
    the resonance conditions do not hold.
    """
    rep = resonance_check(cfg, fb)
    if not (rep.on_resonance_2 and rep.excluded_1):
        raise DomainError(
            f"resonance conditions violated (phi2 - n pi = {rep.detuning_2:.3g}, "
            f"phi1 distance to m pi = {rep.distance_1:.3g})"
        )
    return math.exp(-fb.n * math.pi * cfg.lambda2 / cfg.w0)


def bound_state_fraction(cfg: PhysicsConfig, fb: FeedbackConfig, branch: int = 2) -> float:
    """Exact trapped fraction 1/(1 + gamma T)^2 of the delay equation at resonance."""
    lam = cfg.lambdas[branch - 1]
    T = fb.delays(cfg)[branch - 1]
    return 1.0 / (1.0 + lam * lam * T) ** 2


@dataclass
class DdeRun:
    t: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    delays: tuple[float, float]
    meta: dict = field(default_factory=dict)

    def population(self, branch: int) -> np.ndarray:
        """|c_i|^2 relative to the initial branch weight 1/2."""
        c = self.c1 if branch == 1 else self.c2
        return 2 * np.abs(c) ** 2


def _hermite(t0, h, y0, y1, f0, f1, s):
    """Cubic Hermite interpolant on [t0, t0 + h] evaluated at t0 + s h (t0 unused)."""
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1)


def _dde_branch(gamma: float, phase: complex, K: int, c0: complex, n: int, h: float):
    """RK4 with Hermite-interpolated history on a grid where the delay is K steps.

    The derivative jumps at multiples of the delay, so both one-sided
    derivatives are stored at every node.
    """
    y = np.zeros(n + 1, dtype=complex)
    fl = np.zeros(n + 1, dtype=complex)  # left limits
    fr = np.zeros(n + 1, dtype=complex)  # right limits
    beta = gamma * phase
    y[0] = c0
    fr[0] = -gamma * c0
    for i in range(n):
        j = i - K
        if j >= 0:
            d_mid = beta * _hermite(0.0, h, y[j], y[j + 1], fr[j], fl[j + 1], 0.5)
            d_end = beta * y[j + 1]
        else:
            d_mid = d_end = 0j
        yi = y[i]
        k1 = fr[i]
        k2 = -gamma * (yi + 0.5 * h * k1) + d_mid
        k3 = -gamma * (yi + 0.5 * h * k2) + d_mid
        k4 = -gamma * (yi + h * k3) + d_end
        y[i + 1] = yi + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        fl[i + 1] = -gamma * y[i + 1] + d_end
        # history switches on at t = T
        fr[i + 1] = fl[i + 1] + (beta * y[0] if j == -1 else 0j)
    return y, fl, fr


def _resample(y, fl, fr, h, t):
    """Hermite interpolation of a step-grid solution at times ``t``."""
    j = np.minimum((t / h).astype(int), len(y) - 2)
    s = t / h - j
    return _hermite(0.0, h, y[j], y[j + 1], fr[j], fl[j + 1], s)


def integrate_dde(cfg: PhysicsConfig, fb: FeedbackConfig, t_max: float, dt: float) -> DdeRun:
    """Integrate both branches of the delay equation to ``t_max``.

    The history before t = 0 is empty.  The internal step is the largest
    one not above ``dt`` or 0.01 / gamma_i that divides the delay evenly.
    """
    T = fb.delays(cfg)
    if dt <= 0 or t_max <= 0:
        raise DomainError("dt and t_max must be positive")
    if dt > min(T) / 20 * (1 + 1e-12):
        raise GuardError(f"dt={dt:.3g} exceeds min(T)/20 = {min(T) / 20:.3g}")
    out = []
    for i, lam in enumerate(cfg.lambdas):
        K = math.ceil(T[i] / min(dt, 0.01 / (lam * lam)) - 1e-9)
        h = T[i] / K
        phase = cmath.exp(1j * lam * cfg.w0 * T[i])
        n = math.ceil(t_max / h - 1e-9) + 1
        out.append((h, _dde_branch(lam * lam, phase, K, complex(math.sqrt(0.5)), n, h)))
    # common output grid with spacing close to dt
    n_out = int(math.ceil(t_max / dt - 1e-9))
    grid = np.linspace(0.0, t_max, n_out + 1)
    series = [_resample(y, fl, fr, h, grid) for h, (y, fl, fr) in out]
    return DdeRun(grid, series[0], series[1], T, {"dt": dt})


def dde_series_solution(gamma: float, phase: complex, T: float, t: float,
                        c0: complex = math.sqrt(0.5)) -> complex:
    """Closed-form method-of-steps solution of the delay equation.

    c(t) = c0 sum_k beta^k (t - kT)^k / k! exp(-gamma (t - kT)),  beta = gamma phase.
    """
    if T <= 0:
        raise DomainError("delay must be positive")
    total = complex(math.exp(-gamma * t))
    k = 1
    while k * T < t:
        x = t - k * T
        logmag = k * math.log(gamma * x) - math.lgamma(k + 1) - gamma * x
        total += cmath.exp(logmag + 1j * k * cmath.phase(phase))
        k += 1
    return c0 * total


def build_mirror_grid(cfg: PhysicsConfig, fb: FeedbackConfig, t_max: float, n_modes: int,
                      margin_widths: float = 40.0) -> oracle.ModeGrid:
    """Mode grid with standing-wave couplings sqrt(2) sin(w L_i)."""
    w_lo, w_hi = oracle.frequency_window(cfg, margin_widths)
    freqs, spacing = oracle._bins(w_lo, w_hi, n_modes, t_max)
    L = fb.lengths(cfg)
    amp = math.sqrt(2 * spacing / math.pi)
    g = np.vstack([lam * amp * np.sin(freqs * Li) for lam, Li in zip(cfg.lambdas, L)])
    return oracle.ModeGrid(freqs, spacing, g.astype(complex), w_lo, w_hi,
                           {"model": "mirror", "margin_widths": margin_widths})


def run_mirror_oracle(cfg: PhysicsConfig, fb: FeedbackConfig, t_max: float,
                      n_modes: int | None = None, margin_widths: float = 40.0,
                      n_save: int = 40) -> oracle.OracleRun:
    if n_modes is None:
        n_modes = oracle.min_modes(cfg, t_max, margin_widths)
    grid = build_mirror_grid(cfg, fb, t_max, n_modes, margin_widths)
    dt = oracle.max_stable_dt(cfg, grid)
    return oracle.integrate(cfg, grid, t_max, dt, n_save=n_save)


def visibility_two_sided(cfg: PhysicsConfig, t: float) -> float:
    """No-mirror reference for the standing-wave field: half of each photon
    leaves upward and half downward."""
    c1, c2 = model.excited_amplitudes(cfg, t)
    up = model.photon_overlap(cfg.with_(direction=Direction.UPWARD), t)
    down = model.photon_overlap(cfg.with_(direction=Direction.DOWNWARD), t)
    rel = cmath.exp(-1j * cfg.delta * cfg.w0 * t)
    return 2 * abs(rel * c1.conjugate() * c2 + 0.5 * (up + down))


@dataclass(frozen=True)
class FeedbackVisibility:
    v: float
    c1: complex
    c2: complex
    overlap: complex
    t: float


def visibility_feedback(cfg: PhysicsConfig, fb: FeedbackConfig, t_max: float,
                        dt: float | None = None, n_modes: int | None = None,
                        margin_widths: float = 40.0) -> FeedbackVisibility:
    """Visibility at ``t_max``: excited amplitudes from the delay equation,
    photon overlap from the mirror-mode oracle."""
    T = fb.delays(cfg)
    dt = dt or min(T) / 20
    dde = integrate_dde(cfg, fb, t_max, dt)
    run = run_mirror_oracle(cfg, fb, t_max, n_modes, margin_widths, n_save=1)
    c1, c2 = complex(dde.c1[-1]), complex(dde.c2[-1])
    rel = cmath.exp(-1j * cfg.delta * cfg.w0 * t_max)
    coh = rel * c1.conjugate() * c2 + run.final.overlap
    return FeedbackVisibility(2 * abs(coh), c1, c2, run.final.overlap, t_max)
