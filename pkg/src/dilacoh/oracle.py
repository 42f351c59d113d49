"""Brute-force single-excitation dynamics on a discretised field.

The continuum of field modes is replaced by ``n_modes`` frequency bins and the
Schrodinger equation of each branch is integrated with fixed-step RK4 in a
frame rotating at the window centre.  Nothing here uses the closed-form
amplitudes; it is the independent check on them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .config import DomainError, GuardError, PhysicsConfig
from .model import Source, VisibilityCurve
from .quadrature import lorentz_pair_fourier

RECURRENCE_GUARD = 0.1


@dataclass
class ModeGrid:
    """Discrete field modes shared by both branches.

    ``couplings`` has shape (2, n_modes): the coupling of each mode to the
    excited state of branch 1 and branch 2, already multiplied by the square
    root of the bin width.
    """

    mode_freqs: np.ndarray
    spacing: float
    couplings: np.ndarray
    w_lo: float
    w_hi: float
    meta: dict = field(default_factory=dict)

    @property
    def n_modes(self) -> int:
        return len(self.mode_freqs)

    @property
    def center(self) -> float:
        return 0.5 * (self.w_lo + self.w_hi)


def frequency_window(cfg: PhysicsConfig, margin_widths: float = 40.0) -> tuple[float, float]:
    lw = [lam * cfg.w0 for lam in cfg.lambdas]
    margin = margin_widths * max(lam * lam for lam in cfg.lambdas)
    return min(lw) - margin, max(lw) + margin


def min_modes(cfg: PhysicsConfig, t_max: float, margin_widths: float = 40.0) -> int:
    """Smallest mode count whose recurrence time exceeds ``t_max``."""
    w_lo, w_hi = frequency_window(cfg, margin_widths)
    return int(math.ceil((w_hi - w_lo) * t_max / RECURRENCE_GUARD))


def _bins(w_lo, w_hi, n_modes, t_max):
    if n_modes < 2:
        raise DomainError("n_modes must be >= 2")
    if not t_max > 0:
        raise DomainError("t_max must be positive")
    spacing = (w_hi - w_lo) / n_modes
    if spacing * t_max > RECURRENCE_GUARD * (1 + 1e-12):
        need = math.ceil((w_hi - w_lo) * t_max / RECURRENCE_GUARD)
        raise GuardError(
            f"mode spacing {spacing:.4g} x t_max {t_max:g} = {spacing * t_max:.4g} exceeds "
            f"{RECURRENCE_GUARD}; use n_modes >= {need}"
        )
    freqs = w_lo + (np.arange(n_modes) + 0.5) * spacing
    return freqs, spacing


def free_space_couplings(cfg: PhysicsConfig, freqs: np.ndarray, spacing: float) -> np.ndarray:
    """Flat coupling lam_i / sqrt(pi) with the position phase of each branch."""
    s = cfg.direction.sign
    amp = math.sqrt(spacing / math.pi)
    g1 = cfg.lambda1 * amp * np.ones_like(freqs, dtype=complex)
    g2 = cfg.lambda2 * amp * np.exp(1j * s * freqs * cfg.kappa_tau)
    return np.vstack([g1, g2])


def build_grid(cfg: PhysicsConfig, t_max: float, n_modes: int | None = None,
               margin_widths: float = 40.0) -> ModeGrid:
    """Uniform grid covering both emission lines for the free-space model.

    Raises GuardError when the bin spacing would allow a revival before
    ``t_max``.  ``n_modes=None`` picks the smallest admissible count.
    """
    if n_modes is None:
        n_modes = min_modes(cfg, t_max, margin_widths)
    w_lo, w_hi = frequency_window(cfg, margin_widths)
    freqs, spacing = _bins(w_lo, w_hi, n_modes, t_max)
    return ModeGrid(freqs, spacing, free_space_couplings(cfg, freqs, spacing), w_lo, w_hi,
                    {"model": "free-space", "margin_widths": margin_widths})


def build_grid_3d(cfg: PhysicsConfig, t_max: float, n_modes: int, n_angles: int = 12,
                  margin_widths: float = 40.0) -> ModeGrid:
    """Frequency bins times Gauss-Legendre nodes in u = cos(theta) on [-1, 1].

    Each direction channel carries angular weight (3/2) u^2 du (the cos(theta)
    dipole coupling, normalised over the sphere) and the projected position
    phase exp(i w tau u).
    """
    w_lo, w_hi = frequency_window(cfg, margin_widths)
    freqs, spacing = _bins(w_lo, w_hi, n_modes, t_max)
    u, wu = np.polynomial.legendre.leggauss(n_angles)
    ang = np.sqrt(1.5 * u * u * wu)
    amp = math.sqrt(spacing / math.pi)
    W, U = np.meshgrid(freqs, u, indexing="ij")
    A = np.broadcast_to(ang, W.shape)
    g1 = cfg.lambda1 * amp * A
    g2 = cfg.lambda2 * amp * A * np.exp(1j * W * cfg.kappa_tau * U)
    couplings = np.vstack([g1.ravel().astype(complex), g2.ravel()])
    return ModeGrid(W.ravel(), spacing, couplings, w_lo, w_hi,
                    {"model": "3d", "n_angles": n_angles, "margin_widths": margin_widths})


@dataclass(frozen=True)
class OracleState:
    t: float
    c1: complex
    c2: complex
    c1w: np.ndarray | None = None
    c2w: np.ndarray | None = None
    overlap: complex = 0j
    norms: tuple[float, float] = (0.5, 0.5)


@dataclass
class OracleRun:
    states: list[OracleState]
    grid: ModeGrid
    dt: float
    levels: tuple[float, float]
    frame: float

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def c1(self) -> np.ndarray:
        return np.array([s.c1 for s in self.states])

    @property
    def c2(self) -> np.ndarray:
        return np.array([s.c2 for s in self.states])

    @property
    def final(self) -> OracleState:
        return self.states[-1]


@numba.njit(cache=True, fastmath=True)
def _rk4_block(c, b, eps, om, G, h, n_steps):
    """Advance every branch ``n_steps`` RK4 steps in place.

    Branch equations:  dc/dt = -i(eps c + sum_k conj(G_k) b_k),
                       db_k/dt = -i(om_k b_k + G_k c).
    """
    n_br, n = b.shape
    kprev = np.empty(n, dtype=np.complex128)
    acc = np.empty(n, dtype=np.complex128)
    stage_a = (0.0, 0.5, 0.5, 1.0)
    stage_w = (1.0, 2.0, 2.0, 1.0)
    for br in range(n_br):
        e = eps[br]
        for _ in range(n_steps):
            cc = c[br]
            kc_prev = 0j
            kc_acc = 0j
            for j in range(4):
                a = stage_a[j] * h
                w = stage_w[j]
                yc = cc + a * kc_prev
                dot = 0j
                for k in range(n):
                    if j == 0:
                        y = b[br, k]
                    else:
                        y = b[br, k] + a * kprev[k]
                    g = G[br, k]
                    kn = -1j * (om[k] * y + g * yc)
                    kprev[k] = kn
                    if j == 0:
                        acc[k] = kn
                    else:
                        acc[k] += w * kn
                    dot += g.conjugate() * y
                kc_prev = -1j * (e * yc + dot)
                kc_acc += w * kc_prev
            for k in range(n):
                b[br, k] += (h / 6.0) * acc[k]
            c[br] = cc + (h / 6.0) * kc_acc


def max_stable_dt(cfg: PhysicsConfig, grid: ModeGrid, levels=None) -> float:
    levels = levels or (cfg.lambda1 * cfg.w0, cfg.lambda2 * cfg.w0)
    om = grid.center
    fastest = max(
        max(lam * lam for lam in cfg.lambdas),
        float(np.max(np.abs(grid.mode_freqs - om))),
        max(abs(e - om) for e in levels),
    )
    return 0.05 / fastest


def integrate(cfg: PhysicsConfig, grid: ModeGrid, t_max: float, dt: float,
              n_save: int = 50, keep_modes: bool = False, levels=None) -> OracleRun:
    """RK4 integration of both branches from c_i = 1/sqrt(2), field in vacuum.

    Returns ``n_save + 1`` snapshots evenly spaced in time (the step count is
    rounded up so that ``t_max`` is hit exactly).  Mode vectors are retained
    for the final snapshot always and for all snapshots when ``keep_modes``.
    """
    if dt <= 0 or t_max <= 0:
        raise DomainError("dt and t_max must be positive")
    levels = levels or (cfg.lambda1 * cfg.w0, cfg.lambda2 * cfg.w0)
    limit = max_stable_dt(cfg, grid, levels)
    if dt > limit * (1 + 1e-12):
        raise GuardError(f"dt={dt:.3g} exceeds stability bound {limit:.3g}; reduce dt")
    om = grid.center
    n_steps = max(n_save, math.ceil(t_max / dt - 1e-9))
    n_steps = math.ceil(n_steps / n_save) * n_save
    h = t_max / n_steps
    every = n_steps // n_save

    G = np.ascontiguousarray(grid.couplings, dtype=np.complex128)
    om_modes = np.ascontiguousarray(grid.mode_freqs - om, dtype=np.float64)
    eps = np.array([levels[0] - om, levels[1] - om], dtype=np.float64)

    c = np.full(2, math.sqrt(0.5), dtype=complex)
    b = np.zeros_like(G)

    def snapshot(t, c, b, full):
        n1 = abs(c[0]) ** 2 + float(np.vdot(b[0], b[0]).real)
        n2 = abs(c[1]) ** 2 + float(np.vdot(b[1], b[1]).real)
        return OracleState(t, complex(c[0]), complex(c[1]),
                           b[0].copy() if full else None, b[1].copy() if full else None,
                           complex(np.vdot(b[0], b[1])), (n1, n2))

    states = [snapshot(0.0, c, b, keep_modes)]
    for block in range(1, n_save + 1):
        _rk4_block(c, b, eps, om_modes, G, h, every)
        t = block * every * h
        st = snapshot(t, c, b, keep_modes or block == n_save)
        drift = max(abs(n - 0.5) for n in st.norms)
        if drift > 1e-6 * max(t, 1.0):
            raise GuardError(f"norm drift {drift:.2e} at t={t:g}; reduce dt")
        states.append(st)
    return OracleRun(states, grid, h, tuple(levels), om)


def coherence_numeric(state: OracleState) -> complex:
    """c1* c2 + sum_w c1w* c2w in the common rotating frame."""
    return state.c1.conjugate() * state.c2 + state.overlap


def visibility_numeric(run: OracleRun) -> VisibilityCurve:
    v = [2 * abs(coherence_numeric(s)) for s in run.states]
    return VisibilityCurve(run.times, v, Source.ORACLE, "t",
                           {"n_modes": run.grid.n_modes, "dt": run.dt})


def rotating_amplitudes(run: OracleRun) -> tuple[np.ndarray, np.ndarray]:
    """Excited amplitudes with each branch's own transition phase removed."""
    t = run.times
    a1 = run.c1 * np.exp(1j * (run.levels[0] - run.frame) * t)
    a2 = run.c2 * np.exp(1j * (run.levels[1] - run.frame) * t)
    return a1, a2


def fit_decay_rate(times: np.ndarray, amp: np.ndarray, t_lo: float, t_hi: float) -> float:
    """Least-squares slope of -log|amp| over [t_lo, t_hi]."""
    sel = (times >= t_lo) & (times <= t_hi)
    if sel.sum() < 2:
        raise DomainError("fit window contains fewer than two samples")
    slope = np.polyfit(times[sel], np.log(np.abs(amp[sel])), 1)[0]
    return float(-slope)


def overlap_quadrature(cfg: PhysicsConfig, t: float, tol: float = 1e-11) -> complex:
    """int dw conj(C_1w(t)) C_2w(t) by direct numerical quadrature.

    The photon amplitudes are expanded into their four exponential pieces and
    each Fourier integral of the Lorentzian product is evaluated numerically.
    """
    if not t >= 0:
        raise DomainError("t must be non-negative")
    if tol <= 0:
        raise DomainError("tol must be positive")
    g1, g2 = cfg.lambda1**2, cfg.lambda2**2
    c = cfg.lambda1 * cfg.w0
    b = complex(g2, cfg.delta * cfg.w0)
    bound = math.pi / math.sqrt(g1 * g2)
    shift = cfg.direction.sign * cfg.kappa_tau
    e1 = complex(math.exp(-g1 * t)) * complex(math.cos(cfg.lambda1 * cfg.w0 * t),
                                              math.sin(cfg.lambda1 * cfg.w0 * t))
    e2 = complex(math.exp(-g2 * t)) * complex(math.cos(cfg.lambda2 * cfg.w0 * t),
                                              -math.sin(cfg.lambda2 * cfg.w0 * t))
    pref = 0.5 * cfg.lambda1 * cfg.lambda2 / math.pi
    # conj(1 - e^{-u1 t}) (1 - e^{-u2 t}) expanded; e^{-+ i w t} become shifts
    pieces = [(pref, shift), (-pref * e1, shift - t), (-pref * e2, shift + t),
              (pref * e1 * e2, shift)]
    total = 0j
    for coef, s in pieces:
        if abs(coef) * bound < tol / 8:
            continue
        piece = lorentz_pair_fourier(g1, b, s, tol / (8 * max(abs(coef), 1e-300)))
        total += coef * complex(math.cos(c * s), math.sin(c * s)) * piece
    return total


def photon_norm_quadrature(cfg: PhysicsConfig, branch: int, t: float,
                           tol: float = 1e-11) -> float:
    """int dw |C_iw(t)|^2, evaluated numerically."""
    lam = cfg.lambdas[branch - 1]
    g = lam * lam
    pref = 0.5 * lam * lam / math.pi
    e = math.exp(-g * t)
    # |1 - e^{-(g + i d) t}|^2 = 1 + e^2 - e (e^{-i d t} + e^{i d t})
    val = (1 + e * e) * lorentz_pair_fourier(g, g, 0.0, tol)
    if e * math.pi / g > tol / 8:
        val -= e * (lorentz_pair_fourier(g, g, t, tol) + lorentz_pair_fourier(g, g, -t, tol))
    return float((pref * val).real)
