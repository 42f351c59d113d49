"""Closed-form amplitudes and visibilities of the single-excitation model.

Conventions (kappa = 1):

* branch i has dilation factor lam_i, excited-state amplitude decay rate
  lam_i**2 and field coupling density lam_i / sqrt(pi);
* branch 1 sits at the origin, branch 2 at light distance tau; the emitted
  photon carries the position phase exp(i s w x_i) with s = +1 for upward
  and s = -1 for downward emission;
* all amplitudes live in a frame rotating at a frequency common to both
  branches, so interference terms carry only the relative phase
  exp(-i delta w0 t) between the excited and the photon channel.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import Direction, DomainError, PhysicsConfig, _branch_index

SQRT_HALF = math.sqrt(0.5)


class Source(Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    ORACLE = "oracle"


@dataclass(frozen=True)
class AmplitudeState:
    t: float
    c1: complex
    c2: complex
    overlap: complex


@dataclass
class VisibilityCurve:
    abscissa: np.ndarray
    v: np.ndarray
    source: Source
    abscissa_name: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.abscissa.shape != self.v.shape or self.abscissa.ndim != 1:
            raise ValueError("abscissa and v must be 1-d arrays of equal length")
        if len(self.abscissa) > 1 and not np.all(np.diff(self.abscissa) > 0):
            raise ValueError("abscissas must be strictly increasing")
        if np.any(self.v < 0):
            raise ValueError("visibilities must be non-negative")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.abscissa.tolist(), self.v.tolist()))

    def __len__(self):
        return len(self.abscissa)

    def argmax(self) -> tuple[float, float]:
        i = int(np.argmax(self.v))
        return float(self.abscissa[i]), float(self.v[i])


def _check_time(t: float) -> None:
    if not t >= 0:
        raise DomainError(f"time must be non-negative, got {t}")


def excited_amplitudes(cfg: PhysicsConfig, t: float) -> tuple[complex, complex]:
    """Excited-state amplitudes of both branches (rotating frame of each branch)."""
    _check_time(t)
    return (complex(SQRT_HALF * math.exp(-cfg.lambda1**2 * t)),
            complex(SQRT_HALF * math.exp(-cfg.lambda2**2 * t)))


def spectral_amplitude(cfg: PhysicsConfig, branch: int, w, t: float):
    """Photon amplitude density C_iw(t) of branch ``branch`` at frequency ``w``.

    Includes the 1/sqrt(2) branch weight, so that
    |C_i(t)|^2 + int |C_iw(t)|^2 dw = 1/2.  Accepts scalar or array ``w``.
    """
    _check_time(t)
    i = _branch_index(branch)
    lam = cfg.lambdas[i]
    gam = lam * lam
    x = 0.0 if i == 0 else cfg.kappa_tau
    w = np.asarray(w, dtype=float)
    u = gam + 1j * (lam * cfg.w0 - w)
    out = (SQRT_HALF * lam / math.sqrt(math.pi)) * np.exp(1j * cfg.direction.sign * w * x) \
        * (-np.expm1(-u * t)) / u
    return out if out.ndim else complex(out)


def _poles(cfg: PhysicsConfig) -> tuple[complex, complex]:
    """Poles of conj(C_1w) C_2w in the complex w plane (upper, lower)."""
    g1, g2 = cfg.lambda1**2, cfg.lambda2**2
    return (complex(cfg.lambda1 * cfg.w0, g1), complex(cfg.lambda2 * cfg.w0, -g2))


def lorentz_fourier(cfg: PhysicsConfig, s: float) -> complex:
    """Residue evaluation of  int dw exp(i w s) / ((g1 - i d1)(g2 + i d2))."""
    p1, p2 = _poles(cfg)
    pole = p1 if s >= 0 else p2
    return 2j * math.pi * cmath.exp(1j * pole * s) / (p1 - p2)


def overlap_terms(cfg: PhysicsConfig, t: float) -> list[tuple[complex, float]]:
    """(coefficient, shift) pairs with overlap = sum coeff * int h(w) e^{i w shift} dw.

    ``h`` is the t-independent Lorentzian product; shared by the residue and
    the quadrature routes.
    """
    g1, g2 = cfg.lambda1**2, cfg.lambda2**2
    st = cfg.direction.sign * cfg.kappa_tau
    a1 = cmath.exp(complex(-g1 * t, cfg.lambda1 * cfg.w0 * t))
    a2 = cmath.exp(complex(-g2 * t, -cfg.lambda2 * cfg.w0 * t))
    pref = 0.5 * cfg.lambda1 * cfg.lambda2 / math.pi
    return [(pref, st), (-pref * a1, st - t), (-pref * a2, st + t), (pref * a1 * a2, st)]


def photon_overlap(cfg: PhysicsConfig, t: float) -> complex:
    """int dw conj(C_1w(t)) C_2w(t), evaluated with the residue theorem."""
    _check_time(t)
    return sum(coef * lorentz_fourier(cfg, s) for coef, s in overlap_terms(cfg, t))


def amplitude_state(cfg: PhysicsConfig, t: float) -> AmplitudeState:
    c1, c2 = excited_amplitudes(cfg, t)
    return AmplitudeState(t, c1, c2, photon_overlap(cfg, t))


def coherence_time(cfg: PhysicsConfig, t: float) -> complex:
    """Off-diagonal position coherence (half the complex visibility)."""
    c1, c2 = excited_amplitudes(cfg, t)
    rel = cmath.exp(-1j * cfg.delta * cfg.w0 * t)
    return rel * c1.conjugate() * c2 + photon_overlap(cfg, t)


def visibility_time(cfg: PhysicsConfig, t: float) -> float:
    return 2.0 * abs(coherence_time(cfg, t))


def _prefactor(lam1: float, lam2: float, w0: float) -> float:
    return 2.0 * lam1 * lam2 / math.hypot(lam1**2 + lam2**2, w0 * (lam2 - lam1))


def visibility_asymptotic(cfg: PhysicsConfig) -> float:
    """Long-time visibility; the decaying exponent follows the emission direction."""
    lam_exp = cfg.lambda1 if cfg.direction is Direction.UPWARD else cfg.lambda2
    return _prefactor(cfg.lambda1, cfg.lambda2, cfg.w0) * math.exp(-lam_exp**2 * cfg.kappa_tau)


def visibility_frame(lambda1: float, delta: float, w0: float, kappa_tau: float) -> float:
    """Upward visibility at fixed dilation difference as a function of the frame."""
    if lambda1 <= 0 or lambda1 + delta <= 0:
        raise DomainError(
            f"dilation factors must be positive (lambda1={lambda1}, lambda2={lambda1 + delta})"
        )
    return _prefactor(lambda1, lambda1 + delta, w0) * math.exp(-lambda1**2 * kappa_tau)


def visibility_center(delta: float, w0: float, kappa_tau: float) -> float:
    """Visibility with the zero of potential at the midpoint of the positions."""
    if abs(delta) >= 2:
        raise DomainError(f"|delta| must be < 2, got {delta}")
    return visibility_frame(1 - delta / 2, delta, w0, kappa_tau)


@dataclass(frozen=True)
class DominanceReport:
    ratio: float
    dominant: bool
    necessary_factor: float
    threshold: float


def dominance_margin(cfg: PhysicsConfig, threshold: float = 0.1) -> DominanceReport:
    """Compare the visibility against the pure spontaneous-emission baseline.

    ``dominant`` is true when V / exp(-kappa tau) <= threshold.
    """
    baseline = math.exp(-cfg.kappa_tau)
    ratio = visibility_asymptotic(cfg) / baseline
    expo = (cfg.lambda1**2 - 1) * cfg.kappa_tau
    necessary = math.exp(expo) if expo < 700 else math.inf
    return DominanceReport(ratio, ratio <= threshold, necessary, threshold)
