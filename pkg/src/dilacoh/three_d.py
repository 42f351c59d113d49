"""Visibility when the photon may leave in any direction.

The dipole coupling scales as cos(theta), so a photon leaving at angle theta
to the vertical sees the position difference projected to tau cos(theta).
The forward hemisphere behaves like upward emission and the backward one
like downward emission; summing both reduces to the angular kernel

    F(k) = int_0^1 u^2 exp(k u) du = [-2 + e^k (2 - 2k + k^2)] / k^3.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import PhysicsConfig
from .model import _prefactor
from .quadrature import adaptive_gk

SERIES_THRESHOLD = 0.5
_SERIES_TERMS = 25
# F(k) = sum_n k^n / (n! (n + 3))
_SERIES = np.array([1.0 / (math.factorial(n) * (n + 3)) for n in range(_SERIES_TERMS)])


@dataclass(frozen=True)
class AngularKernelValue:
    k: complex
    f: complex


def kernel_series(k: complex, terms: int = _SERIES_TERMS) -> complex:
    acc = 0j
    for c in _SERIES[:terms][::-1]:
        acc = acc * k + c
    return complex(acc)


def kernel_direct(k: complex) -> complex:
    ek = cmath.exp(k)
    # 2(e^k - 1) keeps the leading cancellation exact
    num = 2 * _expm1(k) - 2 * k * ek + k * k * ek
    return num / k**3


def _expm1(k: complex) -> complex:
    if k.imag == 0:
        return complex(math.expm1(k.real))
    # expm1(x + iy) = expm1(x) cos y + (cos y - 1) + i e^x sin y
    x, y = k.real, k.imag
    return complex(math.expm1(x) * math.cos(y) - 2 * math.sin(y / 2) ** 2,
                   math.exp(x) * math.sin(y))


def kernel_f(k: complex, series_threshold: float = SERIES_THRESHOLD) -> complex:
    k = complex(k)
    if abs(k) < series_threshold:
        return kernel_series(k)
    return kernel_direct(k)


def kernel_args(cfg: PhysicsConfig) -> tuple[complex, complex]:
    """Exponents of the forward (branch 1) and backward (branch 2) channels."""
    tau = cfg.kappa_tau
    k1 = complex(-cfg.lambda1**2 * tau, cfg.w0 * cfg.lambda1 * tau)
    k2 = complex(-cfg.lambda2**2 * tau, -cfg.w0 * cfg.lambda2 * tau)
    return k1, k2


def kernel_values(cfg: PhysicsConfig) -> tuple[AngularKernelValue, AngularKernelValue]:
    return tuple(AngularKernelValue(k, kernel_f(k)) for k in kernel_args(cfg))


def visibility_3d_closed(cfg: PhysicsConfig) -> float:
    k1, k2 = kernel_args(cfg)
    return 1.5 * _prefactor(cfg.lambda1, cfg.lambda2, cfg.w0) * abs(kernel_f(k1) + kernel_f(k2))


def visibility_3d_quadrature(cfg: PhysicsConfig, tol: float = 1e-12) -> float:
    """Angular integral over the forward hemisphere, evaluated numerically."""
    k1, k2 = kernel_args(cfg)

    def integrand(theta):
        ct = np.cos(theta)
        return np.sin(theta) * ct * ct * (np.exp(k1 * ct) + np.exp(k2 * ct))

    val = adaptive_gk(integrand, 0.0, math.pi / 2, tol=tol)
    return 1.5 * _prefactor(cfg.lambda1, cfg.lambda2, cfg.w0) * abs(val)


class Regime(enum.Enum):
    SMALL = "small"
    LARGE = "large"
    NEITHER = "neither"


@dataclass(frozen=True)
class LimitReport:
    small_limit: float
    large_limit: float
    applicable: Regime


def classify(cfg: PhysicsConfig, lo: float = 0.1, hi: float = 10.0) -> Regime:
    phase = [cfg.w0 * lam * cfg.kappa_tau for lam in cfg.lambdas]
    decay = [lam * lam * cfg.kappa_tau for lam in cfg.lambdas]
    if max(phase) < lo and max(decay) < lo:
        return Regime.SMALL
    if min(phase) > hi and min(decay) > hi:
        return Regime.LARGE
    return Regime.NEITHER


def visibility_3d_limits(cfg: PhysicsConfig) -> LimitReport:
    """Short-delay and long-delay approximations of the 3D visibility."""
    pre = _prefactor(cfg.lambda1, cfg.lambda2, cfg.w0)
    tau = cfg.kappa_tau
    small = pre * (1 - (cfg.lambda1**2 + cfg.lambda2**2) * tau)
    k1, k2 = kernel_args(cfg)
    if tau > 0:
        cos_phi = cfg.lambda1**2 * tau / abs(k1)
        phi = math.acos(min(1.0, cos_phi))
        large = pre * abs(math.cos(3 * phi)) * (3 / abs(k1) ** 3 + 3 / abs(k2) ** 3)
    else:
        large = math.inf
    return LimitReport(small, large, classify(cfg))
