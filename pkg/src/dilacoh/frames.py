"""Dependence of the visibility on the choice of frame (zero of the potential).

With the dilation difference fixed, shifting the frame moves lam_1 and lam_2
together.  Larger dilation speeds up emission (shorter coherence) but
shrinks the relative weight of the frequency mismatch, so the visibility
has an interior optimum whenever the mismatch is nonzero.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .config import ConvergenceError, DomainError, PhysicsConfig
from .model import Source, VisibilityCurve, dominance_margin, visibility_frame


def upper_lambda(kappa_tau: float, floor: float = 1e-4) -> float:
    """Dilation beyond which exp(-lam^2 kappa tau) drops below ``floor``."""
    if kappa_tau <= 0:
        raise DomainError("a finite search range needs kappa_tau > 0")
    return math.sqrt(math.log(1.0 / floor) / kappa_tau)


def _lower_lambda(delta: float) -> float:
    lo = max(0.0, -delta)
    return lo + 1e-9 * max(1.0, abs(delta))


def lambda_grid(lambda_range: tuple[float, float], steps: int) -> np.ndarray:
    """Uniform grid on the half-open interval (lo, hi], ``steps`` points."""
    lo, hi = map(float, lambda_range)
    if steps < 2 or int(steps) != steps:
        raise DomainError(f"steps must be an integer >= 2, got {steps}")
    if not 0 <= lo < hi:
        raise DomainError(f"lambda range must satisfy 0 <= lo < hi, got ({lo}, {hi})")
    return lo + (hi - lo) * np.arange(1, steps + 1) / steps


def sweep_lambda(delta: float, w0: float, kappa_tau: float,
                 lambda_range: tuple[float, float] = (0.0, 5.0), steps: int = 2000) -> VisibilityCurve:
    lam = lambda_grid(lambda_range, steps)
    v = np.array([visibility_frame(x, delta, w0, kappa_tau) for x in lam])
    return VisibilityCurve(lam, v, Source.CLOSED_FORM, "lambda1",
                           {"delta": delta, "w0": w0, "kappa_tau": kappa_tau})


@dataclass(frozen=True)
class FrameOptimum:
    lambda1: float
    v: float
    boundary: bool
    local_maxima: int


def optimal_frame(delta: float, w0: float, kappa_tau: float, n_coarse: int = 2000,
                  xtol: float = 1e-8, lambda_hi: float | None = None) -> FrameOptimum:
    """Maximise V over lam_1 at fixed delta.

    A uniform coarse scan locates the best bracket, then golden-section
    refinement converges to ``xtol``.  Warns if the scan sees more than one
    interior maximum.  An optimum at the lower end (delta = 0) is reported
    with ``boundary=True``.
    """
    lo = _lower_lambda(delta)
    hi = lambda_hi if lambda_hi is not None else upper_lambda(kappa_tau)
    if hi <= lo:
        raise DomainError(f"empty search range [{lo}, {hi}]")
    grid = np.linspace(lo, hi, n_coarse)
    v = np.array([visibility_frame(x, delta, w0, kappa_tau) for x in grid])
    interior = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    n_max = int(interior.sum())
    if n_max > 1:
        warnings.warn(f"visibility has {n_max} local maxima in the frame scan; "
                      "refining the global grid maximum", RuntimeWarning)
    i = int(np.argmax(v))
    if i == 0 or i == n_coarse - 1:
        return FrameOptimum(float(grid[i]), float(v[i]), True, n_max)
    # golden's tolerance is relative to |x|
    res = optimize.minimize_scalar(
        lambda x: -visibility_frame(x, delta, w0, kappa_tau),
        bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden",
        tol=xtol / (2 * grid[i]),
    )
    x = float(res.x)
    if not grid[i - 1] <= x <= grid[i + 1]:
        raise ConvergenceError(f"golden-section refinement left its bracket (x={x})")
    return FrameOptimum(x, float(-res.fun), False, n_max)


def dominance_region(w0: float, kappa_tau: float, lambdas, deltas,
                     threshold: float = 0.1) -> np.ndarray:
    """Boolean matrix [i, j]: dilation-induced loss dominates at (lambdas[i], deltas[j])."""
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    dl = np.atleast_1d(np.asarray(deltas, dtype=float))
    if lam.size == 0 or dl.size == 0:
        raise DomainError("grids must be non-empty")
    out = np.zeros((lam.size, dl.size), dtype=bool)
    for i, x in enumerate(lam):
        for j, d in enumerate(dl):
            cfg = PhysicsConfig.from_delta(float(x), float(d), w0, kappa_tau)
            out[i, j] = dominance_margin(cfg, threshold).dominant
    return out
