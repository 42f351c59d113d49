"""Numerical integration helpers.

``adaptive_gk`` is a small globally-adaptive Gauss-Kronrod (7/15) bisection
scheme for smooth complex integrands on finite intervals.  ``lorentz_pair_fourier``
evaluates Fourier integrals of a product of two complex Lorentzian factors
without using residues.
"""
from __future__ import annotations

import cmath
import heapq
import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate, special

from .config import ConvergenceError

# Kronrod 15-point nodes/weights and the embedded 7-point Gauss weights.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, 7 from the outside).
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5]] = _WG[:3]
_WEIGHTS_G[[9, 11, 13]] = _WG[2::-1]
_WEIGHTS_G[7] = _WG[3]


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = f(mid + half * _NODES)
    k = half * np.dot(_WEIGHTS_K, y)
    g = half * np.dot(_WEIGHTS_G, y)
    return k, abs(k - g)


def adaptive_gk(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                tol: float = 1e-10, max_depth: int = 40, max_intervals: int = 20000) -> complex:
    """Integrate a vectorised (complex) function over [a, b].

    Intervals with the largest error estimate are bisected until the summed
    estimate drops below ``tol``.  Raises ConvergenceError when an interval
    would exceed ``max_depth`` bisections or the interval budget runs out.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    val, err = _gk15(f, a, b)
    # heap of (-err, counter, a, b, depth, val)
    heap = [(-err, 0, a, b, 0, val)]
    total, total_err = val, err
    counter = 1
    while total_err > tol:
        neg_err, _, lo, hi, depth, v = heapq.heappop(heap)
        if depth >= max_depth or counter >= max_intervals:
            raise ConvergenceError(
                f"adaptive quadrature stalled at error {total_err:.3e} > tol {tol:.1e}"
            )
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, counter, lo, mid, depth + 1, v1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, depth + 1, v2))
        counter += 2
    # recompute the sum to shed accumulated round-off from the running updates
    return complex(sum(item[5] for item in heap))


def _quad_checked(func, a, b, tol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(func, a, b, epsabs=tol, epsrel=0.0, limit=2000, **kw)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(str(exc).splitlines()[0]) from exc
    if not math.isfinite(val) or (math.isfinite(err) and err > 10 * tol):
        raise ConvergenceError(f"quadrature error estimate {err:.3e} exceeds tol {tol:.1e}")
    return val


def lorentz_pair_fourier(a: float, b: complex, s: float, tol: float = 1e-11) -> complex:
    """Numerically evaluate  int_R exp(i v s) / ((a + i v)(b - i v)) dv.

    Requires real a > 0 and Re b > 0.  Shifts with |s| large compared with
    0.1 / scale go to QUADPACK's Fourier routine on each half line; small
    shifts use a finite window [-L, L] plus an asymptotic 1/v expansion of
    the tails integrated with exponential integrals.
    """
    scale = max(abs(a), abs(b))
    if a <= 0 or complex(b).real <= 0:
        raise ValueError("both Lorentzian widths must be positive")

    def h(v):
        return 1.0 / ((a + 1j * v) * (b - 1j * v))

    if abs(s) * scale >= 0.1:
        return _half_lines_qawf(h, s, tol)
    return _window_plus_tails(h, a, b, s, tol, L=1e4 * scale)


def _half_lines_qawf(h, s, tol):
    total = 0j
    for sign in (1.0, -1.0):
        def re(v, sign=sign):
            return h(sign * v).real

        def im(v, sign=sign):
            return h(sign * v).imag

        omega = sign * s
        aw = abs(omega)
        sg = math.copysign(1.0, omega)
        cr = _qawf(re, aw, "cos", tol)
        sr = _qawf(re, aw, "sin", tol)
        ci = _qawf(im, aw, "cos", tol)
        si = _qawf(im, aw, "sin", tol)
        # exp(i omega v) = cos(|omega| v) + i sgn(omega) sin(|omega| v)
        total += (cr - sg * si) + 1j * (ci + sg * sr)
    return total


def _expn_imag(n_max, z):
    """E_1..E_n_max at complex z via upward recurrence from E_1."""
    out = [special.exp1(z)]
    ez = cmath.exp(-z)
    for n in range(1, n_max):
        out.append((ez - z * out[-1]) / n)
    return out


def _window_plus_tails(h, a, b, s, tol, L):
    def re(v):
        return (h(v) * cmath.exp(1j * v * s)).real

    def im(v):
        return (h(v) * cmath.exp(1j * v * s)).imag

    # peaks of |h|: v = 0 (a is real) and v = Im b
    edges = _window_edges([0.0, complex(b).imag], min(abs(a), complex(b).real), L)
    ptol = tol / (4 * (len(edges) - 1))
    core = 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        core += _quad_checked(re, lo, hi, ptol) + 1j * _quad_checked(im, lo, hi, ptol)
    # h(v) = v^-2 (1 + p/v + q/v^2)^-1 with p = i(b - a), q = a b
    p = 1j * (b - a)
    q = a * b
    coeffs = {2: 1.0, 3: -p, 4: p * p - q, 5: 2 * p * q - p**3}

    def tail(sv):
        # int_L^inf e^{i v sv} v^-n dv = L^{1-n} E_n(-i L sv)
        if sv == 0.0:
            en = [None] + [1.0 / (n - 1) for n in range(2, 6)]
        else:
            en = [None] + _expn_imag(5, -1j * L * sv)[1:]
        return {n: L ** (1 - n) * en[n - 1] for n in range(2, 6)}

    right = tail(s)
    left = tail(-s)
    tails = sum(c * (right[n] + (-1) ** n * left[n]) for n, c in coeffs.items())
    return core + tails


def _window_edges(peaks, width, L):
    """Panel edges on [-L, L]: fine around each peak, geometric further out."""
    pts = {-L, L}
    for c in peaks:
        r = width
        while abs(c) + r < L:
            for e in (c - r, c + r):
                if -L < e < L:
                    pts.add(e)
            r *= 4
        if -L < c < L:
            pts.add(c)
    # merge near-duplicate edges from nearly coincident peaks
    merged = [-L]
    for p in sorted(pts)[1:-1]:
        if p - merged[-1] > 1e-3 * width and L - p > 1e-3 * width:
            merged.append(p)
    merged.append(L)
    return merged


def _qawf(func, omega, kind, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(func, 0.0, np.inf, weight=kind, wvar=omega,
                                      epsabs=tol, limlst=200, limit=2000)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(str(exc).splitlines()[0]) from exc
    return val
