"""Cumulative quadrature and tail-fitting helpers."""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson


def cumulative_integral(y: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral from the first node, 4th-order (per-interval
    cubic Newton-Cotes, one-sided stencils at the ends).

    Works along axis 0 for real or complex arrays.
    """
    y = np.asarray(y)
    n = y.shape[0]
    if n < 4:
        raise ValueError("need at least 4 samples")
    inc = np.empty_like(y)
    inc[0] = 0.0 * y[0]
    # interval [x_j, x_{j+1}] from the centered 4-point stencil
    inc[2:-1] = (dx / 24.0) * (-y[:-3] + 13.0 * y[1:-2] + 13.0 * y[2:-1] - y[3:])
    inc[1] = (dx / 24.0) * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3])
    inc[-1] = (dx / 24.0) * (9.0 * y[-1] + 19.0 * y[-2] - 5.0 * y[-3] + y[-4])
    return np.cumsum(inc, axis=0)


def cumulative_simpson_from(y: np.ndarray, dx: float, anchor: int) -> np.ndarray:
    """Cumulative Simpson integral anchored at node `anchor` (zero there)."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    out[anchor] = 0.0
    if anchor + 1 < y.shape[0]:
        out[anchor + 1 :] = cumulative_simpson(y[anchor:], dx=dx, initial=0.0)[1:]
    if anchor > 0:
        out[:anchor] = -cumulative_simpson(y[anchor::-1], dx=dx, initial=0.0)[:0:-1]
    return out


def tail_fit(x: np.ndarray, y: np.ndarray, powers=(0.0, -1.0)):
    """Least-squares fit y(x) ~ sum_k c_k x^powers[k] on a tail window.

    y may be (n,) or (n, m); returns (coeffs, rms_residual) with coeffs of
    shape (len(powers),) or (len(powers), m).  The constant term
    (power 0) is the extracted limit.
    """
    x = np.asarray(x, dtype=float)
    basis = np.stack([x**p for p in powers], axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coeffs
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    return coeffs, rms


def loglog_fit(t: np.ndarray, d: np.ndarray):
    """Fit log d = exponent*log t + log constant.

    Returns (exponent, constant, rms_residual, correlation).
    """
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    mask = (t > 0) & (d > 0)
    lt, ld = np.log(t[mask]), np.log(d[mask])
    if lt.size < 3:
        raise ValueError("need at least 3 positive samples for a log-log fit")
    a = np.stack([lt, np.ones_like(lt)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(a, ld, rcond=None)
    resid = ld - (slope * lt + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    corr = float(np.corrcoef(lt, ld)[0, 1]) if lt.size > 2 else 1.0
    return float(slope), float(np.exp(intercept)), rms, corr


def linear_fit_against(u: np.ndarray, y: np.ndarray):
    """Fit y = slope*u + offset; returns (slope, offset, correlation)."""
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.stack([u, np.ones_like(u)], axis=1)
    (slope, offset), *_ = np.linalg.lstsq(a, y, rcond=None)
    corr = float(np.corrcoef(u, y)[0, 1])
    return float(slope), float(offset), corr
