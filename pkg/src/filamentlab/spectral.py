"""Fourier machinery with one declared convention, used everywhere.

Convention: f_hat(xi) = integral f(x) exp(-i*x*xi) dx, discretized on a
periodic grid as dx * DFT with the x_min phase factored in, at the angular
frequencies xi_k = 2*pi*k/L.  Plancherel then reads
||f_hat||_{L2(dxi)}^2 = 2*pi*||f||_{L2(dx)}^2.
"""

from __future__ import annotations

import numpy as np

from .grids import ComplexField, Grid1D


def transform(f: ComplexField) -> np.ndarray:
    """Continuum-normalized Fourier coefficients f_hat(xi_k), fftfreq order."""
    g = f.grid
    if not g.periodic:
        raise ValueError("transform requires a periodic grid")
    xi = g.frequencies()
    return g.dx * np.exp(-1j * xi * g.x_min) * np.fft.fft(f.values)


def inverse_transform(grid: Grid1D, f_hat: np.ndarray) -> ComplexField:
    xi = grid.frequencies()
    vals = np.fft.ifft(np.exp(1j * xi * grid.x_min) * f_hat) / grid.dx
    return ComplexField(grid, vals)


def derivative(f: ComplexField, order: int = 1) -> ComplexField:
    """Spectral x-derivative on a periodic grid."""
    g = f.grid
    xi = g.frequencies()
    if order % 2 == 1:
        # zero the (unpaired) Nyquist mode for odd derivatives
        xi = xi.copy()
        if g.n_points % 2 == 0:
            xi[g.n_points // 2] = 0.0
    vals = np.fft.ifft((1j * xi) ** order * np.fft.fft(f.values))
    return ComplexField(g, vals)


def fd_derivative(values: np.ndarray, dx: float, order: int = 1) -> np.ndarray:
    """6th-order centered first derivative on a line grid (one-sided near ends).

    Used where a quadratic-phase field makes the periodic transform invalid.
    """
    if order != 1:
        raise ValueError("only first derivatives are provided for line grids")
    v = np.asarray(values)
    n = v.shape[0]
    if n < 9:
        raise ValueError("need at least 9 nodes")
    d = np.empty_like(v)
    c1, c2, c3 = 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0
    d[3:-3] = (c1 * (v[4:-2] - v[2:-4]) + c2 * (v[5:-1] - v[1:-5]) + c3 * (v[6:] - v[:-6])) / dx
    # 6th-order one-sided stencils at the ends
    edge = np.array([-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3, -15.0 / 4, 6.0 / 5, -1.0 / 6])
    for j in range(3):
        d[j] = np.dot(edge, v[j : j + 7]) / dx
        d[n - 1 - j] = -np.dot(edge, v[n - 1 - j : n - 8 - j : -1]) / dx
    return d


def free_propagator(grid: Grid1D, dt: float) -> np.ndarray:
    """Multiplier of exp(i*dt*d^2/dx^2) in fftfreq order: exp(-i*dt*xi^2)."""
    xi = grid.frequencies()
    return np.exp(-1j * dt * xi**2)


def free_evolve(f: ComplexField, dt: float) -> ComplexField:
    vals = np.fft.ifft(free_propagator(f.grid, dt) * np.fft.fft(f.values))
    return ComplexField(f.grid, vals)


def dealias_mask(grid: Grid1D) -> np.ndarray:
    """2/3-rule mask in fftfreq order."""
    k = np.fft.fftfreq(grid.n_points, d=1.0 / grid.n_points)
    return np.abs(k) <= grid.n_points // 3


def evaluate_band_limited(f: ComplexField, x_targets: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of f at arbitrary points."""
    g = f.grid
    f_hat = transform(f)
    xi = g.frequencies()
    if g.n_points % 2 == 0:
        # split the Nyquist coefficient symmetrically for a real-symmetric interpolant
        f_hat = f_hat.copy()
        nyq = g.n_points // 2
        f_hat[nyq] *= 0.5
        xi = np.concatenate([xi, [-xi[nyq]]])
        f_hat = np.concatenate([f_hat, [f_hat[nyq]]])
    phases = np.exp(1j * np.outer(np.asarray(x_targets, dtype=float), xi))
    return phases @ f_hat / g.length


def continuum_transform_at(f: ComplexField, xi_targets: np.ndarray) -> np.ndarray:
    """f_hat(xi) for arbitrary xi by direct summation (panel rule, spectrally
    accurate for fields decayed at the grid ends)."""
    x = f.grid.nodes()
    phases = np.exp(-1j * np.outer(np.asarray(xi_targets, dtype=float), x))
    return f.grid.dx * (phases @ f.values)


def sobolev_norm(f: ComplexField, s: int) -> float:
    """H^s norm (s <= 4) via the periodic transform."""
    if not 0 <= s <= 4:
        raise ValueError("only Sobolev orders 0..4 are tracked")
    f_hat = transform(f)
    xi = f.grid.frequencies()
    weight = (1.0 + xi**2) ** s
    dxi = 2.0 * np.pi / f.grid.length
    return float(np.sqrt(dxi * np.sum(weight * np.abs(f_hat) ** 2) / (2.0 * np.pi)))
