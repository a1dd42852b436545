"""Curve and frame primitives.

Space curves are sampled on uniform arclength grids; orthonormal frames
(T, e1, e2) are transported along arclength by exact-rotation steps (CF4
averages of the generator, Rodrigues exponentials), so orthonormality is
preserved by construction.  The complex normal is N = e1 + i*e2.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import _rotation as rot
from ._quadrature import cumulative_integral
from .grids import ComplexField, Grid1D, require_same_grid


@dataclass(frozen=True)
class SampledCurve:
    """Arclength-sampled space curve; corner_index marks a Lipschitz point."""

    grid: Grid1D
    points: np.ndarray = field(repr=False)
    corner_index: Optional[int] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (self.grid.n_points, 3):
            raise ValueError(f"points shape {pts.shape} != ({self.grid.n_points}, 3)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def arclength_defect(self) -> float:
        """max_j | |chi_{j+1} - chi_j| / dx - 1 | over chords."""
        chords = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return float(np.max(np.abs(chords / self.grid.dx - 1.0)))

    def total_length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))

    def evaluate(self, x_new: np.ndarray) -> np.ndarray:
        """Cubic interpolation of the curve at arbitrary arclength values."""
        spline = CubicSpline(self.grid.nodes(), self.points, axis=0)
        return spline(np.asarray(x_new, dtype=float))


@dataclass(frozen=True)
class FrameField:
    """Orthonormal right-handed frame (T, e1, e2) sampled on a grid."""

    grid: Grid1D
    T: np.ndarray = field(repr=False)
    e1: np.ndarray = field(repr=False)
    e2: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("T", "e1", "e2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_points, 3):
                raise ValueError(f"{name} shape {arr.shape} != ({self.grid.n_points}, 3)")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def N(self) -> np.ndarray:
        """Complex normal e1 + i*e2, derived, never stored."""
        return self.e1 + 1j * self.e2

    def matrices(self) -> np.ndarray:
        """(n, 3, 3) rotation matrices with rows (T, e1, e2)."""
        return np.stack([self.T, self.e1, self.e2], axis=1)

    def gram_residual(self) -> float:
        return rot.gram_residual(self.matrices())

    def at(self, j: int) -> np.ndarray:
        return np.stack([self.T[j], self.e1[j], self.e2[j]])

    @staticmethod
    def from_matrices(grid: Grid1D, mats: np.ndarray) -> "FrameField":
        return FrameField(grid, mats[:, 0], mats[:, 1], mats[:, 2])


@dataclass(frozen=True)
class CurvatureTorsion:
    """Curvature/torsion samples; masks mark degenerate or unusable nodes."""

    grid: Grid1D
    c: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    tau_degenerate: Optional[np.ndarray] = field(default=None, repr=False)
    valid: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        tau = np.asarray(self.tau, dtype=float)
        n = self.grid.n_points
        if c.shape != (n,) or tau.shape != (n,):
            raise ValueError("c/tau must match the grid")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(tau))):
            raise ValueError("curvature/torsion contain non-finite values")
        if np.any(c < 0):
            raise ValueError("curvature must be nonnegative")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "tau", tau)
        if self.tau_degenerate is None:
            object.__setattr__(self, "tau_degenerate", np.zeros(n, dtype=bool))
        if self.valid is None:
            object.__setattr__(self, "valid", np.ones(n, dtype=bool))


CANONICAL_FRAME = np.eye(3)


def _frenet_axes(c_nodes: np.ndarray, tau_nodes: np.ndarray):
    """Generator axis w = (-tau, 0, -c) sampled at the CF4 Gauss offsets."""
    def axes_at(offset):
        cs = rot.sample_at_offset(c_nodes, offset)
        ts = rot.sample_at_offset(tau_nodes, offset)
        return np.stack([-ts, np.zeros_like(cs), -cs], axis=1)

    return axes_at(rot.CF4_NODE_LO), axes_at(rot.CF4_NODE_HI)


def _koiso_axes(psi_nodes: np.ndarray):
    """Generator axis w = (0, Im(psi), -Re(psi)) at the CF4 Gauss offsets."""
    def axes_at(offset):
        ps = rot.sample_at_offset(psi_nodes, offset)
        return np.stack([np.zeros(ps.shape[0]), ps.imag, -ps.real], axis=1)

    return axes_at(rot.CF4_NODE_LO), axes_at(rot.CF4_NODE_HI)


def _transport_bidirectional(grid: Grid1D, j0: int, frame0: np.ndarray, axes_builder):
    """Transport frames from node j0 to both grid ends.

    axes_builder(node_slice, reversed) -> (w_lo, w_hi) per interval of the
    (possibly reversed) node ordering.  Returns (n, 3, 3) frame matrices.
    """
    n = grid.n_points
    dx = grid.dx
    mats = np.empty((n, 3, 3))
    w_lo, w_hi = axes_builder(slice(j0, n), False)
    mats[j0:] = rot.transport(rot.cf4_axes(w_lo, w_hi, dx), frame0)
    if j0 > 0:
        w_lo, w_hi = axes_builder(slice(j0, None, -1), True)
        mats[j0::-1] = rot.transport(rot.cf4_axes(w_lo, w_hi, -dx), frame0)
    return mats


def _curve_from_tangent(grid: Grid1D, j0: int, point0: np.ndarray, T: np.ndarray) -> np.ndarray:
    pts = np.empty((grid.n_points, 3))
    pts[j0:] = point0 + cumulative_integral(T[j0:], grid.dx)
    if j0 > 0:
        pts[j0::-1] = point0 - cumulative_integral(T[j0::-1], grid.dx)
    return pts


def _check_inputs(frame0: np.ndarray, x0: float, grid: Grid1D) -> int:
    frame0 = np.asarray(frame0, dtype=float)
    rot.check_frame(frame0, tol=1e-12, what="frame0")
    return grid.index_of(x0)


def integrate_frenet(ct: CurvatureTorsion, frame0: np.ndarray, point0: np.ndarray, x0: float):
    """Integrate the Frenet system T' = c n, n' = -c T + tau b, b' = -tau n
    from the node at x0, recovering the curve from chi' = T.

    Returns (SampledCurve, FrameField) where the frame rows are (T, n, b).
    """
    grid = ct.grid
    j0 = _check_inputs(frame0, x0, grid)

    def axes_builder(sl, _reversed):
        return _frenet_axes(ct.c[sl], ct.tau[sl])

    mats = _transport_bidirectional(grid, j0, np.asarray(frame0, dtype=float), axes_builder)
    pts = _curve_from_tangent(grid, j0, np.asarray(point0, dtype=float), mats[:, 0])
    return SampledCurve(grid, pts), FrameField.from_matrices(grid, mats)


def integrate_koiso(psi: ComplexField, frame0: np.ndarray, point0: np.ndarray, x0: float):
    """Integrate the parallel-frame system T' = Re(conj(psi) N), N' = -psi T.

    The frame rows are (T, e1, e2) with N = e1 + i*e2; the torsion rotation
    of the Frenet frame is absorbed in the phase of psi, so vanishing
    curvature is harmless here.
    """
    grid = psi.grid
    j0 = _check_inputs(frame0, x0, grid)

    def axes_builder(sl, _reversed):
        return _koiso_axes(psi.values[sl])

    mats = _transport_bidirectional(grid, j0, np.asarray(frame0, dtype=float), axes_builder)
    pts = _curve_from_tangent(grid, j0, np.asarray(point0, dtype=float), mats[:, 0])
    return SampledCurve(grid, pts), FrameField.from_matrices(grid, mats)


def extract_curvature_torsion(curve: SampledCurve, degeneracy_tol: float = 1e-12) -> CurvatureTorsion:
    """Recover (c, tau) from a sampled curve by centered differences.

    c = |chi''| and tau = det(chi', chi'', chi''') / |chi' x chi''|^2, each
    second-order accurate.  Nodes whose stencils touch the grid ends or the
    corner exclusion zone are flagged invalid; nodes with c below
    `degeneracy_tol` report tau = 0 with the degeneracy flag set.
    """
    pts = curve.points
    dx = curve.grid.dx
    n = curve.grid.n_points
    d1 = np.zeros_like(pts)
    d2 = np.zeros_like(pts)
    d3 = np.zeros_like(pts)
    d1[1:-1] = (pts[2:] - pts[:-2]) / (2 * dx)
    d2[1:-1] = (pts[2:] - 2 * pts[1:-1] + pts[:-2]) / dx**2
    d3[2:-2] = (pts[4:] - 2 * pts[3:-1] + 2 * pts[1:-3] - pts[:-4]) / (2 * dx**3)

    valid = np.ones(n, dtype=bool)
    valid[:2] = valid[-2:] = False
    if curve.corner_index is not None:
        lo = max(0, curve.corner_index - 3)
        hi = min(n, curve.corner_index + 4)
        valid[lo:hi] = False

    c = np.linalg.norm(d2, axis=1)
    cross = np.cross(d1, d2)
    denom = np.sum(cross**2, axis=1)
    degenerate = (c < degeneracy_tol) | ~valid
    safe = np.where(degenerate, 1.0, denom)
    tau = np.where(degenerate, 0.0, np.einsum("ij,ij->i", cross, d3) / np.where(safe == 0, 1.0, safe))
    c = np.where(valid, c, 0.0)
    return CurvatureTorsion(curve.grid, c, tau, tau_degenerate=degenerate, valid=valid)


def rotate_curve(curve: SampledCurve, R: np.ndarray, shift: np.ndarray = None) -> SampledCurve:
    pts = curve.points @ np.asarray(R, dtype=float).T
    if shift is not None:
        pts = pts + np.asarray(shift, dtype=float)
    return SampledCurve(curve.grid, pts, corner_index=curve.corner_index)


def export_curve_csv(path, curve: SampledCurve, frame: Optional[FrameField] = None) -> None:
    """Write `x,chi_x,chi_y,chi_z,T_x,T_y,T_z` with round-trip decimals."""
    x = curve.grid.nodes()
    if frame is not None:
        require_same_grid(curve.grid, frame.grid)
        T = frame.T
    else:
        T = np.gradient(curve.points, curve.grid.dx, axis=0)
    buf = io.StringIO()
    buf.write("x,chi_x,chi_y,chi_z,T_x,T_y,T_z\n")
    for j in range(curve.grid.n_points):
        row = [x[j], *curve.points[j], *T[j]]
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def import_curve_csv(path, periodic: bool = False, corner_index: Optional[int] = None):
    """Read a curve CSV written by export_curve_csv; returns (curve, T)."""
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    x = data[:, 0]
    dx = x[1] - x[0]
    if np.max(np.abs(np.diff(x) - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise ValueError("curve CSV is not on a uniform grid")
    x_max = x[-1] + dx if periodic else x[-1]
    grid = Grid1D(float(x[0]), float(x_max), len(x), periodic=periodic)
    return SampledCurve(grid, data[:, 1:4], corner_index=corner_index), data[:, 4:7]
