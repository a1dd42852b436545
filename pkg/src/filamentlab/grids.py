"""Uniform 1D grids and complex-valued grid fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform arclength/space grid on [x_min, x_max].

    Non-periodic ("line") grids include both endpoints, spacing
    (x_max - x_min)/(n_points - 1).  Periodic grids exclude x_max,
    spacing (x_max - x_min)/n_points.
    """

    x_min: float
    x_max: float
    n_points: int
    periodic: bool = False

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError(f"n_points must be >= 8, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        span = self.x_max - self.x_min
        return span / self.n_points if self.periodic else span / (self.n_points - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def nodes(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Index of the node at x; raises if x is not a grid node."""
        j = int(round((x - self.x_min) / self.dx))
        if not 0 <= j < self.n_points or abs(self.x_min + j * self.dx - x) > tol * max(1.0, abs(x)):
            raise ValueError(f"{x} is not a node of {self}")
        return j

    def frequencies(self) -> np.ndarray:
        """Angular frequencies xi_k = 2*pi*k/L of the periodic transform."""
        if not self.periodic:
            raise ValueError("frequencies are defined for periodic grids only")
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @staticmethod
    def periodic_centered(length: float, n_points: int) -> "Grid1D":
        """Periodic grid on [-L/2, L/2)."""
        return Grid1D(-0.5 * length, 0.5 * length, n_points, periodic=True)

    @staticmethod
    def symmetric(half_width: float, spacing: float) -> "Grid1D":
        """Line grid on [-X, X] with node spacing <= `spacing` and a node at 0."""
        half = int(np.ceil(half_width / spacing))
        return Grid1D(-half * spacing, half * spacing, 2 * half + 1, periodic=False)


@dataclass(frozen=True)
class ComplexField:
    """Complex function of x sampled on a Grid1D (one time slice)."""

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(f"values shape {vals.shape} does not match grid ({self.grid.n_points},)")
        if not np.all(np.isfinite(vals.view(float))):
            raise ValueError("field contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.dx * np.sum(np.abs(self.values) ** 2)))

    def map(self, fn) -> "ComplexField":
        return ComplexField(self.grid, fn(self.values))


def require_same_grid(a: Grid1D, b: Grid1D) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")
