"""Spatio-temporal grid and field containers.

Conventions used throughout the package:

* fields are real arrays of shape ``(n_x, n_t)`` (space first, time second);
* periodic spatial grids exclude the right endpoint, so ``dx = L / n_x``;
* the time axis always includes both endpoints, so ``dt = T / (n_t - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_x: int
    t_min: float
    t_max: float
    n_t: int
    periodic: bool = True

    def __post_init__(self):
        if self.n_x < 8 or self.n_t < 8:
            raise DataError(f"grid too small: n_x={self.n_x}, n_t={self.n_t} (need >= 8)")
        if not (self.x_max > self.x_min):
            raise DataError(f"x_max must exceed x_min (got [{self.x_min}, {self.x_max}])")
        if not (self.t_max > self.t_min):
            raise DataError(f"t_max must exceed t_min (got [{self.t_min}, {self.t_max}])")

    @property
    def dx(self) -> float:
        # periodic grids exclude the right endpoint
        if self.periodic:
            return (self.x_max - self.x_min) / self.n_x
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_t - 1)

    @property
    def x(self) -> np.ndarray:
        if self.periodic:
            return self.x_min + self.dx * np.arange(self.n_x)
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)


@dataclass(frozen=True)
class Field:
    """A real-valued scalar field sampled on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n_x, self.grid.n_t):
            raise DataError(
                f"field shape {vals.shape} does not match grid "
                f"({self.grid.n_x}, {self.grid.n_t})"
            )
        if not np.all(np.isfinite(vals)):
            raise DataError("field contains non-finite entries")

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    def transpose(self) -> "Field":
        """Swap the roles of space and time (used for axis-duality checks)."""
        g = self.grid
        swapped = replace(
            g,
            x_min=g.t_min,
            x_max=g.t_max,
            n_x=g.n_t,
            t_min=g.x_min,
            t_max=g.x_max,
            n_t=g.n_x,
            periodic=False,
        )
        return Field(swapped, self.values.T.copy())
