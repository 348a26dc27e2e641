from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from domain.errors import DomainError


@dataclass
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    config: dict = field(default_factory=dict)
    truncation_error: float = 0.0
    left_mass: float = 0.0
    tail_mass: float = 0.0
    min_raw_value: float = 0.0

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise DomainError("grid and density values differ in length")
        if len(self.grid) < 2 or np.any(np.diff(self.grid) <= 0):
            raise DomainError("density grid must be strictly increasing")

    @property
    def grid_mass(self):
        return float(trapezoid(self.values, self.grid))

    @property
    def total_mass(self):
        return self.left_mass + self.grid_mass + self.tail_mass


@dataclass
class CdfTable:
    grid: np.ndarray
    values: np.ndarray

    def __call__(self, y):
        return np.interp(y, self.grid, self.values,
                         left=0.0, right=self.values[-1])

    def inverse(self, q):
        # flat stretches map to their left end
        keep = np.concatenate(([True], np.diff(self.values) > 0))
        return float(np.interp(q, self.values[keep], self.grid[keep]))
