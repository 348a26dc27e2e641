"""Density and CDF of Y = b + sigma from its Mellin transform M(s) = E[Y^-s].

With s = a + it on a vertical line (a > 0),

    f(y) = (1/2pi) int M(a+it) y^(a+it-1) dt,
    F(y) = (1/2pi) int M(a+it) y^(a+it) / (a+it) dt,

and M(a-it) = conj M(a+it), so only t >= 0 is evaluated. The contour
values do not depend on y and are computed once per (spec, boundary, config).
"""
import copy
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from application.transforms import mellin
from domain.config import InversionConfig, QuadratureConfig
from domain.curve import CdfTable, DensityCurve
from domain.errors import DomainError, NormalizationError, TruncationError

logger = logging.getLogger(__name__)

RINGING_LIMIT = 1e-6
IMAGINARY_LIMIT = 1e-6


class Contour:
    def __init__(self, spec, bnd, cfg=InversionConfig(),
                 qcfg=QuadratureConfig()):
        self.spec = spec
        self.bnd = bnd
        self.cfg = cfg
        self.t = cfg.step * np.arange(cfg.nodes + 1)
        self.s = cfg.abscissa + 1j * self.t
        self.weights = np.full(self.t.shape, cfg.step)
        self.weights[0] = self.weights[-1] = cfg.step / 2
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            values = list(pool.map(
                lambda s: mellin(spec, bnd, s, qcfg), self.s))
        self.values = np.array(values, dtype=complex)
        if cfg.orientation < 0:
            self.values = np.conj(self.values)
        self.imaginary_residue = self._reflection_residue(qcfg)

    def _reflection_residue(self, qcfg):
        # M(conj s) = conj M(s); a few mirrored nodes bound the imaginary
        # part the full-line sum would carry
        checked = sorted({1, len(self.t) // 2, len(self.t) - 1})
        residue = 0.0
        for k in checked:
            mirrored = mellin(self.spec, self.bnd, np.conj(self.s[k]), qcfg)
            if self.cfg.orientation < 0:
                mirrored = np.conj(mirrored)
            residue = max(residue, abs(mirrored - np.conj(self.values[k])))
        return residue * self.cfg.half_height / math.pi

    def mirrored(self):
        """The same contour with conjugated values and flipped orientation."""
        other = copy.copy(self)
        other.cfg = self.cfg.flipped()
        other.values = np.conj(self.values)
        return other

    def tail_bound(self, y):
        """|M(a+iH)| y^(a-1) / pi, the truncation indicator at y."""
        return abs(self.values[-1]) * np.asarray(y) ** (
            self.cfg.abscissa - 1) / math.pi

    def _sum(self, y, factor):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        phase = np.exp(np.outer(np.log(y), self.s))
        terms = phase * (self.weights * self.values * factor)[None, :]
        return terms.sum(axis=1).real / math.pi

    def density(self, y):
        return self._sum(y, 1.0) / np.atleast_1d(y)

    def cdf(self, y):
        return self._sum(y, 1.0 / self.s)


@lru_cache(maxsize=16)
def contour(spec, bnd, cfg=InversionConfig(), qcfg=QuadratureConfig()):
    if cfg.orientation < 0:
        return contour(spec, bnd, cfg.flipped(), qcfg).mirrored()
    return Contour(spec, bnd, cfg, qcfg)


def _check_points(bnd, y):
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y <= bnd.b):
        raise DomainError(f"density is evaluated above b={bnd.b}")
    return y


def density_at(spec, bnd, y, cfg=InversionConfig(), qcfg=QuadratureConfig()):
    """Density of b + sigma at y > b."""
    if bnd.degenerate:
        raise DomainError("b = c puts all mass at y = b; use cdf_at")
    y = _check_points(bnd, y)
    path = contour(spec, bnd, cfg, qcfg)
    bound = float(np.max(path.tail_bound(y)))
    if bound > cfg.tail_tol:
        raise TruncationError(bound, cfg.tail_tol)
    if path.imaginary_residue > IMAGINARY_LIMIT:
        logger.warning("contour reflection residue %.2e exceeds %.0e",
                       path.imaginary_residue, IMAGINARY_LIMIT)
    values = path.density(y)
    return float(values[0]) if values.size == 1 else values


def _tail_integral(path, grid):
    # |M(a+it)| decays like exp(-k sqrt t); int_H^inf exp(-sqrt t) dt is
    # 2 (sqrt H + 1) exp(-sqrt H)
    height = path.cfg.half_height
    return float(np.max(path.tail_bound(grid))) * 2 * (math.sqrt(height) + 1)


def default_grid(bnd, y_max, points=400, closest=1e-4):
    """Points geometric in y - b between b + closest*(y_max - b) and y_max."""
    if not y_max > bnd.b:
        raise DomainError("grid must end above b")
    span = y_max - bnd.b
    return bnd.b + np.geomspace(closest * span, span, points)


def density_curve(spec, bnd, grid, cfg=InversionConfig(),
                  qcfg=QuadratureConfig()):
    grid = _check_points(bnd, grid)
    raw = density_at(spec, bnd, grid, cfg, qcfg)
    raw = np.atleast_1d(raw)
    path = contour(spec, bnd, cfg, qcfg)
    lowest = float(raw.min())
    if lowest < -RINGING_LIMIT:
        logger.warning("density ringing down to %.2e clipped", lowest)
    left = float(path.cdf(grid[0])[0])
    right = float(path.cdf(grid[-1])[0])
    return DensityCurve(
        grid=grid, values=np.clip(raw, 0.0, None),
        config={**spec.as_dict(), **bnd.as_dict(), **cfg.as_dict()},
        truncation_error=_tail_integral(path, grid),
        left_mass=min(max(left, 0.0), 1.0),
        tail_mass=min(max(1.0 - right, 0.0), 1.0),
        min_raw_value=lowest)


def cdf_from_density(curve: DensityCurve):
    """Cumulative trapezoid of the density, offset by the left mass."""
    mass = curve.total_mass
    if not 0.99 <= mass <= 1.01:
        raise NormalizationError(mass)
    values = curve.left_mass + cumulative_trapezoid(
        curve.values, curve.grid, initial=0.0)
    values = np.clip(np.maximum.accumulate(values), 0.0, 1.0)
    return CdfTable(curve.grid, values)


def quantile(table: CdfTable, q):
    if not 0 < q < 1:
        raise DomainError(f"quantile level must be in (0, 1), got {q}")
    return table.inverse(q)


def mellin_of_curve(curve: DensityCurve, s):
    """int y^-s f(y) dy over the grid, the inverse of the inversion."""
    return float(trapezoid(curve.grid ** -s * curve.values, curve.grid))


def cdf_at(spec, bnd, y, cfg=InversionConfig(), qcfg=QuadratureConfig()):
    """P(b + sigma <= y) inverted directly from the transform."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if bnd.degenerate:
        values = (y >= bnd.b).astype(float)
    else:
        values = np.clip(contour(spec, bnd, cfg, qcfg).cdf(y), 0.0, 1.0)
    return float(values[0]) if values.size == 1 else values
