"""Gamma-weighted integrals int_0^inf f(x) x^(alpha-1) e^(-x) dx.

The integral is taken along the ray x = r e^(i theta), |theta| < pi/2.
For an integrand analytic in the right half-plane this equals the
real-axis integral; for complex alpha a ray through the saddle point
keeps the integrand from cancelling down to the (much smaller) result.
theta = 0 is the plain real-axis scheme.
"""
import cmath
import logging
import math
import warnings
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import roots_genlaguerre

from domain.config import QuadratureConfig
from domain.errors import (
    DomainError, NonFiniteValueError, ToleranceNotMetError)
from domain.infrastructure.special import finite

logger = logging.getLogger(__name__)

MAX_ANGLE = math.pi / 2 - 0.15
CUTOFF_FACTOR = 1e-3
MAX_CUTOFF = 1e7
# exp(-LEFT_LIMIT) is still a normal double
LEFT_LIMIT = 700.0
LEFT_ENDS = (10.0, 20.0, 40.0, 80.0, 160.0, 320.0, LEFT_LIMIT)
SETTLE_POINT = 40.0
SETTLE_TOL = 1e-12
# roundoff-limited quad calls overshoot their own target slightly
ERROR_SLACK = 10.0
LAGUERRE_MISMATCH = 1e-6


def clip_angle(theta):
    return max(-MAX_ANGLE, min(MAX_ANGLE, theta))


def steering_angle(alpha):
    """Ray angle through the saddle of x^(alpha-1) e^-x."""
    alpha = complex(alpha)
    if alpha.imag == 0:
        return 0.0
    return clip_angle(math.atan2(alpha.imag, max(alpha.real - 1, 1.0)))


def integrate_gamma_weighted(f, alpha, cfg=QuadratureConfig(), angle=None,
                             check=False):
    """int_0^inf f(x) x^(alpha-1) e^(-x) dx for re(alpha) > 0.

    f is evaluated on the integration ray, so for complex alpha (or a
    nonzero angle) it must accept complex arguments and be analytic in
    the right half-plane. With check, a real-axis result is compared
    with a fixed-order generalized Laguerre rule and a disagreement is
    logged as a warning.
    """
    alpha = complex(alpha)
    if not alpha.real > 0:
        raise DomainError(f"gamma weight requires re(alpha) > 0, got {alpha}")
    theta = steering_angle(alpha) if angle is None else clip_angle(angle)
    value = ray_integral(f, alpha, theta, cfg)
    if check and theta == 0 and alpha.imag == 0:
        laguerre_mismatch(f, alpha.real, value, cfg)
    return finite(cmath.exp(1j * theta * alpha) * value, "gamma integral")


def ray_integral(g, alpha, theta, cfg, pivot=1.0):
    """J = int_0^inf g(r e^(i theta)) r^(alpha-1) exp(-r e^(i theta)) dr.

    The real-axis gamma-weighted integral of g is exp(i theta alpha) * J.
    pivot is a radius near the bulk of the integrand.
    """
    alpha = complex(alpha)
    rotation = cmath.exp(1j * theta)

    def right(r):
        x = r * rotation
        return complex(g(x)) * cmath.exp((alpha - 1) * math.log(r) - x)

    def left(v):
        # r = e^-v; the r^(alpha-1) dr factor becomes e^(-v alpha) dv
        x = math.exp(-v) * rotation
        return complex(g(x)) * cmath.exp(-x)

    try:
        value, error, requested = _pieces(right, left, alpha, cfg, pivot)
    except (OverflowError, ZeroDivisionError) as failure:
        raise NonFiniteValueError(
            f"gamma-weighted integrand is not finite at alpha={alpha}: "
            f"{failure}") from failure
    if not error <= ERROR_SLACK * requested:
        raise ToleranceNotMetError(
            cmath.exp(1j * theta * alpha) * value, error, requested)
    return value


def _pieces(right, left, alpha, cfg, pivot):
    cutoff, right_scale = _cutoff(right, max(pivot, 1.0), cfg)

    # left(v) tends to g(0) as v grows; that constant integrates to g(0)/alpha
    settled = _settled_limit(left)
    if settled is None:
        head, remainder = 0j, left
    else:
        head = settled / alpha

        def remainder(v):
            return left(v) - settled

    def size(v):
        return math.exp(-v * alpha.real) * abs(remainder(v))

    left_scale = max(size(v) for v in (0.0, 0.5, 1.0, 2.0, 4.0))
    scale = max(right_scale, left_scale, 1e-300)
    epsabs = cfg.abs_tol * CUTOFF_FACTOR * scale
    end = next((v for v in LEFT_ENDS if size(v) <= epsabs), LEFT_LIMIT)

    left_value, left_error, left_allowed = _oscillatory_tail(
        remainder, alpha, end, cfg, epsabs)
    breakpoints = [pivot] if 1.0 < pivot < cutoff else None
    right_value, right_error, right_allowed = _complex_quad(
        right, 1.0, cutoff, cfg, epsabs, points=breakpoints)

    value = head + left_value + right_value
    requested = max(cfg.abs_tol * scale, cfg.rel_tol * abs(value),
                    left_allowed + right_allowed)
    return value, left_error + right_error, requested


def _settled_limit(left):
    near, far = left(SETTLE_POINT), left(LEFT_LIMIT)
    if abs(near - far) <= SETTLE_TOL * abs(far):
        return far
    return None


def _cutoff(integrand, pivot, cfg):
    radii = np.geomspace(1.0, 4 * pivot + 40, 48)
    scale = max(max(abs(integrand(r)) for r in radii), 1e-300)
    cutoff = 4 * pivot + 40
    while abs(integrand(cutoff)) > cfg.abs_tol * CUTOFF_FACTOR * scale:
        cutoff *= 1.5
        if cutoff > MAX_CUTOFF:
            break
    return cutoff, scale


def _quad(func, lo, hi, cfg, epsabs, **kwargs):
    """quad result, its error estimate and the error it was asked for."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, error = quad(func, lo, hi, epsabs=epsabs, epsrel=cfg.rel_tol,
                            limit=cfg.max_subdivisions, **kwargs)
    return value, error, max(epsabs, cfg.rel_tol * abs(value))


def _complex_quad(func, lo, hi, cfg, epsabs, **kwargs):
    re, re_err, re_allowed = _quad(
        lambda u: func(u).real, lo, hi, cfg, epsabs, **kwargs)
    im, im_err, im_allowed = _quad(
        lambda u: func(u).imag, lo, hi, cfg, epsabs, **kwargs)
    return complex(re, im), re_err + im_err, re_allowed + im_allowed


def _oscillatory_tail(q, alpha, end, cfg, epsabs):
    """int_0^end e^(-v alpha) q(v) dv."""
    a, t = alpha.real, alpha.imag

    def damped(v):
        return math.exp(-v * a) * q(v)

    if t == 0:
        points = [v for v in (1.0, 10.0) if v < end]
        return _complex_quad(damped, 0.0, end, cfg, epsabs, points=points)

    # e^(-ivt) = cos(v|t|) - i sign(t) sin(v|t|)
    omega = abs(t)
    direction = math.copysign(1.0, t)
    parts = {}
    for weight in ("cos", "sin"):
        for component in ("real", "imag"):
            parts[weight, component] = _quad(
                lambda v: getattr(damped(v), component), 0.0, end, cfg,
                epsabs, weight=weight, wvar=omega)

    cos_re, cos_im = parts["cos", "real"][0], parts["cos", "imag"][0]
    sin_re, sin_im = parts["sin", "real"][0], parts["sin", "imag"][0]
    value = complex(cos_re + direction * sin_im,
                    cos_im - direction * sin_re)
    error = sum(part[1] for part in parts.values())
    allowed = sum(part[2] for part in parts.values())
    return value, error, allowed


@lru_cache(maxsize=64)
def _laguerre_rule(order, exponent):
    return roots_genlaguerre(order, exponent)


def laguerre_mismatch(f, alpha, value, cfg=QuadratureConfig()):
    """Relative gap between value and the generalized Laguerre estimate."""
    nodes, weights = _laguerre_rule(cfg.laguerre_order, round(alpha - 1, 12))
    estimate = sum(w * complex(f(x)) for x, w in zip(nodes, weights))
    mismatch = abs(estimate - value) / max(abs(value), 1e-300)
    if mismatch > LAGUERRE_MISMATCH:
        logger.warning("Gauss-Laguerre rule disagrees with adaptive result "
                       "by %.2e (alpha=%g)", mismatch, alpha)
    return mismatch
