import cmath
import math

import numpy as np

from domain.config import QuadratureConfig
from domain.errors import DomainError
from domain.infrastructure.quadrature import (
    clip_angle, integrate_gamma_weighted, ray_integral)
from domain.infrastructure.special import finite, log_gamma
from domain.process import BesselSpec, IndexSign
from domain.query import TransformQuery


def _saddle(alpha, beta, p):
    """Stationary point of x^(alpha-1) e^-x (1 + 2 beta x)^-p."""
    roots = np.roots([2 * beta, 1 + 2 * beta * (p - alpha + 1), -(alpha - 1)])
    return complex(max(roots, key=lambda root: root.real))


def log_gamma_expectation(alpha, beta, p, cfg=QuadratureConfig()):
    """log E[(1 + 2 beta gamma_alpha)^-p], analytic in (alpha, p)."""
    alpha, p = complex(alpha), complex(p)
    if not alpha.real > 0:
        raise DomainError(f"gamma parameter needs re(alpha) > 0, got {alpha}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if p == 0:
        return 0j

    theta, pivot = 0.0, 1.0
    center = _saddle(alpha, beta, p)
    if center.real > 0:
        pivot = abs(center)
        if alpha.imag or p.imag:
            theta = clip_angle(cmath.phase(center))
    anchor = pivot * cmath.exp(1j * theta)
    shift = (-p * cmath.log(1 + 2 * beta * anchor)).real

    def weight(x):
        return cmath.exp(-p * cmath.log(1 + 2 * beta * x) - shift)

    value = ray_integral(weight, alpha, theta, cfg, pivot=pivot)
    return 1j * theta * alpha + shift + cmath.log(value) - log_gamma(alpha)


def gamma_expectation(alpha, beta, p, cfg=QuadratureConfig()):
    """E[(1 + 2 beta gamma_alpha)^-p] with gamma_alpha ~ Gamma(alpha, 1)."""
    value = cmath.exp(log_gamma_expectation(alpha, beta, p, cfg))
    return finite(value, "gamma expectation")


def _exponent(s):
    return TransformQuery(s).s


def _log_mellin_neg(nu, bnd, s, cfg):
    if s == 0:
        return 0j
    if not (nu + s).real > 0:
        raise DomainError(f"negative-index transform needs re(nu + s) > 0, "
                          f"got nu={nu}, s={s}")
    return (-s * math.log(bnd.c)
            + log_gamma_expectation(nu + s, bnd.b, s, cfg)
            - log_gamma_expectation(nu + s, bnd.c, s, cfg))


def _log_mellin_pos(nu, bnd, s, cfg):
    query = TransformQuery(s)
    if query.is_zero:
        return 0j
    if not s.real > 0:
        raise DomainError(f"positive-index transform needs re(s) > 0, got {s}")
    return (-s * math.log(bnd.c)
            + log_gamma_expectation(s, bnd.b, s - nu, cfg)
            - log_gamma_expectation(s, bnd.c, s - nu, cfg))


def mellin_neg_index(nu, bnd, s, cfg=QuadratureConfig()):
    """E[(b + sigma)^-s] for the Bessel process of index -nu from 1."""
    s = _exponent(s)
    return finite(cmath.exp(_log_mellin_neg(nu, bnd, s, cfg)), "transform")


def mellin_pos_index(nu, bnd, s, cfg=QuadratureConfig()):
    """E[(b + sigma)^-s] for the Bessel process of index +nu from 1."""
    s = _exponent(s)
    return finite(cmath.exp(_log_mellin_pos(nu, bnd, s, cfg)), "transform")


def mellin(spec: BesselSpec, bnd, s, cfg=QuadratureConfig()):
    if spec.sign == IndexSign.Negative:
        return mellin_neg_index(spec.nu, bnd, s, cfg)
    return mellin_pos_index(spec.nu, bnd, s, cfg)


def real_mellin(spec, bnd, s, cfg=QuadratureConfig()):
    if not s >= 0:
        raise DomainError(f"closed form holds for real s >= 0, got {s}")
    return mellin(spec, bnd, s, cfg).real


def duality_residual(nu, bnd, s, cfg=QuadratureConfig()):
    """|E^(nu)[(b+sigma)^-s] - c^-nu E^(-nu)[(b+sigma)^-(s-nu)]|."""
    if not s >= nu:
        raise DomainError(f"duality check needs s >= nu, got s={s}, nu={nu}")
    positive = mellin_pos_index(nu, bnd, s, cfg)
    negative = mellin_neg_index(nu, bnd, s - nu, cfg)
    return abs(positive - bnd.c ** -nu * negative)


def mellin_via_perpetuity(nu, bnd, s, cfg=QuadratureConfig()):
    """c^-s E[(b + Z)^-s] / E[(c + Z)^-s] with Z = 1 / (2 gamma_nu).

    Integrates against the Dufresne law directly, real s >= 0 only.
    """
    if not s >= 0:
        raise DomainError(f"perpetuity form holds for real s >= 0, got {s}")

    def moment(level):
        return integrate_gamma_weighted(
            lambda x: (level + 1 / (2 * x)) ** -s, nu, cfg).real

    return bnd.c ** -s * moment(bnd.b) / moment(bnd.c)
