"""Tricomi U and Whittaker W, the special-function form of the transforms.

E[(1 + 2 beta gamma_alpha)^-p]
    = (2 beta)^-alpha U(alpha, alpha + 1 - p, 1/(2 beta))
follows from t = 2 beta x in the integral representation of U, so both
transforms are ratios of Whittaker functions. U is evaluated two ways:
by that integral (quadrature) and by the Kummer connection formula
(series); the two paths cross-check each other.
"""
import cmath
import logging
import math
import warnings

from domain.config import QuadratureConfig
from domain.errors import DomainError, NearIntegerParameterError
from domain.infrastructure.quadrature import integrate_gamma_weighted
from domain.infrastructure.special import (
    finite, kummer_m, log_gamma, reciprocal_gamma, gamma)

logger = logging.getLogger(__name__)

INTEGER_GAP = 1e-6


def _near_integer(b):
    b = complex(b)
    return abs(b.imag) < INTEGER_GAP \
        and abs(b.real - round(b.real)) < INTEGER_GAP


def tricomi_u_integral(a, b, z, cfg=QuadratureConfig()):
    """U(a, b, z) = z^-a / Gamma(a) int x^(a-1) e^-x (1 + x/z)^(b-a-1) dx."""
    a, b = complex(a), complex(b)
    if not a.real > 0:
        raise DomainError(f"integral representation needs re(a) > 0, got {a}")
    integral = integrate_gamma_weighted(
        lambda x: cmath.exp((b - a - 1) * cmath.log(1 + x / z)), a, cfg,
        check=True)
    return finite(cmath.exp(-a * math.log(z) - log_gamma(a))
                  * integral, "tricomi_u")


def _connection(a, b, z):
    # U = Gamma(1-b)/Gamma(a-b+1) M(a,b,z)
    #     + Gamma(b-1)/Gamma(a) z^(1-b) M(a-b+1, 2-b, z)
    first = gamma(1 - b) * reciprocal_gamma(a - b + 1) * kummer_m(a, b, z)
    second = gamma(b - 1) * reciprocal_gamma(a) \
        * cmath.exp((1 - b) * math.log(z)) * kummer_m(a - b + 1, 2 - b, z)
    return finite(first + second, "tricomi_u")


def tricomi_u_series(a, b, z, perturb=False):
    """U(a, b, z) by the Kummer connection formula.

    The formula is singular at integer b. With perturb the value is the
    average over b +- 1e-6 (error of order 1e-12), otherwise that case
    raises NearIntegerParameterError.
    """
    a, b = complex(a), complex(b)
    if _near_integer(b):
        if not perturb:
            raise NearIntegerParameterError(b)
        warnings.warn(f"Kummer parameter b={b} is near an integer; "
                      "averaging over b +- 1e-6", RuntimeWarning)
        logger.warning("near-integer Kummer parameter b=%s perturbed", b)
        center = complex(round(b.real), 0)
        return 0.5 * (_connection(a, center + INTEGER_GAP, z)
                      + _connection(a, center - INTEGER_GAP, z))
    return _connection(a, b, z)


def tricomi_u(a, b, z, cfg=QuadratureConfig(), method="auto"):
    """Tricomi confluent hypergeometric U(a, b, z) for real z > 0."""
    if not z > 0:
        raise DomainError(f"tricomi_u needs z > 0, got {z}")
    a = complex(a)
    if method == "integral" or (method == "auto" and a.real > 0):
        return tricomi_u_integral(a, b, z, cfg)
    if method in ("series", "auto"):
        return tricomi_u_series(a, b, z)
    raise DomainError(f"unknown tricomi_u method {method!r}")


def gamma_expectation_via_u(alpha, beta, p, cfg=QuadratureConfig()):
    """E[(1 + 2 beta gamma_alpha)^-p] through the series path of U."""
    if not (alpha > 0 and beta > 0):
        raise DomainError("gamma_expectation_via_u needs alpha, beta > 0")
    if p == 0:
        return 1.0
    z = 1 / (2 * beta)
    value = (2 * beta) ** -alpha \
        * tricomi_u_series(alpha, alpha + 1 - p, z, perturb=True)
    return value.real


def whittaker_w(kappa, mu, z, cfg=QuadratureConfig()):
    """Whittaker W_{kappa,mu}(z).

    W = e^(-z/2) z^(mu+1/2) U(mu - kappa + 1/2, 1 + 2 mu, z).
    """
    u = tricomi_u(mu - kappa + 0.5, 1 + 2 * mu, z, cfg)
    return (math.exp(-z / 2) * z ** (mu + 0.5) * u).real
