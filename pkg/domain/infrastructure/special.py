"""Gamma-family special functions on the right half-plane."""
import cmath
import math

import numpy as np
from scipy import special

from domain.errors import DomainError, NonFiniteValueError

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2 * math.pi)


def finite(value, what="value"):
    """Return value as a complex number, raising if it is NaN or infinite."""
    value = complex(value)
    if not (cmath.isfinite(value)):
        raise NonFiniteValueError(f"{what} is not finite: {value}")
    return value


def log_gamma(z):
    """Principal log Gamma(z) for re(z) > 0 (Lanczos, g = 7, 9 terms)."""
    z = complex(z)
    if not z.real > 0:
        raise DomainError(f"log_gamma requires re(z) > 0, got {z}")
    shift = 0
    while z.real < 0.5:
        # log Gamma(z) = log Gamma(z + 1) - log z
        shift += cmath.log(z)
        z += 1
    z -= 1
    series = LANCZOS_COEFFICIENTS[0]
    for k, coefficient in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        series += coefficient / (z + k)
    t = z + LANCZOS_G + 0.5
    value = HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t \
        + cmath.log(series) - shift
    return finite(value, "log_gamma")


def regularized_incomplete_gamma_lower(a, x):
    """P(a, x) = gamma(a, x) / Gamma(a)."""
    _check_incomplete_arguments(a, x)
    return _scalar_or_array(special.gammainc(a, x))


def regularized_incomplete_gamma_upper(a, x):
    """Q(a, x) = 1 - P(a, x), evaluated on its own continued-fraction path."""
    _check_incomplete_arguments(a, x)
    return _scalar_or_array(special.gammaincc(a, x))


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else np.asarray(value)


def _check_incomplete_arguments(a, x):
    if not a > 0:
        raise DomainError(f"incomplete gamma requires a > 0, got {a}")
    if np.any(np.asarray(x) < 0):
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}")


def kummer_m(a, b, z, max_terms=20000):
    """Kummer M(a, b, z) by its power series; complex a and b, real z."""
    a, b, z = complex(a), complex(b), float(z)
    term = 1 + 0j
    total = 1 + 0j
    for n in range(max_terms):
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
        if abs(term) < 1e-17 * abs(total) and n > abs(a) + abs(z):
            return finite(total, "kummer_m")
    raise NonFiniteValueError(
        f"Kummer series did not converge for a={a}, b={b}, z={z}")


def reciprocal_gamma(z):
    """1 / Gamma(z), entire, complex arguments."""
    return complex(special.rgamma(complex(z)))


def gamma(z):
    return finite(special.gamma(complex(z)), "gamma")
