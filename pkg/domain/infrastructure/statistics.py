import math

import numpy as np
from scipy import stats
from scipy.special import kolmogi

from domain.errors import EmptySampleError
from domain.samples import SampleSet

KOLMOGOROV_TERMS = 100


def _values(sample):
    values = sample.values if isinstance(sample, SampleSet) \
        else np.asarray(sample, dtype=float)
    if values.size == 0:
        raise EmptySampleError(getattr(sample, "label", ""))
    return values


def ks_two_sample(xs, ys):
    """Sup distance between the two empirical CDFs."""
    return float(stats.ks_2samp(_values(xs), _values(ys)).statistic)


def ks_one_sample(xs, cdf):
    """Sup distance between the empirical CDF of xs and cdf."""
    return float(stats.kstest(_values(xs), cdf).statistic)


def kolmogorov_survival(x, terms=KOLMOGOROV_TERMS):
    """P(K > x) for the limiting Kolmogorov distribution."""
    if x <= 0:
        return 1.0
    total = sum((-1) ** (j - 1) * math.exp(-2 * j * j * x * x)
                for j in range(1, terms + 1))
    return min(max(2 * total, 0.0), 1.0)


def ks_critical_value(n, m=None, level=0.99):
    """Asymptotic critical value of the one- (m is None) or two-sample KS."""
    effective = n if m is None else n * m / (n + m)
    return float(kolmogi(1 - level)) / math.sqrt(effective)


def ks_p_value(statistic, n, m=None):
    effective = n if m is None else n * m / (n + m)
    return kolmogorov_survival(math.sqrt(effective) * statistic)


def mean_and_error(values):
    values = _values(values)
    if values.size < 2:
        return float(values.mean()), float("inf")
    error = values.std(ddof=1) / math.sqrt(values.size)
    return float(values.mean()), float(error)
