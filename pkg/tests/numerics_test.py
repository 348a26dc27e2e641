import unittest
import cmath
import math

import numpy as np
from scipy import special

from domain.config import QuadratureConfig
from domain.errors import DomainError, EmptySampleError, NonFiniteValueError
from domain.infrastructure.quadrature import (
    integrate_gamma_weighted, laguerre_mismatch)
from domain.infrastructure.special import (
    log_gamma, kummer_m,
    regularized_incomplete_gamma_lower, regularized_incomplete_gamma_upper)
from domain.infrastructure.statistics import (
    ks_one_sample, ks_two_sample, ks_critical_value, ks_p_value,
    kolmogorov_survival, mean_and_error)
from domain.infrastructure.streams import Stream, substream
from domain.samples import SampleSet


class SpecialFunctionTests(unittest.TestCase):
    def test_log_gamma_at_one_and_one_half(self):
        self.assertAlmostEqual(0.0, abs(log_gamma(1)), places=13)
        self.assertAlmostEqual(0.5723649429247001, log_gamma(0.5).real,
                               places=12)

    def test_log_gamma_matches_factorials_on_real_axis(self):
        for n in (2, 5, 10, 30, 100):
            expected = math.lgamma(n)
            self.assertLess(abs(log_gamma(n).real - expected),
                            1e-13 * max(1.0, expected))

    def test_log_gamma_exponential_matches_scipy_for_complex_arguments(self):
        for z in (3 + 4j, 0.7 - 2j, 12 + 30j):
            expected = complex(special.gamma(z))
            actual = cmath.exp(log_gamma(z))
            self.assertLess(abs(actual - expected) / abs(expected), 1e-11)

    def test_log_gamma_recurrence_on_complex_grid(self):
        rng = np.random.default_rng(0)
        points = zip(rng.uniform(0.5, 20, 100), rng.uniform(-50, 50, 100))
        for re, im in points:
            z = complex(re, im)
            step = log_gamma(z + 1) - log_gamma(z) - cmath.log(z)
            # equal up to a multiple of 2 pi i
            step -= 2j * math.pi * round(step.imag / (2 * math.pi))
            self.assertLess(abs(step), 1e-12 * max(1.0, abs(log_gamma(z))))

    def test_log_gamma_rejects_left_half_plane(self):
        with self.assertRaises(DomainError):
            log_gamma(-0.5)
        with self.assertRaises(DomainError):
            log_gamma(0)

    def test_incomplete_gamma_known_values(self):
        self.assertAlmostEqual(1 - math.exp(-1),
                               regularized_incomplete_gamma_lower(1, 1),
                               places=12)
        self.assertEqual(0.0, regularized_incomplete_gamma_lower(2.5, 0))
        self.assertAlmostEqual(0.9544997361036416,
                               regularized_incomplete_gamma_lower(0.5, 2),
                               places=12)

    def test_incomplete_gamma_halves_sum_to_one(self):
        for a in (0.1, 0.5, 1.0, 3.3, 20.0):
            for x in (0.01, 0.5, 2.0, 15.0):
                total = regularized_incomplete_gamma_lower(a, x) \
                    + regularized_incomplete_gamma_upper(a, x)
                self.assertAlmostEqual(1.0, total, places=12)

    def test_incomplete_gamma_accepts_arrays(self):
        values = regularized_incomplete_gamma_upper(1.0, np.array([0.0, 1.0]))
        np.testing.assert_allclose([1.0, math.exp(-1)], values, rtol=1e-14)

    def test_incomplete_gamma_rejects_bad_arguments(self):
        with self.assertRaises(DomainError):
            regularized_incomplete_gamma_lower(0, 1)
        with self.assertRaises(DomainError):
            regularized_incomplete_gamma_upper(1, -1)

    def test_kummer_m_with_equal_parameters_is_exponential(self):
        for z in (0.3, 2.0, 7.5):
            self.assertAlmostEqual(math.exp(z), kummer_m(1.7, 1.7, z).real,
                                   delta=1e-13 * math.exp(z))


class QuadratureTests(unittest.TestCase):
    def test_constant_integrand_gives_gamma_function(self):
        for alpha in (0.1, 0.5, 2.5, 30.0):
            value = integrate_gamma_weighted(lambda x: 1.0, alpha)
            self.assertLess(abs(value - math.gamma(alpha)),
                            1e-9 * math.gamma(alpha))

    def test_constant_integrand_with_complex_alpha(self):
        for alpha in (1.5 + 2j, 0.8 - 3j, 2 + 10j):
            value = integrate_gamma_weighted(lambda x: 1.0, alpha)
            expected = cmath.exp(log_gamma(alpha))
            self.assertLess(abs(value - expected) / abs(expected), 1e-9)

    def test_first_moment_of_gamma_two(self):
        value = integrate_gamma_weighted(lambda x: x, 2.0)
        self.assertAlmostEqual(2.0, value.real, places=9)

    def test_rational_integrand_against_exponential_integral(self):
        # int e^-x / (1 + 2x) dx = e^(1/2) E1(1/2) / 2
        expected = 0.5 * math.exp(0.5) * special.exp1(0.5)
        value = integrate_gamma_weighted(lambda x: 1 / (1 + 2 * x), 1.0)
        self.assertAlmostEqual(expected, value.real, places=9)

    def test_loose_tolerance_still_accurate(self):
        cfg = QuadratureConfig().with_tolerance(1e-6)
        value = integrate_gamma_weighted(lambda x: 1.0, 3.0, cfg)
        self.assertAlmostEqual(2.0, value.real, places=5)

    def test_non_positive_alpha_is_rejected(self):
        with self.assertRaises(DomainError):
            integrate_gamma_weighted(lambda x: 1.0, -0.5)

    def test_integrand_singular_at_zero(self):
        # int x^-1/2 e^-x dx = Gamma(1/2)
        value = integrate_gamma_weighted(lambda x: x ** -0.5, 1.0)
        self.assertAlmostEqual(math.sqrt(math.pi), value.real, places=9)

    def test_small_alpha_keeps_the_pole_term(self):
        for alpha in (1e-6, 1e-3, 0.05 + 0.5j):
            value = integrate_gamma_weighted(lambda x: 1.0, alpha)
            expected = cmath.exp(log_gamma(alpha))
            self.assertLess(abs(value - expected) / abs(expected), 1e-9)

    def test_overflowing_integrand_is_reported(self):
        with self.assertRaises(NonFiniteValueError):
            integrate_gamma_weighted(lambda x: math.exp(800.0), 1.0)

    def test_laguerre_check_is_quiet_when_rules_agree(self):
        def f(x):
            return 1 / (1 + 2 * x)

        value = integrate_gamma_weighted(f, 1.5, check=True)
        self.assertLess(laguerre_mismatch(f, 1.5, value), 1e-6)

    def test_laguerre_disagreement_is_logged(self):
        logger = "domain.infrastructure.quadrature"
        with self.assertLogs(logger, level="WARNING"):
            mismatch = laguerre_mismatch(lambda x: 1.0, 2.0, 1.1)
        self.assertAlmostEqual(0.1 / 1.1, mismatch, places=9)


class StatisticsTests(unittest.TestCase):
    def test_identical_samples_have_zero_distance(self):
        xs = SampleSet.of([0.1, 0.4, 2.0])
        self.assertEqual(0.0, ks_two_sample(xs, xs))

    def test_disjoint_supports_have_unit_distance(self):
        self.assertEqual(1.0, ks_two_sample([0.0], [1.0]))

    def test_single_sample_at_median(self):
        self.assertAlmostEqual(0.5, ks_one_sample([0.5], lambda x: x))

    def test_quantile_grid_is_within_one_over_n(self):
        n = 200
        xs = (np.arange(n) + 0.5) / n
        self.assertLessEqual(ks_one_sample(xs, lambda x: x), 1 / n)

    def test_seeded_uniform_draws_pass_at_99_percent(self):
        rng = np.random.default_rng(3)
        xs = rng.random(10_000)
        ys = rng.random(10_000)
        self.assertLess(ks_one_sample(xs, lambda x: np.clip(x, 0, 1)),
                        ks_critical_value(10_000))
        self.assertLess(ks_two_sample(xs, ys),
                        ks_critical_value(10_000, 10_000))

    def test_statistic_invariant_under_increasing_map(self):
        rng = np.random.default_rng(5)
        xs, ys = rng.random(300), rng.random(400) ** 2
        self.assertAlmostEqual(ks_two_sample(xs, ys),
                               ks_two_sample(np.exp(3 * xs), np.exp(3 * ys)))

    def test_empty_sample_is_rejected(self):
        with self.assertRaises(EmptySampleError):
            ks_two_sample([], [1.0])
        with self.assertRaises(EmptySampleError):
            ks_one_sample(SampleSet.of([], "sigma"), lambda x: x)

    def test_critical_value_matches_kolmogorov_quantile(self):
        self.assertAlmostEqual(1.6276236 / 100, ks_critical_value(10_000),
                               places=6)
        self.assertAlmostEqual(0.01, kolmogorov_survival(1.6276236),
                               places=6)
        self.assertAlmostEqual(0.01, ks_p_value(1.6276236 / 100, 10_000),
                               places=6)

    def test_mean_and_error(self):
        mean, error = mean_and_error([1.0, 2.0, 3.0])
        self.assertEqual(2.0, mean)
        self.assertAlmostEqual(1 / math.sqrt(3), error)


class StreamTests(unittest.TestCase):
    def test_same_keys_reproduce_draws(self):
        first = substream(42, 0, Stream.Hitting, 3).random(5)
        second = substream(42, 0, Stream.Hitting, 3).random(5)
        np.testing.assert_array_equal(first, second)

    def test_different_keys_give_different_draws(self):
        base = substream(42, 0, Stream.Hitting, 3).random(5)
        for other in (substream(42, 0, Stream.Hitting, 4),
                      substream(42, 1, Stream.Hitting, 3),
                      substream(42, 0, Stream.Dufresne, 3),
                      substream(43, 0, Stream.Hitting, 3)):
            self.assertFalse(np.array_equal(base, other.random(5)))
