"""
Tests for the bound calculators.
"""

import math
import unittest

import numpy as np
import pytest

from quadbound.src.bounds import (
    BoundRecord,
    bakhvalov_kappa0,
    chebyshev_witness_lower,
    ellipse_node_estimates,
    gauss_legendre_upper,
    gauss_loss_bound,
    info_bounds,
    kappa_g,
    new_lower_ellipse,
    new_lower_gamma,
    new_lower_measure,
    new_lower_simple,
    optimality_ratio,
    osipenko_chebyshev,
    petras_explicit_lower,
    petras_kn,
    szego_limit,
    to_record,
)
from quadbound.src.domains import EllipseDomain, ellipse_params
from quadbound.src.error_handler import DomainError, UsageError
from quadbound.src.quadrature import WeightMeasure, gauss_rule, quadrature_error

BASE_C2 = (5.0 / 3.0) ** 1.5 * 2.5


class TestBoundRecord(unittest.TestCase):

    def test_valid_record(self):
        record = to_record("osipenko", "reference", 0.5, "leading term", c=2.0, n=3, N=None)
        self.assertEqual(record.params, {"c": 2.0, "n": 3})
        self.assertEqual(record.to_dict()["provenance"], "leading term")
        self.assertEqual(record.sort_key(), ("osipenko", 2.0, 3))

    def test_invalid_kind(self):
        with self.assertRaises(DomainError):
            BoundRecord("x", "estimate", 1.0)

    def test_invalid_value(self):
        for value in (-1e-3, math.nan, math.inf):
            with self.assertRaises(DomainError):
                BoundRecord("x", "lower", value)


class TestDistanceBounds(unittest.TestCase):

    def test_gamma_single_node(self):
        self.assertAlmostEqual(new_lower_gamma(0.75, 1, True) / BASE_C2 ** -2, 1.0, places=12)
        self.assertAlmostEqual(new_lower_gamma(0.75, 1, True), 0.03456, places=5)

    def test_gamma_geometric_in_N(self):
        one = new_lower_gamma(0.75, 1, True)
        self.assertAlmostEqual(new_lower_gamma(0.75, 2, True) / one ** 2, 1.0, places=12)
        self.assertAlmostEqual(new_lower_gamma(0.75, 2, True), 1.194e-3, places=6)

    def test_gamma_limit(self):
        self.assertAlmostEqual(new_lower_gamma(1e-9, 3, True), 1.0, places=5)
        self.assertLess(new_lower_gamma(0.75, 1, False), new_lower_gamma(0.75, 1, True))

    def test_simple_form_is_weaker(self):
        for delta in (0.01, 0.3, 2.0):
            for N in (1, 4):
                self.assertLessEqual(new_lower_simple(delta, N), new_lower_gamma(delta, N, True))

    def test_measure_form(self):
        lebesgue = WeightMeasure.lebesgue()
        self.assertGreaterEqual(new_lower_measure(lebesgue, 0.75, 0.5, 1), math.tanh(1.0 / 3.0) ** 2)
        self.assertGreater(new_lower_measure(lebesgue, 2.0, 0.25, 8), 0.0)

    def test_measure_form_small_delta(self):
        self.assertAlmostEqual(new_lower_measure(WeightMeasure.lebesgue(), 1e-6, 0.5, 1), 2.0, places=2)
        self.assertAlmostEqual(new_lower_measure(WeightMeasure.chebyshev(), 1e-6, 0.5, 1) / math.pi, 1.0, places=2)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            new_lower_gamma(0.0, 1, True)
        with self.assertRaises(DomainError):
            new_lower_gamma(0.5, 0, True)
        with self.assertRaises(DomainError):
            new_lower_measure(WeightMeasure.lebesgue(), -1.0, 0.5, 1)


class TestEllipseBound(unittest.TestCase):

    def test_values(self):
        self.assertAlmostEqual(new_lower_ellipse(2.0, 4) / (2.0 * BASE_C2 ** -8), 1.0, places=12)
        self.assertAlmostEqual(new_lower_ellipse(2.0, 4), 2.853e-6, delta=1e-9)
        self.assertAlmostEqual(new_lower_ellipse(2.0, 1), 0.06913, delta=5e-5)

    def test_equals_twice_gamma_at_minor_axis(self):
        for c in (1.1, 1.5, 2.0, 3.0, 5.0):
            b = ellipse_params(c)[1]
            for N in (1, 2, 4, 8, 16):
                self.assertAlmostEqual(new_lower_ellipse(c, N) / (2.0 * new_lower_gamma(b, N, True)), 1.0, places=12)

    def test_narrow_limit(self):
        self.assertAlmostEqual(new_lower_ellipse(1.0 + 1e-8, 5), 2.0, places=4)

    def test_strictly_decreasing_in_N_and_c(self):
        for c in (1.05, 1.2, 1.5, 2.0, 3.0):
            values = [new_lower_ellipse(c, N) for N in range(1, 9)]
            self.assertTrue(all(b < a for a, b in zip(values, values[1:])), f"c={c}")
        for N in (1, 4, 16):
            values = [new_lower_ellipse(c, N) for c in (1.05, 1.2, 1.5, 2.0, 3.0, 5.0)]
            self.assertTrue(all(b < a for a, b in zip(values, values[1:])), f"N={N}")

    def test_c_must_exceed_one(self):
        with self.assertRaises(DomainError):
            new_lower_ellipse(1.0, 2)


class TestClassicalLowerBounds(unittest.TestCase):

    def test_bakhvalov_presets(self):
        self.assertAlmostEqual(bakhvalov_kappa0(2.0, "lebesgue"), math.pi * 9.0 / 512.0, places=15)
        self.assertAlmostEqual(bakhvalov_kappa0(2.0, "chebyshev"), math.pi / 2.0, places=15)

    def test_bakhvalov_cubic_near_one(self):
        c = 1.001
        self.assertAlmostEqual(bakhvalov_kappa0(c, "lebesgue") / (math.pi * (c - 1.0) ** 3), 1.0, delta=0.01)

    def test_bakhvalov_custom(self):
        self.assertAlmostEqual(bakhvalov_kappa0(1.7, "custom", m=2, P0=1.0), bakhvalov_kappa0(1.7, "lebesgue"))
        with self.assertRaises(DomainError):
            bakhvalov_kappa0(1.7, "custom")
        with self.assertRaises(DomainError):
            bakhvalov_kappa0(1.7, "jacobi")

    def test_petras_kn_small_degrees(self):
        lebesgue = WeightMeasure.lebesgue()
        self.assertAlmostEqual(petras_kn(lebesgue, 2.0, 0), 2.0, places=12)
        self.assertAlmostEqual(petras_kn(lebesgue, 2.0, 1), 1.0 / 2.84375, places=10)

    def test_petras_kn_chebyshev_limit(self):
        c = 1.5
        scaled = c ** 60 * petras_kn(WeightMeasure.chebyshev(), c, 30)
        self.assertAlmostEqual(scaled / (2.0 * math.pi * (1.0 - c ** -2)), 1.0, delta=0.02)

    def test_szego_limit(self):
        self.assertAlmostEqual(szego_limit(WeightMeasure.chebyshev(), 3.0), 2.0 * math.pi * (1.0 - 1.0 / 9.0), places=14)
        value = szego_limit(WeightMeasure.lebesgue(), 2.0)
        self.assertAlmostEqual(value / (math.pi * 0.75 ** 2), 1.0, places=12)
        self.assertLessEqual(value, 2.0 * math.pi * 0.75)
        self.assertAlmostEqual(szego_limit(WeightMeasure.chebyshev(), 1e8), 2.0 * math.pi, places=10)

    def test_szego_limit_custom_weights(self):
        flat = WeightMeasure.custom(lambda x: np.ones_like(x), singular_endpoints=False)
        self.assertAlmostEqual(szego_limit(flat, 2.0), szego_limit(WeightMeasure.lebesgue(), 2.0), places=10)
        outside = WeightMeasure.custom(lambda x: np.ones_like(x), singular_endpoints=False, szego_class=False)
        with self.assertRaises(DomainError):
            szego_limit(outside, 2.0)

    def test_petras_explicit_lebesgue(self):
        self.assertAlmostEqual(petras_explicit_lower("lebesgue", 2.0, 10) / 1.5124e-6, 1.0, delta=1e-3)

    def test_petras_explicit_chebyshev_floor(self):
        for c in (1.2, 2.0, 4.0):
            for n in (1, 3, 8):
                floor = math.pi * (1.0 - c ** -2) ** 3 / (2.0 * c ** (2 * n))
                self.assertGreaterEqual(petras_explicit_lower("chebyshev", c, n), floor)

    def test_petras_explicit_cubic_decay(self):
        ratios = [petras_explicit_lower("lebesgue", 1.0 + h, 4) / h ** 3 for h in (1e-3, 1e-4)]
        self.assertAlmostEqual(ratios[0] / ratios[1], 1.0, delta=0.05)
        with self.assertRaises(DomainError):
            petras_explicit_lower("custom", 2.0, 4)

    def test_osipenko(self):
        self.assertAlmostEqual(osipenko_chebyshev(2.0, 3), 2.0 * math.pi / 64.0, places=15)
        self.assertAlmostEqual(osipenko_chebyshev(2.0, 1) / osipenko_chebyshev(2.0, 2), 16.0, places=12)
        self.assertAlmostEqual(osipenko_chebyshev(1.0 + 1e-10, 2), 2.0 * math.pi, places=8)


class TestGaussUpperBounds(unittest.TestCase):

    def test_rabinowitz(self):
        self.assertAlmostEqual(gauss_legendre_upper(2.0, 2, "rabinowitz"), 64.0 / 11.25 / 16.0, places=14)
        self.assertEqual(gauss_legendre_upper(1.001, 1, "rabinowitz"), 4.0)

    def test_petras(self):
        self.assertAlmostEqual(gauss_legendre_upper(2.0, 2, "petras"), 0.421875, places=15)
        self.assertAlmostEqual(gauss_legendre_upper(2.0, 2, "petras26"), 26.0 / 16.0, places=15)

    def test_unknown_method(self):
        with self.assertRaises(UsageError):
            gauss_legendre_upper(2.0, 2, "trefethen")
        with self.assertRaises(UsageError):
            kappa_g(2.0, "trefethen")

    def test_kappa_g_dominates(self):
        for method in ("rabinowitz", "petras", "petras26"):
            for n in range(1, 12):
                self.assertLessEqual(gauss_legendre_upper(1.5, n, method),
                                     kappa_g(1.5, method) * 1.5 ** (-2 * n) * (1 + 1e-12))

    def test_loss_at_least_one(self):
        self.assertGreater(gauss_loss_bound(2.0, 4), 1.0)


class TestChebyshevWitness(unittest.TestCase):

    def test_bound_value(self):
        bound, _ = chebyshev_witness_lower(2.0, 2)
        self.assertAlmostEqual(bound, math.pi * (1 - 1 / 8) / (16 * (1 + 2 ** -8)), places=15)
        self.assertAlmostEqual(bound, 0.1711373, places=6)

    def test_witness_bounded_on_ellipse(self):
        _, witness = chebyshev_witness_lower(2.0, 2)
        boundary = EllipseDomain(2.0).boundary_points(512)
        self.assertLessEqual(float(np.max(np.abs(witness(boundary)))), 1.0 + 1e-9)

    def test_gauss_error_exceeds_bound(self):
        bound, witness = chebyshev_witness_lower(2.0, 2)
        w = WeightMeasure.lebesgue()
        error = quadrature_error(gauss_rule(w, 2), witness, w, 1e-13)
        self.assertGreaterEqual(abs(error), bound - 1e-10)


class TestNodeCounts(unittest.TestCase):

    def test_info_bounds(self):
        n_l, n_g = info_bounds(1e6, 2.0, 1.0, 1.0)
        self.assertAlmostEqual(n_l, math.log(1e6) / (2 * math.log(2.0)), places=12)
        self.assertEqual(n_l, n_g)
        self.assertEqual(info_bounds(2.0, 2.0, 0.1, 1.0)[0], 1.0)

    def test_ratio_tends_to_one(self):
        coarse = optimality_ratio(1e6, 2.0, 0.05, 4.0)
        fine = optimality_ratio(1e300, 2.0, 0.05, 4.0)
        self.assertLess(coarse, fine)
        self.assertGreater(fine, 0.99)

    def test_ellipse_estimates_wide(self):
        exact, asymptotic, ratio = ellipse_node_estimates(1e6, 2.0)
        self.assertAlmostEqual(exact, 4.10558, places=4)
        self.assertTrue(math.isnan(asymptotic))
        self.assertAlmostEqual(ratio, exact * math.log(2.0) / math.log(1e6), places=14)

    def test_ellipse_estimates_narrow(self):
        c = 1.0001
        exact, asymptotic, ratio = ellipse_node_estimates(1e8, c)
        self.assertTrue(0.9 <= exact / asymptotic <= 1.1)
        self.assertAlmostEqual(ratio / abs(1.0 / (4.0 * math.log(c - 1.0))), 1.0, delta=0.25)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            ellipse_node_estimates(0.5, 2.0)
        with self.assertRaises(DomainError):
            info_bounds(-1.0, 2.0, 1.0, 1.0)


@pytest.mark.parametrize("c", [1.05, 1.5, 2.0, 4.0])
def test_lower_bounds_below_gauss_upper(c):
    for n in (1, 4, 8):
        upper = gauss_legendre_upper(c, n, "petras")
        assert bakhvalov_kappa0(c, "lebesgue") * c ** (-2 * n) <= upper
        assert petras_explicit_lower("lebesgue", c, n) <= upper
        assert new_lower_gamma(ellipse_params(c)[1], n, True) <= upper
