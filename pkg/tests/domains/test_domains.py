"""
Tests for the domains module.
"""

import unittest

import numpy as np
import pytest

from quadbound.src.domains.domains import (
    DiskDomain,
    EllipseDomain,
    NiceDomainSpec,
    delta_sup,
    ellipse_contains,
    ellipse_delta_at,
    ellipse_params,
    koebe_constant,
    named_preset,
)
from quadbound.src.error_handler import DomainError


class TestEllipseParams(unittest.TestCase):
    """Tests for the semi-axes of E_c."""

    def test_c_two(self):
        a, b = ellipse_params(2.0)
        self.assertAlmostEqual(a, 1.25, places=15)
        self.assertAlmostEqual(b, 0.75, places=15)

    def test_c_three_has_unit_focal_distance(self):
        a, b = ellipse_params(3.0)
        self.assertAlmostEqual(a, 5.0 / 3.0, places=14)
        self.assertAlmostEqual(b, 4.0 / 3.0, places=14)
        self.assertAlmostEqual(a * a - b * b, 1.0, places=13)

    def test_narrow_ellipse_keeps_minor_axis(self):
        eps = 1e-9
        a, b = ellipse_params(1.0 + eps)
        self.assertAlmostEqual(a, 1.0, places=15)
        self.assertAlmostEqual(b / eps, 1.0, places=6)

    def test_c_not_above_one(self):
        for c in (1.0, 0.5, -2.0, float("nan")):
            with self.assertRaises(DomainError):
                ellipse_params(c)


class TestEllipseDomain(unittest.TestCase):
    """Tests for the distance function and membership of E_c."""

    def setUp(self):
        self.dom = EllipseDomain(2.0)

    def test_delta_at_centre(self):
        self.assertAlmostEqual(ellipse_delta_at(self.dom, 0.0), 0.75, places=15)

    def test_delta_at_endpoint(self):
        self.assertAlmostEqual(ellipse_delta_at(self.dom, 1.0), 0.25, places=15)
        self.assertAlmostEqual(ellipse_delta_at(self.dom, -1.0), 0.25, places=15)

    def test_delta_continuous_at_breakpoint(self):
        x = 1.0 / self.dom.a
        self.assertAlmostEqual(self.dom.delta_at(x), 0.45, places=14)
        self.assertAlmostEqual(self.dom.delta_at(x - 1e-12), self.dom.delta_at(x + 1e-12), places=10)

    def test_delta_vectorised_and_lipschitz(self):
        xs = np.linspace(-1.0, 1.0, 401)
        values = self.dom.delta_at(xs)
        self.assertEqual(values.shape, xs.shape)
        self.assertTrue(np.all(values > 0))
        self.assertLessEqual(np.max(np.abs(np.diff(values)) / np.diff(xs)), 1.0 + 1e-12)

    def test_delta_outside_segment(self):
        with self.assertRaises(DomainError):
            self.dom.delta_at(1.5)

    def test_delta_sup(self):
        self.assertAlmostEqual(delta_sup(self.dom), 0.75, places=15)
        self.assertLess(delta_sup(EllipseDomain(1.0 + 1e-9)), 2e-9)

    def test_delta_sup_increasing_in_c(self):
        grid = (1.0 + 1e-6, 1.01, 1.05, 1.2, 1.5, 2.0, 3.0, 10.0)
        values = [delta_sup(EllipseDomain(c)) for c in grid]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))

    def test_contains(self):
        self.assertTrue(ellipse_contains(self.dom, 0.0))
        self.assertTrue(ellipse_contains(self.dom, 1.2 + 0.0j))
        self.assertFalse(ellipse_contains(self.dom, 1.3 + 0.0j))
        self.assertFalse(ellipse_contains(self.dom, 0.8j))
        boundary = self.dom.boundary_points(16)
        self.assertTrue(np.all(self.dom.contains(boundary)))
        self.assertFalse(np.any(self.dom.contains(1.01 * boundary)))

    def test_convexity_and_constant(self):
        self.assertTrue(self.dom.convex)
        self.assertEqual(self.dom.koebe_L, 0.5)
        self.assertEqual(koebe_constant(False), 0.25)

    def test_describe(self):
        self.assertEqual(self.dom.describe(), {"kind": "ellipse", "c": 2.0, "a": 1.25, "b": 0.75})


class TestDiskDomain(unittest.TestCase):

    def test_distance(self):
        disk = DiskDomain(2.0)
        self.assertEqual(disk.delta_at(0.5), 1.5)
        self.assertEqual(disk.delta_sup, 2.0)
        self.assertTrue(disk.contains(1.9j))
        self.assertFalse(disk.contains(2.1))

    def test_radius_must_exceed_one(self):
        with self.assertRaises(DomainError):
            DiskDomain(1.0)


class TestNiceDomainSpec(unittest.TestCase):

    def test_constant_distance(self):
        domain = NiceDomainSpec(lambda x: 2.0 * np.ones_like(x), convex=True)
        self.assertAlmostEqual(delta_sup(domain), 2.0, places=12)
        self.assertEqual(domain.koebe_L, 0.5)

    def test_peaked_distance_sup_refined(self):
        domain = NiceDomainSpec(lambda x: 1.0 - 0.5 * np.abs(x - 0.3001), convex=False)
        self.assertAlmostEqual(domain.delta_sup, 1.0, places=9)
        self.assertEqual(domain.koebe_L, 0.25)

    def test_nonpositive_distance_rejected(self):
        with self.assertRaises(DomainError):
            NiceDomainSpec(lambda x: 1.0 - np.abs(x), convex=True)

    def test_non_lipschitz_distance_rejected(self):
        with self.assertRaises(DomainError):
            NiceDomainSpec(lambda x: 3.0 - 2.0 * x * x, convex=True)

    def test_membership_unknown_without_map(self):
        domain = NiceDomainSpec(lambda x: 2.0 * np.ones_like(x), convex=True)
        with self.assertRaises(DomainError):
            domain.contains(0.0)


@pytest.mark.parametrize("name, c", [("narrow", 1.05), ("moderate", 1.5), ("very_wide", 4.0)])
def test_named_preset(mock_config, name, c):
    dom = named_preset(name, mock_config)
    assert dom.c == c


def test_unknown_preset_lists_known(mock_config):
    with pytest.raises(DomainError, match="moderate"):
        named_preset("enormous", mock_config)
