"""
Integration tests for QuadBound.

These tests run the command line end to end against the packaged
configuration and the full acceptance suite.
"""

import json
import os
import unittest

from quadbound.main import EXIT_OK, main
from quadbound.src.bounds import gauss_legendre_upper, new_lower_gamma
from quadbound.src.config_manager import ConfigManager
from quadbound.src.report_writer import load_json_report
from quadbound.src.verification import AcceptanceSuite, run_acceptance
from tests.test_utils import TestFileManager


class TestIntegration(unittest.TestCase):
    """End-to-end runs of the quadbound commands."""

    def setUp(self):
        """Set up test fixtures."""
        self.file_manager = TestFileManager()
        self.temp_dir = self.file_manager.create_temp_dir()

    def tearDown(self):
        """Tear down test fixtures."""
        self.file_manager.cleanup()

    def test_bounds_json_report(self):
        target = os.path.join(self.temp_dir, "bounds.json")

        status = main(["bounds", "--preset", "moderate", "--ellipse", "c=2", "--n", "2,8",
                       "--format", "json", "--out", target])

        self.assertEqual(status, EXIT_OK)
        with open(target, encoding="utf-8") as f:
            report = load_json_report(f.read())
        self.assertEqual(len(report.records), 4 * 13)
        for c in (1.5, 2.0):
            for n in (2, 8):
                upper = report.find("petras", c=c, n=n)[0].value
                self.assertLessEqual(report.find("new_lower_gamma", c=c, n=n)[0].value, upper)
                self.assertLessEqual(report.find("chebyshev_witness", c=c, n=n)[0].value, upper)

    def test_adversary_sandwich_from_cli(self):
        status = main(["adversary", "--ellipse", "c=1.5", "--n", "4", "--tol", "1e-12",
                       "--format", "json", "--out", self.temp_dir])

        self.assertEqual(status, EXIT_OK)
        with open(os.path.join(self.temp_dir, "adversary.json"), encoding="utf-8") as f:
            payload = json.load(f)
        measured = next(r for r in payload["records"] if r["name"] == "adversary_measured")["value"]
        delta = (1.5 - 1.0 / 1.5) / 2.0
        self.assertGreaterEqual(measured, new_lower_gamma(delta, 4, True) - 1e-10)
        self.assertLessEqual(measured, gauss_legendre_upper(1.5, 4, "petras") + 1e-10)
        self.assertTrue(os.path.exists(os.path.join(self.temp_dir, "adversary_c1.5_n4.csv")))

    def test_sweep_with_minimisation(self):
        with open(ConfigManager().config_path, encoding="utf-8") as f:
            text = f.read()
        config_path = self.file_manager.create_file_in_dir(
            self.temp_dir, "small.yaml", text.replace("max_sweeps: 25", "max_sweeps: 3"))

        status = main(["sweep", "--config", config_path, "--ellipse", "c=2", "--n", "2", "--N", "1,2,3,4",
                       "--format", "json", "--out", self.temp_dir])

        self.assertEqual(status, EXIT_OK)
        with open(os.path.join(self.temp_dir, "sweep.json"), encoding="utf-8") as f:
            report = load_json_report(f.read())
        jplus = [r.value for r in sorted(report.find("jplus_min"), key=lambda r: r.params["N"])]
        self.assertEqual(len(jplus), 4)
        self.assertTrue(all(b < a for a, b in zip(jplus, jplus[1:])), jplus)


class TestAcceptance(unittest.TestCase):
    """The full acceptance suite on the packaged configuration."""

    def test_every_criterion_passes(self):
        report = run_acceptance(ConfigManager(), tol=1e-10, seed=0)

        self.assertEqual(len(report.results), len(AcceptanceSuite().checks()))
        self.assertTrue(report.passed, "\n".join(report.lines()))


if __name__ == "__main__":
    unittest.main()
