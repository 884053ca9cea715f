"""
Tests for the command-line layer: flag merging, the command pipelines and exit codes.
"""

import io
import json
import os
import unittest
from unittest.mock import patch

import pytest

from quadbound.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main, parse_args
from quadbound.src.bounds import new_lower_ellipse
from quadbound.src.cli import (
    RunConfig,
    bound_rows,
    build_run_config,
    execute,
    node_count_rows,
    parse_number_list,
    run_adversary,
    run_bounds,
    run_sweep,
)
from quadbound.src.error_handler import ErrorHandler, IntegrationError, UsageError, VerificationError
from quadbound.src.quadrature import ErrorMeasurement, WeightMeasure
from quadbound.src.report_writer import ReportWriter
from quadbound.src.verification import CriterionResult, VerificationReport
from tests.test_utils import MockConfigManager, TestFileManager, default_config, make_args


class TestParseNumberList(unittest.TestCase):

    def test_plain_and_keyed(self):
        self.assertEqual(parse_number_list("1.5,2"), [1.5, 2.0])
        self.assertEqual(parse_number_list("c=1.05"), [1.05])
        self.assertEqual(parse_number_list("4, 8,", int), [4, 8])

    def test_bad_key(self):
        with self.assertRaises(UsageError):
            parse_number_list("r=2")

    def test_bad_number(self):
        with self.assertRaises(UsageError):
            parse_number_list("1.5,two")
        with self.assertRaises(UsageError):
            parse_number_list("2.5", int)


class TestBuildRunConfig(unittest.TestCase):

    def setUp(self):
        self.mock_config = MockConfigManager(default_config()).mock

    def test_ellipses_merged_and_sorted(self):
        cfg = build_run_config(make_args("bounds", ellipse=["c=2", "1.5,2"], n="8,2"), self.mock_config)

        self.assertEqual(cfg.c_list, (1.5, 2.0))
        self.assertEqual(cfg.n_list, (2, 8))
        self.assertEqual(cfg.N_list, ())
        self.assertEqual(cfg.weight, "lebesgue")
        self.assertEqual(cfg.fmt, "csv")
        self.assertIsNone(cfg.out)

    def test_preset(self):
        cfg = build_run_config(make_args("adversary", preset=["moderate", "very_wide"]), self.mock_config)

        self.assertEqual(cfg.c_list, (1.5, 4.0))
        self.assertEqual(cfg.n_list, (4,))

    def test_unknown_preset(self):
        with self.assertRaises(UsageError):
            build_run_config(make_args("bounds", preset=["enormous"]), self.mock_config)

    def test_missing_ellipse(self):
        with self.assertRaises(UsageError) as context:
            build_run_config(make_args("bounds"), self.mock_config)
        self.assertIn("--ellipse", str(context.exception))

    def test_sweep_defaults(self):
        cfg = build_run_config(make_args("sweep"), self.mock_config)

        self.assertEqual(cfg.c_list, (1.5, 2.0))
        self.assertEqual(cfg.n_list, (2, 4))
        self.assertEqual(cfg.N_list, (1, 2))
        self.assertEqual(cfg.workers, 2)

    def test_verify_needs_no_ellipse(self):
        cfg = build_run_config(make_args("verify", dev_gamma_scale=2.0, tol=1e-8), self.mock_config)

        self.assertEqual(cfg.c_list, ())
        self.assertEqual(cfg.gamma_scale, 2.0)
        self.assertEqual(cfg.tol, 1e-8)

    def test_flags_override_config(self):
        cfg = build_run_config(make_args("bounds", ellipse=["2"], weight="chebyshev", M=3.0, seed=7,
                                         format="json", out="reports"), self.mock_config)

        self.assertEqual((cfg.weight, cfg.M, cfg.seed, cfg.fmt, cfg.out), ("chebyshev", 3.0, 7, "json", "reports"))

    def test_invalid_values(self):
        cases = [
            make_args("bounds", ellipse=["c=1"]),
            make_args("bounds", ellipse=["2"], n="0"),
            make_args("bounds", ellipse=["2"], tol=0.0),
            make_args("bounds", ellipse=["2"], weight="custom"),
            make_args("bounds", ellipse=["2"], M=-1.0),
            make_args("sweep", M=1e-7, eps=1e-6),
        ]
        for args in cases:
            with self.assertRaises(UsageError):
                build_run_config(args, self.mock_config)


class TestRows(unittest.TestCase):

    def test_bound_rows_lebesgue(self):
        rows = bound_rows(2.0, 4, WeightMeasure.lebesgue())
        names = [r.name for r in rows]

        self.assertEqual(len(rows), 13)
        self.assertIn("chebyshev_witness", names)
        self.assertNotIn("osipenko", names)
        ellipse = next(r for r in rows if r.name == "new_lower_ellipse")
        self.assertEqual(ellipse.params, {"c": 2.0, "n": 4, "N": 4, "weight": "lebesgue"})
        self.assertAlmostEqual(ellipse.value, new_lower_ellipse(2.0, 4), places=18)

    def test_bound_rows_chebyshev(self):
        rows = bound_rows(2.0, 3, WeightMeasure.chebyshev())
        by_name = {r.name: r for r in rows}

        self.assertIn("osipenko", by_name)
        self.assertNotIn("chebyshev_witness", by_name)
        self.assertEqual(by_name["osipenko"].params["weight"], "chebyshev")
        self.assertEqual(by_name["petras"].params["weight"], "lebesgue")

    def test_lower_rows_below_upper_rows(self):
        rows = bound_rows(1.5, 8, WeightMeasure.lebesgue())
        upper = min(r.value for r in rows if r.kind == "upper")
        for r in rows:
            if r.kind == "lower" and r.name != "new_lower_measure" and r.name != "new_lower_ellipse":
                self.assertLessEqual(r.value, upper, r.name)

    def test_node_count_rows(self):
        wide = node_count_rows(2.0, "lebesgue", 1e6)
        narrow = node_count_rows(1.01, "lebesgue", 1e6)

        self.assertEqual(len(wide), 5)
        self.assertIn("N_l_asymptotic", [r.name for r in narrow])
        n_g = next(r for r in wide if r.name == "N_g")
        self.assertEqual(n_g.kind, "upper")


class TestCommands(unittest.TestCase):

    def setUp(self):
        self.config_data = default_config()
        self.config_helper = MockConfigManager(self.config_data)
        self.mock_config = self.config_helper.mock
        self.error_handler = ErrorHandler(self.mock_config)
        self.file_manager = TestFileManager()

    def tearDown(self):
        self.file_manager.cleanup()

    def test_run_bounds(self):
        report = run_bounds(RunConfig("bounds", c_list=(2.0,), n_list=(2, 4)), self.mock_config)

        self.assertEqual(len(report.records), 26)
        self.assertEqual(report.find("new_lower_ellipse", c=2.0, n=2)[0].value, new_lower_ellipse(2.0, 2))
        self.assertTrue(report.ok)

    def test_execute_prints_csv(self):
        stream = io.StringIO()
        cfg = RunConfig("bounds", c_list=(2.0,), n_list=(2,))

        status = execute(cfg, self.mock_config, self.error_handler, stream)

        self.assertEqual(status, 0)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], "name,kind,c,n,N,weight,value,provenance")
        self.assertEqual(len(lines), 14)

    def test_execute_saves_json(self):
        out = self.file_manager.create_temp_dir()
        cfg = RunConfig("bounds", c_list=(1.5,), n_list=(4,), out=out, fmt="json")

        execute(cfg, self.mock_config, self.error_handler)

        with open(os.path.join(out, "bounds.json"), encoding="utf-8") as f:
            payload = json.load(f)
        self.assertEqual(payload["command"], "bounds")
        self.assertEqual(len(payload["records"]), 13)

    def test_run_adversary(self):
        out = self.file_manager.create_temp_dir()
        cfg = RunConfig("adversary", c_list=(2.0,), n_list=(2,), out=out)

        report = run_adversary(cfg, self.mock_config, self.error_handler, ReportWriter())

        self.assertTrue(report.ok)
        guaranteed = report.find("adversary_guaranteed")[0].value
        measured = report.find("adversary_measured")[0].value
        self.assertAlmostEqual(measured, guaranteed, delta=1e-9)
        self.assertGreaterEqual(measured, report.find("adversary_gamma_bound")[0].value)
        self.assertTrue(os.path.exists(os.path.join(out, "adversary_c2_n2.csv")))
        self.assertTrue(os.path.exists(os.path.join(out, "adversary_c2_n2.json")))

    def test_adversary_failure_is_reported(self):
        cfg = RunConfig("adversary", c_list=(2.0,), n_list=(2,))
        zero = ErrorMeasurement(0.0, 0.0, 0.0, 0.0, 1e-10)

        with patch("quadbound.src.cli.commands.measure_error", return_value=zero):
            with self.assertRaises(VerificationError):
                execute(cfg, self.mock_config, self.error_handler, io.StringIO())

        self.assertEqual(len(self.error_handler.get_failures("adversary")["adversary"]), 1)

    def test_run_sweep(self):
        cfg = RunConfig("sweep", c_list=(2.0,), n_list=(2,), N_list=(1,), workers=2)

        report = run_sweep(cfg, self.mock_config)

        self.assertEqual(len(report.records), 19)
        jplus = report.find("jplus_min", c=2.0, N=1)[0]
        self.assertGreaterEqual(jplus.value, new_lower_ellipse(2.0, 1))
        self.assertEqual(jplus.kind, "upper")

    def test_sweep_output_repeatable(self):
        self.config_helper.update_section("optimizer", {
            "starts": ["chebyshev", "equispaced"], "max_sweeps": 3, "step_tol": 1e-6,
            "search_multiplicities": False, "workers": 2,
        })
        cfg = RunConfig("sweep", c_list=(1.5, 2.0), n_list=(2, 4), N_list=(1,), workers=3, seed=11)
        outputs = []
        for _ in range(2):
            stream = io.StringIO()
            execute(cfg, self.mock_config, self.error_handler, stream)
            outputs.append(stream.getvalue().encode("utf-8"))

        self.assertEqual(outputs[0], outputs[1])
        self.assertIn(b"jplus_min", outputs[0])

    def test_adversary_integration_failure_is_tracked(self):
        cfg = RunConfig("adversary", c_list=(2.0,), n_list=(2, 3))
        stalled = IntegrationError("did not converge", 0.5, 1e-3, 4096)

        with patch("quadbound.src.cli.commands.adversary_for_rule", side_effect=stalled):
            with self.assertRaises(VerificationError):
                execute(cfg, self.mock_config, self.error_handler, io.StringIO())

        failures = self.error_handler.get_failures("integration")["integration"]
        self.assertEqual([f["subject"] for f in failures], ["c=2.0, n=2", "c=2.0, n=3"])
        self.assertEqual(failures[0]["context"]["panels"], 4096)

    def test_verify_failure(self):
        failing = VerificationReport([CriterionResult("closed_form", False, "identity broken")], 0.1, 50.0)
        stream = io.StringIO()

        with patch("quadbound.src.cli.commands.run_acceptance", return_value=failing):
            with self.assertRaises(VerificationError):
                execute(RunConfig("verify"), self.mock_config, self.error_handler, stream)

        self.assertIn("FAIL closed_form", stream.getvalue())
        self.assertEqual(self.error_handler.failure_count(), 1)

    def test_verify_success(self):
        passing = VerificationReport([CriterionResult("closed_form", True, "ok")], 0.1, 50.0)

        with patch("quadbound.src.cli.commands.run_acceptance", return_value=passing) as run:
            status = execute(RunConfig("verify", gamma_scale=1.0), self.mock_config, self.error_handler,
                             io.StringIO())

        self.assertEqual(status, 0)
        run.assert_called_once_with(self.mock_config, 1e-10, 0, 1.0)


class TestMain(unittest.TestCase):

    def test_parse_args(self):
        args = parse_args(["sweep", "--ellipse", "c=1.5", "--ellipse", "2", "--N", "1,2", "--search-multiplicities"])

        self.assertEqual(args.command, "sweep")
        self.assertEqual(args.ellipse, ["c=1.5", "2"])
        self.assertEqual(args.N, "1,2")
        self.assertTrue(args.search_multiplicities)

    def test_unknown_command_exits_with_usage(self):
        with self.assertRaises(SystemExit) as context:
            parse_args(["frobnicate"])
        self.assertEqual(context.exception.code, 2)


def test_main_bounds(capsys):
    assert main(["bounds", "--ellipse", "c=2", "--n", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("name,kind,c,n,N,weight,value,provenance")
    assert "new_lower_ellipse,lower,2.0,2,2,lebesgue" in out


def test_main_usage_errors(capsys):
    assert main(["bounds"]) == EXIT_USAGE
    assert main(["bounds", "--ellipse", "c=0.5"]) == EXIT_USAGE
    assert main(["bounds", "--preset", "enormous"]) == EXIT_USAGE
    assert "quadbound:" in capsys.readouterr().err


def test_main_bad_config_file(temp_dir):
    assert main(["bounds", "--ellipse", "2", "--config", os.path.join(temp_dir, "missing.yaml")]) == EXIT_USAGE


def test_main_verify_failure_exit_code():
    failing = VerificationReport([CriterionResult("closed_form", False, "identity broken")], 0.1, 50.0)
    with patch("quadbound.src.cli.commands.run_acceptance", return_value=failing):
        assert main(["verify", "--dev-gamma-scale", "2"]) == EXIT_FAILURE


@pytest.mark.parametrize("custom_mock_config", [{"output": {"format": "json"}}], indirect=True)
def test_configured_format(custom_mock_config):
    cfg = build_run_config(make_args("bounds", ellipse=["2"]), custom_mock_config)
    assert cfg.fmt == "json"
