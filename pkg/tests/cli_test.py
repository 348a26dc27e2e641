import unittest
import csv
import io
import json
import os
import tempfile
from unittest.mock import patch

import run
from application.output import (
    read_metadata, reports_table, samples_csv, transform_csv)
from application.transforms import mellin
from domain.boundary import Boundary
from domain.process import BesselSpec, IndexSign
from domain.report import VerificationReport
from domain.samples import SampleSet

PROBLEM = ["--nu", "0.5", "--b", "0.25", "--c", "1"]


class CliTests(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.folder.name, "out")

    def tearDown(self):
        self.folder.cleanup()

    def run_cli(self, *argv):
        code = run.main(["-o", self.path, *argv])
        with open(self.path, encoding="utf-8") as file:
            return code, file.read()

    def test_transform_at_zero_prints_one(self):
        code, text = self.run_cli("transform", *PROBLEM, "--s", "0")
        self.assertEqual(run.OK, code)
        rows = [line for line in text.splitlines()
                if not line.startswith("#")]
        self.assertEqual("s,re,im", rows[0])
        s, re, im = rows[1].split(",")
        self.assertEqual("0.0", s)
        self.assertEqual(1.0, float(re))

    def test_transform_matches_library_call(self):
        code, text = self.run_cli("transform", "--index", "pos", *PROBLEM,
                                  "--s", "0.5", "--s", "1", "--format",
                                  "json")
        self.assertEqual(run.OK, code)
        values = json.loads(text)["values"]
        self.assertAlmostEqual(1.0, values[0]["re"], places=12)
        expected = mellin(BesselSpec(0.5, IndexSign.Positive),
                          Boundary(0.25, 1.0), 1.0)
        self.assertEqual(expected.real, values[1]["re"])

    def test_metadata_echoes_resolved_configuration(self):
        _, text = self.run_cli("transform", *PROBLEM, "--s", "1")
        meta = read_metadata(text.splitlines())
        self.assertEqual("transform", meta["command"])
        self.assertEqual("neg", meta["index"])
        self.assertEqual(1e-10, meta["abs_tol"])
        self.assertEqual(["1.0"], meta["s"])

    def test_invalid_boundary_exits_with_usage_error(self):
        code = run.main(["transform", "--nu", "0.5", "--b", "2", "--c", "1",
                         "--s", "1"])
        self.assertEqual(run.USAGE_ERROR, code)

    def test_bad_flag_exits_with_usage_error(self):
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as caught:
                run.main(["transform", "--nu", "0.5"])
        self.assertEqual(2, caught.exception.code)

    def test_simulate_is_deterministic(self):
        argv = ["simulate", *PROBLEM, "--paths", "300", "--dt", "1e-3",
                "--seed", "5", "--format", "json"]
        _, first = self.run_cli(*argv)
        _, second = self.run_cli(*argv)
        self.assertEqual(first, second)
        payload = json.loads(first)
        self.assertEqual(300, len(payload["values"]))
        self.assertTrue(all(value > 0 for value in payload["values"]))
        self.assertEqual(0.0, payload["summary"]["excluded_fraction"])
        self.assertEqual(3, len(payload["summary"]["moments"]))

    def test_simulate_csv_writes_summary_file(self):
        summary = os.path.join(self.folder.name, "summary.json")
        code, text = self.run_cli("simulate", *PROBLEM, "--paths", "50",
                                  "--dt", "1e-3", "--summary", summary)
        self.assertEqual(run.OK, code)
        rows = [line for line in text.splitlines()
                if not line.startswith("#")]
        self.assertEqual("sigma", rows[0])
        self.assertEqual(50, len(rows) - 1)
        with open(summary, encoding="utf-8") as file:
            self.assertEqual(50, json.load(file)["summary"]["n_valid"])

    def test_verify_duality_passes_and_is_byte_identical(self):
        code, first = self.run_cli("verify", "--check", "duality")
        self.assertEqual(run.OK, code)
        _, second = self.run_cli("--workers", "4", "verify", "--check",
                                 "duality")
        self.assertEqual(first, second)
        reports = json.loads(first)["reports"]
        self.assertTrue(all(report["passed"] for report in reports))

    def test_failed_check_exits_with_one(self):
        failing = [VerificationReport("affine", {}, 0.5, 0.01)]
        with patch.object(run, "run_check", return_value=failing):
            code, _ = self.run_cli("verify", "--check", "affine")
        self.assertEqual(run.VERIFICATION_FAILED, code)

    def test_density_writes_a_normalised_table(self):
        code, text = self.run_cli("density", *PROBLEM, "--ymax", "50",
                                  "--points", "200")
        self.assertEqual(run.OK, code)
        lines = text.splitlines()
        meta = read_metadata(lines)
        self.assertAlmostEqual(1.0, meta["total_mass"], delta=1e-2)
        rows = list(csv.DictReader(
            line for line in lines if not line.startswith("#")))
        self.assertEqual(200, len(rows))
        self.assertEqual(["y", "pdf", "cdf"], list(rows[0]))
        pdf = [float(row["pdf"]) for row in rows]
        cdf = [float(row["cdf"]) for row in rows]
        self.assertGreaterEqual(min(pdf), -1e-4)
        self.assertTrue(all(a <= b + 1e-9 for a, b in zip(cdf, cdf[1:])))

    def test_density_on_shifted_abscissa(self):
        code, _ = self.run_cli("density", *PROBLEM, "--abscissa", "0.8",
                               "--ymax", "5", "--points", "50")
        self.assertEqual(run.OK, code)

    def test_simulate_bridge_is_opt_in(self):
        argv = ["simulate", *PROBLEM, "--paths", "50", "--dt", "1e-3",
                "--format", "json"]
        _, plain = self.run_cli(*argv)
        _, bridged = self.run_cli(*argv, "--bridge")
        self.assertFalse(json.loads(plain)["config"]["bridge"])
        self.assertTrue(json.loads(bridged)["config"]["bridge"])

    def test_control_run_exits_with_one(self):
        code, text = self.run_cli("verify", "--check", "duality",
                                  "--control")
        self.assertEqual(run.VERIFICATION_FAILED, code)
        self.assertTrue(json.loads(text)["config"]["control"])

    def test_numerical_failure_exits_with_three(self):
        code = run.main(["-o", self.path, "density", *PROBLEM, "--ymax", "50",
                         "--height", "50", "--step", "0.5", "--tail-tol",
                         "1e-14"])
        self.assertEqual(run.NUMERICAL_ERROR, code)

    def test_csv_rows_follow_the_metadata(self):
        samples = SampleSet([0.5, 1.25], label="sigma", seed=1)
        lines = samples_csv(samples, {"nu": 0.5}).splitlines()
        self.assertEqual(0.5, read_metadata(lines)["nu"])
        rows = list(csv.reader(
            line for line in lines if not line.startswith("#")))
        self.assertEqual([["sigma"], ["0.5"], ["1.25"]], rows)
        table = transform_csv([("1.0", 0.25 - 1e-3j)], {})
        self.assertEqual("s,re,im\n1.0,0.25,-0.001\n", table)

    def test_report_table_lists_verdicts(self):
        table = reports_table([VerificationReport("duality", {}, 0.0, 1.0),
                               VerificationReport("affine", {}, 2.0, 1.0)])
        lines = table.splitlines()
        self.assertTrue(lines[0].startswith("check"))
        self.assertTrue(lines[1].endswith("pass"))
        self.assertTrue(lines[2].endswith("FAIL"))
