"""
Unit tests for the wdlearn command line
Tests for exit codes, option precedence, manifests and the artifacts of every subcommand
"""

import contextlib
import io
import os
import tempfile
import unittest

import pandas as pd

from wd_core.cli import main
from wd_core.kvconfig import read_key_value_file


def run(*argv):
    """Run the CLI quietly and return (exit code, stdout)"""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue()


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestExitCodes(unittest.TestCase):
    """Test cases for usage, validation and runtime failures"""

    def test_no_command(self):
        self.assertEqual(run()[0], 1)

    def test_unknown_flag(self):
        self.assertEqual(run("oracle", "--no-such-flag", "1")[0], 1)

    def test_bad_flag_value(self):
        self.assertEqual(run("simulate", "--n", "many")[0], 1)

    def test_bounds_needs_n(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(run("bounds", "--out-dir", tmp)[0], 1)

    def test_unknown_dgp(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(run("simulate", "--dgp", "dgp9", "--out-dir", tmp)[0], 1)

    def test_unknown_config_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.cfg")
            with open(path, "w") as fh:
                fh.write("n=10\nwidth=3\n")
            self.assertEqual(run("simulate", "--config", path, "--out-dir", tmp)[0], 1)

    def test_config_for_another_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.cfg")
            with open(path, "w") as fh:
                fh.write("command=train\n")
            self.assertEqual(run("simulate", "--config", path, "--out-dir", tmp)[0], 1)

    def test_missing_data_file_is_runtime_failure(self):
        with tempfile.TemporaryDirectory() as tmp:
            missing = os.path.join(tmp, "missing.csv")
            self.assertEqual(run("train", "--data", missing, "--out-dir", tmp)[0], 2)


class TestSimulateAndManifest(unittest.TestCase):
    """Test cases for reproducible simulation and manifest reuse"""

    def test_same_seed_same_bytes(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            self.assertEqual(run("simulate", "--n", "200", "--seed", "3", "--out-dir", a)[0], 0)
            self.assertEqual(run("simulate", "--n", "200", "--seed", "3", "--out-dir", b)[0], 0)
            self.assertEqual(read_bytes(os.path.join(a, "trajectory.csv")),
                             read_bytes(os.path.join(b, "trajectory.csv")))

    def test_manifest_reproduces_run(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            run("simulate", "--dgp", "dgp2", "--n", "150", "--seed", "9", "--out-dir", a)
            manifest = read_key_value_file(os.path.join(a, "manifest.txt"))
            self.assertEqual(manifest["command"], "simulate")
            self.assertEqual(manifest["n"], "150")
            self.assertEqual(manifest["rng_algorithm"], "PCG64")
            code, _ = run("simulate", "--config", os.path.join(a, "manifest.txt"), "--out-dir", b)
            self.assertEqual(code, 0)
            self.assertEqual(read_bytes(os.path.join(a, "trajectory.csv")),
                             read_bytes(os.path.join(b, "trajectory.csv")))

    def test_flags_override_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.cfg")
            with open(path, "w") as fh:
                fh.write("# simulation settings\nn=20\nseed=4\n")
            run("simulate", "--config", path, "--n", "30", "--out-dir", tmp)
            frame = pd.read_csv(os.path.join(tmp, "trajectory.csv"))
            manifest = read_key_value_file(os.path.join(tmp, "manifest.txt"))
        self.assertEqual(len(frame), 30)
        self.assertEqual(manifest["seed"], "4")


class TestSubcommands(unittest.TestCase):
    """Test cases for the artifacts each subcommand writes"""

    def test_oracle(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out = run("oracle", "--out-dir", tmp)
            frame = pd.read_csv(os.path.join(tmp, "oracle.csv"))
        self.assertEqual(code, 0)
        values = dict(zip(frame["name"], frame["value"]))
        self.assertAlmostEqual(values["hinge_risk"], 0.24375, places=12)
        self.assertIn("stationary_prob_plus", out)

    def test_train_on_simulated_and_loaded_data(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out = run("train", "--n", "80", "--max-epochs", "5", "--out-dir", tmp)
            self.assertEqual(code, 0)
            for name in ("training_log.csv", "params.csv", "eval_report.csv", "manifest.txt"):
                self.assertTrue(os.path.exists(os.path.join(tmp, name)), msg=name)
            self.assertIn("test evaluation", out)

            sim_dir = os.path.join(tmp, "sim")
            run("simulate", "--n", "60", "--out-dir", sim_dir)
            code, out = run("train", "--data", os.path.join(sim_dir, "trajectory.csv"), "--max-epochs", "5",
                            "--out-dir", os.path.join(tmp, "loaded"))
            self.assertEqual(code, 0)
            self.assertIn("training evaluation", out)

    def test_bounds(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, _ = run("bounds", "--n", "10000", "--L1", "0.001", "--L2", "1e-6", "--out-dir", tmp)
            frame = pd.read_csv(os.path.join(tmp, "bounds.csv"))
        self.assertEqual(code, 0)
        values = dict(zip(frame["name"], frame["value"]))
        self.assertEqual(values["feasible_thm1"], 1.0)
        self.assertEqual(values["rate_ok_thm2"], 1.0)

    def test_bounds_log_n_flag(self):
        with tempfile.TemporaryDirectory() as tmp:
            run("bounds", "--n", "10000", "--log-n-variant", "--out-dir", tmp)
            manifest = read_key_value_file(os.path.join(tmp, "manifest.txt"))
        self.assertEqual(manifest["log_n_variant"], "true")

    def test_depcheck(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out = run("depcheck", "--j-max", "20", "--out-dir", tmp)
            table = pd.read_csv(os.path.join(tmp, "tau_table.csv"))
        self.assertEqual(code, 0)
        self.assertEqual(len(table), 20)
        self.assertIn("alpha = sum of coefficients = 0.25", out)

    def test_depcheck_rejections(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(run("depcheck", "--kind", "riemannian", "--a3", "--j-max", "5", "--out-dir", tmp)[0], 1)
            self.assertEqual(run("depcheck", "--c", "2.0", "--out-dir", tmp)[0], 1)
            self.assertEqual(run("depcheck", "--kind", "fractal", "--out-dir", tmp)[0], 1)

    def test_experiment(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, _ = run("experiment", "--n-grid", "30,60", "--replications", "2", "--target-m", "200",
                          "--max-epochs", "5", "--jobs", "1", "--out-dir", tmp)
            gap = pd.read_csv(os.path.join(tmp, "gap_curve.csv"))
            reps = pd.read_csv(os.path.join(tmp, "replications.csv"))
        self.assertEqual(code, 0)
        self.assertEqual(list(gap["n"]), [30, 60])
        self.assertEqual(len(reps), 4)

    def test_recession(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out = run("recession", "--seeds", "0,1", "--max-epochs", "5", "--jobs", "1", "--out-dir", tmp)
            seeds = pd.read_csv(os.path.join(tmp, "recession_seeds.csv"))
            self.assertTrue(os.path.exists(os.path.join(tmp, "recession_report.csv")))
        self.assertEqual(code, 0)
        self.assertEqual(list(seeds["seed"]), [0, 1])
        self.assertIn("median test accuracy over 2 seed(s)", out)


if __name__ == '__main__':
    unittest.main()
