"""
Unit tests for WD-Learn experiments
Tests for experiment plans, seed derivation, replications and gap-curve aggregation
"""

import os
import tempfile
import unittest
from unittest import mock

import numpy as np
import pandas as pd

from wd_core.config import DESK_N_GRID, DESK_REPLICATIONS, PAPER_N_GRID, PAPER_REPLICATIONS
from wd_core.erm_training import TrainConfig, TrainingDivergenceError
from wd_core.experiments import (
    ExperimentAbortedError, ExperimentPlan, ReplicationResult, TargetEstimate, aggregate, estimate_target,
    input_dim, replication_seeds, run_gap_curve, run_replication
)
from wd_core.neuralnet import Architecture
from wd_core.process_sim import BinaryDgpSpec

QUICK_TRAIN = TrainConfig(max_epochs=10, patience_epochs=3)


def tiny_plan(**overrides):
    settings = dict(n_grid=(40, 80), replications=3, target_m=400, train=QUICK_TRAIN, master_seed=7, burn_in=50)
    settings.update(overrides)
    return ExperimentPlan(BinaryDgpSpec.dgp1(), **settings)


class TestExperimentPlan(unittest.TestCase):
    """Test cases for plan validation and presets"""

    def test_presets(self):
        desk = ExperimentPlan.preset("desk")
        self.assertEqual(desk.n_grid, DESK_N_GRID)
        self.assertEqual(desk.replications, DESK_REPLICATIONS)
        paper = ExperimentPlan.preset("paper", replications=5)
        self.assertEqual(paper.n_grid, PAPER_N_GRID)
        self.assertEqual(paper.replications, 5)
        self.assertNotEqual(PAPER_REPLICATIONS, 5)
        with self.assertRaises(ValueError):
            ExperimentPlan.preset("huge")

    def test_default_architecture_matches_layout(self):
        self.assertEqual(input_dim(BinaryDgpSpec.dgp1()), 1)
        self.assertEqual(input_dim(BinaryDgpSpec.dgp2()), 3)
        plan = ExperimentPlan(BinaryDgpSpec.dgp2(), n_grid=(10,))
        self.assertEqual(plan.arch.input_dim, 3)

    def test_invalid_plans(self):
        dgp = BinaryDgpSpec.dgp1()
        with self.assertRaises(ValueError):
            ExperimentPlan(dgp, n_grid=(100, 50))
        with self.assertRaises(ValueError):
            ExperimentPlan(dgp, n_grid=())
        with self.assertRaises(ValueError):
            ExperimentPlan(dgp, replications=0)
        with self.assertRaises(ValueError):
            ExperimentPlan(dgp, arch=Architecture.feedforward(2))
        with self.assertRaises(ValueError):
            ExperimentPlan(dgp, jobs=0)

    def test_with_jobs(self):
        plan = tiny_plan().with_jobs(4)
        self.assertEqual(plan.jobs, 4)
        self.assertEqual(plan.n_grid, (40, 80))


class TestReplications(unittest.TestCase):
    """Test cases for seed derivation and single replications"""

    def test_seeds_are_stable_and_distinct(self):
        self.assertEqual(replication_seeds(7, 40, 0), replication_seeds(7, 40, 0))
        self.assertNotEqual(replication_seeds(7, 40, 0), replication_seeds(7, 40, 1))
        self.assertNotEqual(replication_seeds(7, 40, 0), replication_seeds(7, 80, 0))
        self.assertEqual(len(set(replication_seeds(7, 40, 0))), 3)

    def test_replication_is_reproducible(self):
        plan = tiny_plan()
        first = run_replication(plan, 40, 1)
        second = run_replication(plan, 40, 1)
        self.assertEqual(first, second)
        self.assertFalse(first.failed)
        self.assertTrue(np.isfinite(first.test_risk))
        self.assertEqual(first.seed, replication_seeds(7, 40, 1)[0])

    def test_divergence_marks_failure(self):
        with mock.patch("wd_core.experiments.train_erm", side_effect=TrainingDivergenceError("boom")):
            result = run_replication(tiny_plan(), 40, 0)
        self.assertTrue(result.failed)
        self.assertTrue(np.isnan(result.test_risk))

    def test_target_estimate(self):
        target = estimate_target(tiny_plan())
        self.assertTrue(np.isfinite(target.target_risk))
        self.assertGreater(target.bayes_risk, 0.0)
        self.assertEqual(estimate_target(tiny_plan()).target_risk, target.target_risk)


class TestAggregation(unittest.TestCase):
    """Test cases for folding replications into gap rows"""

    def test_hand_values(self):
        results = [
            ReplicationResult(10, 0, 1, 0.3, False),
            ReplicationResult(10, 1, 2, 0.5, False),
            ReplicationResult(10, 2, 3, float("nan"), True),
            ReplicationResult(20, 0, 4, 0.25, False),
        ]
        rows = aggregate(results, (10, 20), target_risk=0.2, bayes_risk=0.1)
        self.assertEqual([row.n for row in rows], [10, 20])
        self.assertAlmostEqual(rows[0].gap_target_mean, 0.2, places=12)
        self.assertAlmostEqual(rows[0].gap_target_se, 0.1, places=12)
        self.assertAlmostEqual(rows[0].gap_bayes_mean, 0.3, places=12)
        self.assertEqual(rows[0].failed, 1)
        self.assertAlmostEqual(rows[1].gap_target_mean, 0.05, places=12)
        self.assertTrue(np.isnan(rows[1].gap_target_se))


class TestGapCurve(unittest.TestCase):
    """Test cases for the full Monte-Carlo gap curve"""

    @classmethod
    def setUpClass(cls):
        cls.plan = tiny_plan()
        cls.target = estimate_target(cls.plan)
        cls.curve = run_gap_curve(cls.plan, cls.target)

    def test_shape(self):
        frame = self.curve.to_frame()
        self.assertEqual(list(frame["n"]), [40, 80])
        self.assertEqual(len(self.curve.replications_frame()), 6)
        self.assertEqual(self.curve.failed, 0)

    def test_standard_errors_recompute(self):
        reps = self.curve.replications_frame()
        for row in self.curve.rows:
            gaps = reps.loc[reps["n"] == row.n, "gap_target"].to_numpy()
            self.assertAlmostEqual(row.gap_target_mean, gaps.mean(), places=12)
            self.assertAlmostEqual(row.gap_target_se, gaps.std(ddof=1) / np.sqrt(gaps.size), places=12)

    def test_deterministic(self):
        again = run_gap_curve(self.plan, self.target)
        pd.testing.assert_frame_equal(again.to_frame(), self.curve.to_frame())

    def test_parallel_matches_serial(self):
        parallel = run_gap_curve(self.plan.with_jobs(2), self.target)
        pd.testing.assert_frame_equal(parallel.replications_frame(), self.curve.replications_frame())

    def test_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.curve.to_csv(os.path.join(tmp, "gap_curve.csv"))
            self.curve.replications_to_csv(os.path.join(tmp, "replications.csv"))
            gap = pd.read_csv(os.path.join(tmp, "gap_curve.csv"))
            reps = pd.read_csv(os.path.join(tmp, "replications.csv"))
        self.assertEqual(list(gap.columns),
                         ["n", "gap_target_mean", "gap_target_se", "gap_bayes_mean", "gap_bayes_se", "failed"])
        self.assertEqual(list(reps.columns), ["n", "rep", "seed", "test_risk", "gap_target", "gap_bayes", "failed"])

    def test_aborts_on_failures(self):
        def failing(plan, n, rep):
            return ReplicationResult(n, rep, 0, float("nan"), True)

        with mock.patch("wd_core.experiments.run_replication", side_effect=failing):
            with self.assertRaises(ExperimentAbortedError):
                run_gap_curve(self.plan, TargetEstimate(None, 0.3, 0.25))


class TestDgp1GapTrend(unittest.TestCase):
    """Test cases for a reduced DGP1 run with the default network and training settings"""

    @classmethod
    def setUpClass(cls):
        cls.plan = ExperimentPlan(BinaryDgpSpec.dgp1(), n_grid=(200, 1000, 2000), replications=8,
                                  target_m=10_000, master_seed=3, jobs=1)
        cls.target = estimate_target(cls.plan)
        cls.curve = run_gap_curve(cls.plan, cls.target)

    def test_bayes_risk_near_exact_value(self):
        p = 0.121875
        se = 2.0 * np.sqrt(p * (1.0 - p) / self.plan.target_m)
        self.assertAlmostEqual(self.target.bayes_risk, 0.24375, delta=3.0 * se)

    def test_target_is_near_bayes(self):
        self.assertLessEqual(self.target.target_risk, self.target.bayes_risk + 0.02)

    def test_gap_shrinks_with_n(self):
        rows = self.curve.rows
        self.assertEqual(self.curve.failed, 0)
        self.assertLess(rows[-1].gap_target_mean, rows[0].gap_target_mean)
        for previous, current in zip(rows, rows[1:]):
            self.assertLess(current.gap_target_mean, previous.gap_target_mean + current.gap_target_se)
        self.assertLess(rows[-1].gap_bayes_mean, 0.05)


if __name__ == '__main__':
    unittest.main()
