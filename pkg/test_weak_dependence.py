"""
Unit tests for WD-Learn weak dependence
Tests for coefficient sequences, tau bounds, decay envelopes and the factorial-moment check
"""

import math
import unittest

import numpy as np

from wd_core.weak_dependence import (
    CoefficientSequence, GeometricTail, SequenceKind, StretchedExponentialTail, a3_bound, a3_witness, check_a3,
    fit_a3_constants, geometric_case_rate, moment_sums, riemannian_case_rate, tail_sum, tail_sums, tau_bound,
    tau_table, total_sum, truncation_certificate
)


class TestCoefficientSequence(unittest.TestCase):
    """Test cases for coefficient sequences and their sums"""

    def test_geometric_sums(self):
        seq = CoefficientSequence.geometric(0.25, 0.5)
        self.assertAlmostEqual(total_sum(seq), 0.25, places=15)
        self.assertAlmostEqual(tail_sum(seq, 1), 0.125, places=15)
        self.assertAlmostEqual(tail_sum(seq, 2), 0.0625, places=15)
        self.assertEqual(truncation_certificate(seq), 0.0)
        self.assertTrue(seq.contracting)

    def test_riemannian_total_is_certified(self):
        seq = CoefficientSequence.riemannian(1.0, 2.0)
        exact = math.pi ** 2 / 6.0 - 1.0
        total = total_sum(seq)
        self.assertLessEqual(total, exact)
        self.assertLessEqual(exact, total + truncation_certificate(seq))
        self.assertLess(truncation_certificate(seq), 1e-5)

    def test_riemannian_tail_matches_direct_sum(self):
        seq = CoefficientSequence.riemannian(0.3, 3.0, truncation=1000)
        k = np.arange(6, 1001, dtype=float)
        self.assertAlmostEqual(tail_sum(seq, 5), float(np.sum(0.3 * (k + 1.0) ** -3.0)), places=14)

    def test_riemannian_tail_beyond_truncation(self):
        seq = CoefficientSequence.riemannian(1.0, 2.0, truncation=10)
        self.assertAlmostEqual(tail_sum(seq, 20), 1.0 / 21.0, places=15)

    def test_tail_sums_vectorised(self):
        seq = CoefficientSequence.geometric(0.25, 0.5)
        np.testing.assert_allclose(tail_sums(seq, [1, 2, 3]), [0.125, 0.0625, 0.03125])

    def test_invalid_sequences(self):
        with self.assertRaises(ValueError):
            CoefficientSequence.geometric(0.5, 1.0)
        with self.assertRaises(ValueError):
            CoefficientSequence.riemannian(0.5, 1.0)
        with self.assertRaises(ValueError):
            CoefficientSequence.geometric(-0.1, 0.5)
        with self.assertRaises(ValueError):
            tail_sums(CoefficientSequence.geometric(0.25, 0.5), [0])


class TestTauBound(unittest.TestCase):
    """Test cases for tau(j) by enumeration over iota"""

    def setUp(self):
        self.seq = CoefficientSequence.geometric(0.25, 0.5)

    def test_hand_values(self):
        self.assertAlmostEqual(tau_bound(self.seq, 1).value, 0.375, places=15)
        second = tau_bound(self.seq, 2)
        self.assertAlmostEqual(second.value, 0.1875, places=15)
        self.assertEqual(second.argmin_iota, 1)

    def test_nonincreasing_in_j(self):
        table = tau_table(self.seq, 60)
        self.assertEqual(list(table.columns), ["j", "tau_bound", "argmin_iota"])
        self.assertEqual(len(table), 60)
        self.assertTrue(np.all(np.diff(table["tau_bound"]) <= 0))
        self.assertTrue(np.all(table["argmin_iota"] <= table["j"]))

    def test_non_contracting(self):
        with self.assertRaises(ValueError):
            tau_bound(CoefficientSequence.geometric(2.0, 0.5), 3)

    def test_invalid_j(self):
        with self.assertRaises(ValueError):
            tau_bound(self.seq, 0)


class TestEnvelopes(unittest.TestCase):
    """Test cases for the calibrated decay envelopes"""

    def test_geometric_envelope_dominates(self):
        envelope = geometric_case_rate(0.25, 0.5, j_max=200)
        self.assertAlmostEqual(envelope.rate, math.log(0.25) * math.log(0.5), places=14)
        seq = CoefficientSequence.geometric(0.25, 0.5)
        for j in range(1, 201):
            self.assertLessEqual(tau_bound(seq, j).value, envelope(j) * (1.0 + 1e-12))

    def test_riemannian_envelope_dominates(self):
        seq = CoefficientSequence.riemannian(0.4, 2.5, truncation=10_000)
        envelope = riemannian_case_rate(seq, j_max=100)
        self.assertEqual(envelope.kind, SequenceKind.RIEMANNIAN)
        self.assertAlmostEqual(envelope.rate, 1.5)
        for j in range(1, 101):
            self.assertLessEqual(tau_bound(seq, j).value, envelope(j) * (1.0 + 1e-12))

    def test_invalid_envelope_inputs(self):
        with self.assertRaises(ValueError):
            geometric_case_rate(1.0, 0.5)
        with self.assertRaises(ValueError):
            riemannian_case_rate(CoefficientSequence.geometric(0.25, 0.5))


class TestA3(unittest.TestCase):
    """Test cases for the factorial-moment condition"""

    def test_a3_bound(self):
        self.assertEqual(a3_bound(2.0, 1.0, 0.0, 5), 2.0)
        self.assertAlmostEqual(a3_bound(1.0, 2.0, 1.0, 3), 48.0, places=10)

    def test_moment_sums_by_hand(self):
        np.testing.assert_allclose(moment_sums([1.0, 0.5, 0.25], 1, 2), [1.75, 2.75])

    def test_halving_sequence_holds_with_certificate(self):
        report = check_a3(lambda j: 0.5 ** j, 2.0, 1.0, 0.0, k_max=0, j_max=40, tail=GeometricTail(1.0, 0.5))
        self.assertEqual(report.rows[0].verdict, "holds")
        self.assertTrue(report.verified)
        self.assertIn("verified up to k=0", report.summary())

    def test_fails_and_inconclusive(self):
        failing = check_a3(lambda j: 0.5 ** j, 1.0, 1.0, 0.0, k_max=0, j_max=40)
        self.assertEqual(failing.rows[0].verdict, "fails")
        unknown = check_a3(lambda j: 0.5 ** j, 2.1, 1.0, 0.0, k_max=0, j_max=40)
        self.assertEqual(unknown.rows[0].verdict, "inconclusive")
        self.assertFalse(unknown.verified)

    def test_growing_flag(self):
        report = check_a3(np.ones(101), 1e9, 1.0, 0.0, k_max=1, j_max=100)
        self.assertTrue(all(row.growing for row in report.rows))
        summable = check_a3(lambda j: 0.5 ** j, 2.0, 2.0, 1.0, k_max=1, j_max=100)
        self.assertFalse(summable.rows[0].growing)

    def test_eps_sequence_validation(self):
        with self.assertRaises(ValueError):
            check_a3([0.1, 0.2, 0.3], 1.0, 1.0, 0.0, k_max=0, j_max=2)
        with self.assertRaises(ValueError):
            check_a3([0.5, 0.25], 1.0, 1.0, 0.0, k_max=0, j_max=5)
        with self.assertRaises(ValueError):
            check_a3([0.5, 0.25], -1.0, 1.0, 0.0, k_max=0, j_max=1)

    def test_fit_recovers_exact_constants(self):
        k = np.arange(5)
        sums = 2.0 * 3.0 ** k * np.array([math.factorial(int(i)) for i in k], dtype=float)
        L1, L2 = fit_a3_constants(sums, 1.0, inflation=1.0)
        self.assertAlmostEqual(L1, 2.0, places=8)
        self.assertAlmostEqual(L2, 3.0, places=8)

    def test_stretched_tail_is_small_far_out(self):
        tail = StretchedExponentialTail(1.0, 0.5)
        self.assertLess(tail.bound(2, 20_000), 1e-20)
        self.assertGreater(tail.bound(2, 10), tail.bound(2, 100))

    def test_geometric_witness(self):
        report = a3_witness(0.5, 0.5, mu=2.0, k_max=4, j_max=20_000)
        self.assertTrue(report.verified)
        self.assertEqual(len(report.to_frame()), 5)


if __name__ == '__main__':
    unittest.main()
