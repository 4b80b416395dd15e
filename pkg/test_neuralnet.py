"""
Unit tests for WD-Learn neural networks
Tests for architectures, forward passes, parameter vectors and class membership
"""

import os
import tempfile
import unittest

import numpy as np

from wd_core.neuralnet import (
    Activation, Architecture, ComplexityBudget, NetworkParams, OutputActivation, check_membership,
    empirical_lipschitz_ratio, flatten_theta, forward, forward_batch, forward_trace, init_params,
    lipschitz_bound, predict_sign, read_params_csv, sparsity, unflatten_theta, write_params_csv, zero_params
)


def tiny_relu_net():
    arch = Architecture((1, 1, 1), Activation.RELU, OutputActivation.IDENTITY)
    params = NetworkParams([np.array([[2.0]]), np.array([[3.0]])], [np.array([-1.0]), np.array([0.5])])
    return arch, params


class TestArchitecture(unittest.TestCase):
    """Test cases for network shapes"""

    def test_default_classifier(self):
        arch = Architecture.feedforward(3)
        self.assertEqual(arch.widths, (3, 16, 16, 1))
        self.assertEqual(arch.depth, 2)
        self.assertEqual(arch.width, 16)
        self.assertEqual(arch.n_parameters, 3 * 16 + 16 + 16 * 16 + 16 + 16 + 1)
        self.assertEqual(arch.hidden_activation, Activation.RELU)
        self.assertEqual(arch.output_activation, OutputActivation.TANH)

    def test_output_width_must_be_one(self):
        with self.assertRaises(ValueError):
            Architecture((2, 4, 2))

    def test_unknown_activation(self):
        with self.assertRaises(ValueError):
            Architecture.feedforward(2, hidden_activation="softsign")

    def test_no_hidden_layers(self):
        arch = Architecture.feedforward(2, hidden_layers=0)
        self.assertEqual(arch.depth, 0)
        self.assertEqual(arch.width, 0)


class TestForward(unittest.TestCase):
    """Test cases for the forward pass"""

    def test_hand_computed(self):
        arch, params = tiny_relu_net()
        self.assertAlmostEqual(forward(arch, params, [1.0]), 3.5)
        self.assertAlmostEqual(forward(arch, params, [0.0]), 0.5)

    def test_batch_matches_single(self):
        arch = Architecture.feedforward(2, hidden_activation="tanh")
        params = init_params(arch, 5)
        X = np.random.Generator(np.random.PCG64(0)).normal(size=(20, 2))
        batch = forward_batch(arch, params, X)
        for i in range(20):
            self.assertAlmostEqual(batch[i], forward(arch, params, X[i]), places=14)

    def test_zero_network(self):
        arch = Architecture.feedforward(2)
        params = zero_params(arch)
        self.assertEqual(forward(arch, params, [0.3, -0.7]), 0.0)
        np.testing.assert_array_equal(predict_sign(arch, params, np.ones((3, 2))), [1, 1, 1])

    def test_tanh_output_bounded(self):
        arch = Architecture.feedforward(1)
        params = init_params(arch, 1)
        params.weights[-1] *= 100.0
        outputs = forward_batch(arch, params, np.linspace(-50, 50, 101)[:, None])
        self.assertTrue(np.all(np.abs(outputs) <= 1.0))

    def test_wrong_input_length(self):
        arch = Architecture.feedforward(2)
        with self.assertRaises(ValueError):
            forward(arch, zero_params(arch), [1.0, 2.0, 3.0])

    def test_affine_network_without_hidden_layers(self):
        arch = Architecture((1, 1), Activation.RELU, OutputActivation.IDENTITY)
        params = NetworkParams([np.array([[2.0]])], [np.array([1.0])])
        self.assertAlmostEqual(forward(arch, params, [3.0]), 7.0)

    def test_relu_absolute_value(self):
        """relu(t) + relu(-t) = |t|"""
        arch = Architecture((1, 2, 1), Activation.RELU, OutputActivation.IDENTITY)
        params = NetworkParams([np.array([[1.0], [-1.0]]), np.array([[1.0, 1.0]])],
                               [np.zeros(2), np.zeros(1)])
        t = np.linspace(-3.0, 3.0, 13)
        np.testing.assert_allclose(forward_batch(arch, params, t[:, None]), np.abs(t), atol=1e-15)

    def test_relu_positive_homogeneity(self):
        """Scaling W_1 by c > 0 scales the hidden activations and the output by c"""
        arch = Architecture.feedforward(3, hidden_layers=1, hidden_width=5, output_activation="identity")
        params = init_params(arch, 11)
        params = NetworkParams([w.copy() for w in params.weights], [np.zeros_like(b) for b in params.biases])
        scaled = NetworkParams([params.weights[0] * 2.5, params.weights[1].copy()],
                               [b.copy() for b in params.biases])
        X = np.random.Generator(np.random.PCG64(4)).normal(size=(50, 3))
        _, act = forward_trace(arch, params, X)
        _, act_scaled = forward_trace(arch, scaled, X)
        np.testing.assert_allclose(act_scaled[1], 2.5 * act[1], rtol=1e-12)
        np.testing.assert_allclose(act_scaled[-1], 2.5 * act[-1], rtol=1e-12, atol=1e-14)

    def test_sigmoid_activation(self):
        self.assertAlmostEqual(float(Activation.SIGMOID.apply(np.array(0.0))), 0.5)
        self.assertEqual(Activation.SIGMOID.lipschitz, 0.25)


class TestParameters(unittest.TestCase):
    """Test cases for initialisation and parameter vectors"""

    def test_glorot_limits_and_determinism(self):
        arch = Architecture.feedforward(3)
        a = init_params(arch, 42)
        b = init_params(arch, 42)
        for (rows, cols), w, w2, bias in zip(arch.layer_shapes, a.weights, b.weights, a.biases):
            np.testing.assert_array_equal(w, w2)
            self.assertLessEqual(np.max(np.abs(w)), np.sqrt(6.0 / (rows + cols)))
            np.testing.assert_array_equal(bias, 0.0)

    def test_flatten_order(self):
        arch = Architecture((2, 2, 1))
        params = NetworkParams([np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[7.0, 8.0]])],
                               [np.array([5.0, 6.0]), np.array([9.0])])
        np.testing.assert_array_equal(flatten_theta(params), [1, 3, 2, 4, 5, 6, 7, 8, 9])
        restored = unflatten_theta(arch, flatten_theta(params))
        for w, w2 in zip(params.weights, restored.weights):
            np.testing.assert_array_equal(w, w2)

    def test_unflatten_wrong_length(self):
        with self.assertRaises(ValueError):
            unflatten_theta(Architecture((2, 2, 1)), np.zeros(8))

    def test_sparsity_threshold(self):
        arch = Architecture((2, 2, 1))
        theta = np.zeros(arch.n_parameters)
        theta[0] = 1e-7
        theta[3] = 0.5
        params = unflatten_theta(arch, theta)
        self.assertEqual(sparsity(params), 1)
        self.assertEqual(sparsity(params, threshold=0.0), 2)

    def test_validate_shapes(self):
        arch = Architecture((2, 2, 1))
        with self.assertRaises(ValueError):
            zero_params(Architecture((3, 2, 1))).validate(arch)

    def test_params_csv(self):
        arch = Architecture.feedforward(2, hidden_width=4)
        params = init_params(arch, 3)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "params.csv")
            write_params_csv(params, path)
            loaded = read_params_csv(arch, path)
        np.testing.assert_array_equal(flatten_theta(loaded), flatten_theta(params))


class TestMembershipAndLipschitz(unittest.TestCase):
    """Test cases for the class constraints and Lipschitz constants"""

    def test_membership_flags_are_independent(self):
        arch = Architecture.feedforward(2, hidden_width=4)
        params = init_params(arch, 0)
        budget = ComplexityBudget(L=2, N=3, B=10.0, F=1.0, S=1000)
        report = check_membership(arch, params, budget, np.zeros((1, 2)))
        self.assertTrue(report.depth_ok)
        self.assertFalse(report.width_ok)
        self.assertTrue(report.theta_norm_ok)
        self.assertTrue(report.sup_norm_certified)
        self.assertTrue(report.sparsity_ok)
        self.assertFalse(report.all_ok)

    def test_membership_sparsity_violation(self):
        arch = Architecture.feedforward(2, hidden_width=4)
        report = check_membership(arch, init_params(arch, 0), ComplexityBudget(2, 4, 10.0, 1.0, 3),
                                  np.zeros((1, 2)))
        self.assertFalse(report.sparsity_ok)
        self.assertGreater(report.nonzero_count, 3)

    def test_identity_output_sup_norm_is_estimated(self):
        arch, params = tiny_relu_net()
        report = check_membership(arch, params, ComplexityBudget(1, 1, 3.0, 2.0, 4), np.array([[1.0]]))
        self.assertFalse(report.sup_norm_certified)
        self.assertFalse(report.sup_norm_ok)
        self.assertAlmostEqual(report.empirical_sup_norm, 3.5)

    def test_literal_constant(self):
        arch = Architecture.feedforward(2)
        self.assertAlmostEqual(lipschitz_bound(arch, ComplexityBudget(2, 16, 0.5)), 0.125)
        sigmoid = Architecture.feedforward(2, hidden_activation="sigmoid")
        self.assertAlmostEqual(lipschitz_bound(sigmoid, ComplexityBudget(2, 16, 1.0)), 0.0625)

    def test_worked_constants(self):
        arch = Architecture.feedforward(2)
        self.assertAlmostEqual(lipschitz_bound(arch, ComplexityBudget(L=2, N=16, B=2.0)), 8.0)
        self.assertAlmostEqual(lipschitz_bound(arch, ComplexityBudget(L=0, N=16, B=3.0)), 3.0)

    def test_constant_monotone_in_B_and_L(self):
        arch = Architecture.feedforward(2)
        for L in range(0, 5):
            values = [lipschitz_bound(arch, ComplexityBudget(L=L, N=16, B=B)) for B in (1.0, 1.5, 2.0, 4.0)]
            self.assertEqual(values, sorted(values))
        for B in (1.0, 1.5, 3.0):
            values = [lipschitz_bound(arch, ComplexityBudget(L=L, N=16, B=B)) for L in range(0, 6)]
            self.assertEqual(values, sorted(values))

    def test_strict_constant_never_violated(self):
        """Random pairs on random constrained networks stay within the strict constant"""
        rng = np.random.Generator(np.random.PCG64(2024))
        for trial in range(10):
            arch = Architecture.feedforward(3, hidden_width=8,
                                            hidden_activation=("relu", "tanh", "sigmoid")[trial % 3])
            B = 0.5 + trial * 0.1
            theta = rng.uniform(-B, B, size=arch.n_parameters)
            params = unflatten_theta(arch, theta)
            budget = ComplexityBudget(L=arch.depth, N=arch.width, B=B)
            X1 = rng.uniform(-2, 2, size=(10_000, 3))
            X2 = X1 + rng.normal(scale=0.1, size=(10_000, 3))
            ratio = empirical_lipschitz_ratio(arch, params, X1, X2)
            self.assertLessEqual(ratio, lipschitz_bound(arch, budget, strict=True))


if __name__ == '__main__':
    unittest.main()
