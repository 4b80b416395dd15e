"""
End-to-End and Integration Tests for WD-Learn
Tests the HTTP service built on top of the library
"""

import unittest
import json
from app import create_app, MAX_SIMULATE_N, MAX_DEPCHECK_J
from wd_core import __version__


class TestIntegrationEndpoints(unittest.TestCase):
    """Integration tests for API endpoints"""

    @classmethod
    def setUpClass(cls):
        """Set up test client for the application"""
        cls.app = create_app()
        cls.client = cls.app.test_client()
        cls.app_context = cls.app.app_context()
        cls.app_context.push()

    @classmethod
    def tearDownClass(cls):
        """Clean up after tests"""
        cls.app_context.pop()

    def test_health(self):
        response = self.client.get('/api/health')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['status'], 'ok')
        self.assertEqual(data['version'], __version__)

    def test_bounds_workflow(self):
        """Feasible constants give both epsilon roots"""
        params = {'n': 10000, 'L1': 0.001, 'L2': 1e-6}
        response = self.client.post('/api/bounds', json=params, content_type='application/json')

        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['status'], 'success')
        report = data['report']
        self.assertAlmostEqual(report['C1'], 0.008)
        self.assertEqual(report['feasible_thm1'], 1.0)
        self.assertGreater(report['eps1'], 0.0)
        self.assertLess(report['eps1'], 2.0)

        # Same body is served from the cache
        again = self.client.post('/api/bounds', json=params, content_type='application/json')
        self.assertEqual(json.loads(again.data), data)

    def test_bounds_infeasible(self):
        response = self.client.post('/api/bounds', json={'n': 10000}, content_type='application/json')

        self.assertEqual(response.status_code, 200)
        report = json.loads(response.data)['report']
        self.assertIsNone(report['eps1'])
        self.assertTrue(report['eps1_reason'])

    def test_simulate_workflow(self):
        response = self.client.post('/api/simulate', json={'dgp': 'dgp1', 'n': 500, 'seed': 3},
                                    content_type='application/json')

        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(len(data['labels']), 500)
        self.assertTrue(set(data['labels']) <= {-1, 1})
        self.assertIsNone(data['covariates'])

        # Same seed, same trajectory
        again = self.client.post('/api/simulate', json={'dgp': 'dgp1', 'n': 500, 'seed': 3},
                                 content_type='application/json')
        self.assertEqual(json.loads(again.data)['labels'], data['labels'])

    def test_simulate_with_covariates(self):
        response = self.client.post('/api/simulate', json={'dgp': 'dgp2', 'n': 100},
                                    content_type='application/json')

        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(len(data['covariates']), 100)

    def test_depcheck_workflow(self):
        response = self.client.post('/api/depcheck', json={'kind': 'geometric', 'c': 0.25, 'a': 0.5, 'j_max': 2},
                                    content_type='application/json')

        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertAlmostEqual(data['alpha'], 0.25)
        self.assertAlmostEqual(data['tau_bound'][0], 0.375)
        self.assertAlmostEqual(data['tau_bound'][1], 0.1875)
        self.assertEqual(data['argmin_iota'], [1, 1])

    def test_oracle(self):
        response = self.client.get('/api/oracle')

        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertAlmostEqual(data['stationary_prob_plus'], 0.1875)
        self.assertAlmostEqual(data['zero_one_risk'], 0.121875)
        self.assertAlmostEqual(data['hinge_risk'], 0.24375)


class TestErrorHandling(unittest.TestCase):
    """Test error handling throughout the service"""

    @classmethod
    def setUpClass(cls):
        """Set up test client for the application"""
        cls.app = create_app()
        cls.client = cls.app.test_client()
        cls.app_context = cls.app.app_context()
        cls.app_context.push()

    @classmethod
    def tearDownClass(cls):
        """Clean up after tests"""
        cls.app_context.pop()

    def test_error_responses(self):
        """Test various error responses"""
        # Test invalid JSON
        response = self.client.post('/api/bounds', data='invalid json', content_type='application/json')
        self.assertEqual(response.status_code, 400)

        # Test missing required fields
        response = self.client.post('/api/bounds', json={}, content_type='application/json')
        self.assertEqual(response.status_code, 400)
        data = json.loads(response.data)
        self.assertIn('error', data)

        # Test non-JSON body
        response = self.client.post('/api/simulate', data='n=10', content_type='text/plain')
        self.assertEqual(response.status_code, 400)

    def test_invalid_parameters(self):
        response = self.client.post('/api/bounds', json={'n': 100, 'eta': 0}, content_type='application/json')
        self.assertEqual(response.status_code, 400)

        response = self.client.post('/api/simulate', json={'dgp': 'dgp7'}, content_type='application/json')
        self.assertEqual(response.status_code, 400)

        response = self.client.post('/api/simulate', json={'n': 'many'}, content_type='application/json')
        self.assertEqual(response.status_code, 400)

        response = self.client.post('/api/depcheck', json={'kind': 'fractal'}, content_type='application/json')
        self.assertEqual(response.status_code, 400)

        response = self.client.post('/api/depcheck', json={'c': 3.0}, content_type='application/json')
        self.assertEqual(response.status_code, 400)

    def test_boundary_conditions(self):
        """Test boundary conditions"""
        response = self.client.post('/api/simulate', json={'n': MAX_SIMULATE_N + 1},
                                    content_type='application/json')
        self.assertEqual(response.status_code, 400)

        response = self.client.post('/api/depcheck', json={'j_max': MAX_DEPCHECK_J + 1},
                                    content_type='application/json')
        self.assertEqual(response.status_code, 400)

        response = self.client.post('/api/simulate', json={'n': 0}, content_type='application/json')
        self.assertEqual(response.status_code, 400)

        # A single observation has no transitions
        response = self.client.post('/api/simulate', json={'n': 1}, content_type='application/json')
        self.assertEqual(response.status_code, 200)
        self.assertIsNone(json.loads(response.data)['p_up_from_plus'])


def run_integration_tests():
    """Run all integration and E2E tests"""
    unittest.main(argv=[''], exit=False, verbosity=2)


if __name__ == '__main__':
    run_integration_tests()
