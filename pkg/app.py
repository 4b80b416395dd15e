from flask import Flask, request, jsonify
from flask_caching import Cache
import hashlib
import json
import numpy as np
from wd_core import __version__
from wd_core.bounds import bound_inputs_from_mapping, evaluate_bounds
from wd_core.config import DEFAULT_BURN_IN, DEFAULT_ENVELOPE_J_MAX
from wd_core.process_sim import BinaryDgpSpec, exact_risk_oracle, simulate_binary, transition_frequencies
from wd_core.weak_dependence import CoefficientSequence, tau_table, total_sum

MAX_SIMULATE_N = 100_000
MAX_DEPCHECK_J = 10_000

DGP_PRESETS = {
    'dgp1': BinaryDgpSpec.dgp1,
    'dgp2': BinaryDgpSpec.dgp2,
}


def finite_or_none(value):
    return value if np.isfinite(value) else None


def create_app():
    app = Flask(__name__)

    # Configure caching
    cache_config = {
        'CACHE_TYPE': 'SimpleCache',
        'CACHE_DEFAULT_TIMEOUT': 300
    }
    app.config.from_mapping(cache_config)
    cache = Cache(app)

    def json_body():
        if not request.is_json:
            raise ValueError('Request must be JSON')
        data = request.get_json(silent=True)
        if not isinstance(data, dict):
            raise ValueError('Request body must be a JSON object')
        return data

    def error_response(endpoint, exc):
        if isinstance(exc, (ValueError, TypeError)):
            return jsonify({'error': f'Invalid input: {str(exc)}'}), 400
        app.logger.error(f"Error in {endpoint}: {str(exc)}")
        return jsonify({'error': 'Internal server error'}), 500

    @app.route('/api/health', methods=['GET'])
    def api_health():
        return jsonify({'status': 'ok', 'version': __version__})

    @app.route('/api/bounds', methods=['POST'])
    def api_bounds():
        """Evaluate every bound quantity for the posted constants"""
        try:
            data = json_body()

            # Cache key over the canonical body
            canonical = json.dumps(data, sort_keys=True, separators=(',', ':'))
            cache_key = f"bounds:{hashlib.md5(canonical.encode()).hexdigest()}"
            cached_result = cache.get(cache_key)
            if cached_result:
                app.logger.info(f"Cache hit for bounds n={data.get('n')}")
                return jsonify(cached_result)

            report = evaluate_bounds(bound_inputs_from_mapping(data))
            response_data = {
                'status': 'success',
                'report': report.to_dict()
            }
            cache.set(cache_key, response_data)
            app.logger.info(f"Cached bounds for n={data.get('n')}")
            return jsonify(response_data)
        except Exception as e:
            return error_response('api_bounds', e)

    @app.route('/api/simulate', methods=['POST'])
    def api_simulate():
        """Simulate a preset binary process"""
        try:
            data = json_body()
            dgp = str(data.get('dgp', 'dgp1')).lower()
            if dgp not in DGP_PRESETS:
                raise ValueError(f"dgp must be one of {sorted(DGP_PRESETS)}")
            try:
                n = int(data.get('n', 100))
                seed = int(data.get('seed', 0))
                burn_in = int(data.get('burn_in', DEFAULT_BURN_IN))
            except (ValueError, TypeError):
                return jsonify({'error': 'Invalid parameter types. n, seed and burn_in must be integers.'}), 400
            if n > MAX_SIMULATE_N:
                raise ValueError(f"n must not exceed {MAX_SIMULATE_N}")

            traj = simulate_binary(DGP_PRESETS[dgp](), n, seed, burn_in)
            freq = transition_frequencies(traj)
            return jsonify({
                'status': 'success',
                'labels': traj.labels.astype(int).tolist(),
                'covariates': None if traj.covariates is None else traj.covariates[:, 0].tolist(),
                'share_plus': float(np.mean(traj.labels > 0)),
                'p_up_from_minus': finite_or_none(freq.p_up_from_minus),
                'p_up_from_plus': finite_or_none(freq.p_up_from_plus),
            })
        except Exception as e:
            return error_response('api_simulate', e)

    @app.route('/api/depcheck', methods=['POST'])
    def api_depcheck():
        """Tau bounds for a geometric or Riemannian coefficient sequence"""
        try:
            data = json_body()
            kind = str(data.get('kind', 'geometric')).lower()
            c = float(data.get('c', 0.25))
            j_max = int(data.get('j_max', DEFAULT_ENVELOPE_J_MAX))
            if not 1 <= j_max <= MAX_DEPCHECK_J:
                raise ValueError(f"j_max must lie in [1, {MAX_DEPCHECK_J}]")
            if kind == 'geometric':
                seq = CoefficientSequence.geometric(c, float(data.get('a', 0.5)))
            elif kind == 'riemannian':
                seq = CoefficientSequence.riemannian(c, float(data.get('gamma', 2.0)))
            else:
                raise ValueError("kind must be 'geometric' or 'riemannian'")

            table = tau_table(seq, j_max)
            return jsonify({
                'status': 'success',
                'alpha': total_sum(seq),
                'tau_bound': table['tau_bound'].tolist(),
                'argmin_iota': table['argmin_iota'].astype(int).tolist(),
            })
        except Exception as e:
            return error_response('api_depcheck', e)

    @app.route('/api/oracle', methods=['GET'])
    def api_oracle():
        """Exact stationary quantities of the first preset chain"""
        try:
            oracle = exact_risk_oracle(BinaryDgpSpec.dgp1())
            return jsonify({'status': 'success', **oracle._asdict()})
        except Exception as e:
            return error_response('api_oracle', e)

    return app

if __name__ == '__main__':
    app = create_app()
    app.run(debug=False, host='127.0.0.1', port=5000)
