# -*- coding: utf-8 -*-
"""
Flask API Server - Meta Distribution Toolkit
JSON front end to the experiment runner; no UI.
"""

import os
import traceback

from dotenv import load_dotenv
from flask import Flask, jsonify, request
from flask_cors import CORS

from analytic import HcnSpec, mb_hcn_hat, mb_ppp
from errors import ConfigError, MetaDistError
from experiment_config import MODES, ExperimentConfig
from experiments import run_experiment, to_csv_text
from gains import effective_gain, tier_weights
from metasim import critical_curve
from point_processes import TriangularLattice
from sir_core import TierSpec

load_dotenv()

app = Flask(__name__)
CORS(app, resources={
    r"/api/*": {"origins": "*"},
    r"/health": {"origins": "*"}
})


def _error_response(e: Exception):
    """ConfigError -> 400, other toolkit errors -> 500."""
    if isinstance(e, ConfigError):
        return jsonify({'success': False, 'error': str(e), 'type': 'config_error', 'field': e.field}), 400
    if isinstance(e, MetaDistError):
        return jsonify({'success': False, 'error': str(e), 'type': type(e).__name__,
                        'module': e.module}), 500
    print(f"\n✗ ERROR: {e}")
    print(traceback.format_exc())
    return jsonify({'success': False, 'error': str(e), 'type': 'internal_error'}), 500


def _payload() -> dict:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ConfigError("body", "expected a JSON object")
    return data


def _tiers(data: dict):
    raw = data.get('tiers')
    if not isinstance(raw, list) or not raw:
        raise ConfigError("tiers", "expected a non-empty list of tier objects")
    return [TierSpec.from_dict(t) for t in raw]


# ==================== ENDPOINTS ====================

@app.route('/health', methods=['GET'])
def health_check():
    """Health check endpoint"""
    return jsonify({
        'status': 'online',
        'message': 'Meta distribution toolkit API',
        'modes': list(MODES)
    }), 200


@app.route('/api/run', methods=['POST'])
def run():
    """Run one experiment config; the CSV comes back in the response, nothing is written."""
    try:
        data = dict(_payload())
        data.pop('out', None)
        config = ExperimentConfig.from_dict(data)

        print(f"\n[run] mode {config.mode} | {len(config.tiers)} tier(s) | n = {config.n}")
        result = run_experiment(config)
        print(f"✓ {len(result.rows)} rows")

        response = result.to_dict()
        response.update({'success': True, 'csv': to_csv_text(result), 'config': config.to_dict()})
        return jsonify(response), 200
    except Exception as e:
        return _error_response(e)


@app.route('/api/effective-gain', methods=['POST'])
def effective_gain_endpoint():
    try:
        tiers = _tiers(_payload())
        gain = effective_gain(tiers)
        return jsonify({
            'success': True,
            'value_db': gain.value_db,
            'value_linear': gain.value_linear,
            'weights': tier_weights(tiers).tolist()
        }), 200
    except Exception as e:
        return _error_response(e)


@app.route('/api/critical-theta', methods=['POST'])
def critical_theta_endpoint():
    try:
        data = _payload()
        alpha = float(data.get('alpha', 4.0))
        xs = [float(x) for x in data.get('xs', [0.95])]
        if 'eta' in data:
            lattice = TriangularLattice(float(data['eta']))
        else:
            lattice = TriangularLattice(TriangularLattice.spacing_for_density(float(data.get('density', 0.1))))
        curve = critical_curve(lattice, alpha, xs)
        return jsonify({
            'success': True,
            'alpha': alpha,
            'eta': lattice.eta,
            'thresholds': [{'x': c.x, 'theta_c_db': c.theta_c_db} for c in curve]
        }), 200
    except Exception as e:
        return _error_response(e)


@app.route('/api/moments', methods=['POST'])
def moments_endpoint():
    """Analytic M_b(theta): PPP with the given alpha, or the per-tier approximation when tiers are given."""
    try:
        data = _payload()
        b_values = [float(b) for b in data.get('b_values', [1.0, 2.0])]
        theta_db = [float(t) for t in data.get('theta_db', [0.0])]
        if 'tiers' in data:
            spec = HcnSpec.from_tiers(_tiers(data))

            def moment(b, th):
                return mb_hcn_hat(spec, b, th)
        else:
            alpha = float(data.get('alpha', 4.0))
            if not alpha > 2:
                raise ConfigError("alpha", f"path-loss exponent must be > 2, got {alpha}")

            def moment(b, th):
                return mb_ppp(b, 2.0 / alpha, th)

        rows = [{'theta_db': t, 'b': b, 'moment': moment(b, 10.0 ** (t / 10.0)).real}
                for b in b_values for t in theta_db]
        return jsonify({'success': True, 'moments': rows}), 200
    except Exception as e:
        return _error_response(e)


if __name__ == '__main__':
    host = os.getenv('METADIST_HOST', '127.0.0.1')
    port = int(os.getenv('METADIST_PORT', '5001'))

    print("\n" + "=" * 80)
    print(" " * 20 + "META DISTRIBUTION TOOLKIT API")
    print("=" * 80)
    print(f"\n🚀 Server starting on http://{host}:{port}")
    print("\n📍 Endpoints:")
    print("   GET  /health               - Health check")
    print("   POST /api/run              - Run an experiment config")
    print("   POST /api/effective-gain   - G_eff of a tier mix")
    print("   POST /api/critical-theta   - Lattice critical thresholds")
    print("   POST /api/moments          - Analytic moments")
    print("=" * 80 + "\n")

    app.run(host=host, port=port, debug=False, threaded=True)
