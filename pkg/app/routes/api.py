from functools import wraps

from flask import Blueprint, Response, current_app, jsonify, request

from app.bloch import density_from_point
from app.channels import is_unital, make_channel
from app.designs import DESIGNS, dump_ensemble, get_design
from app.errors import TDesignError
from app.experiments import run_region, run_sweep, run_truncation, run_ttable
from app.forms import EpsilonForm, RegionForm, SweepForm, TruncationForm, TTableForm
from app.models import ChannelKind
from app.quality import epsilon_for_state
from app.utils import epsilon_json

api_bp = Blueprint('api', __name__)


@api_bp.errorhandler(TDesignError)
def handle_domain_error(error):
    current_app.logger.info(f'Rejected request to {request.path}: {error}')
    return jsonify({'error': str(error)}), 400


def validated(form_class):
    """Bind the JSON body to ``form_class`` and pass the valid form to the view"""
    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            body = request.get_json(silent=True)
            if not isinstance(body, dict):
                return jsonify({'error': 'Expected a JSON object body'}), 400
            form = form_class.from_values(body)
            if not form.validate():
                return jsonify({'error': 'Invalid request', 'fields': form.errors}), 400
            return f(form, *args, **kwargs)
        return decorated_function
    return decorator


def _chunk_entries():
    return current_app.config['STATE_CHUNK_ENTRIES']


@api_bp.route('/channels', methods=['GET'])
def list_channels():
    """Channel kinds with parameter names and Kraus counts at a generic parameter"""
    return jsonify([_serialize_channel(kind) for kind in ChannelKind])


@api_bp.route('/designs', methods=['GET'])
def list_designs():
    return jsonify([_serialize_design(get_design(label)) for label in DESIGNS])


@api_bp.route('/designs/<label>', methods=['GET'])
def download_design(label):
    """Text serialization of a built-in ensemble"""
    if label not in DESIGNS:
        return jsonify({'error': f'Unknown design {label!r}'}), 404
    return Response(dump_ensemble(get_design(label)), mimetype='text/plain')


@api_bp.route('/epsilon', methods=['POST'])
@validated(EpsilonForm)
def epsilon(form):
    common = form.common()
    rho = density_from_point((form.x.data, form.y.data, form.z.data))
    result = epsilon_for_state(rho, form.t.data, get_design(common['design']),
                               make_channel(common['channel'], form.param.data), common['model'],
                               common['mode'])
    return jsonify(_serialize_result(result))


@api_bp.route('/sweep', methods=['POST'])
@validated(SweepForm)
def sweep(form):
    req = form.to_request()
    rows = run_sweep(req, _chunk_entries())
    return jsonify({
        'request': dict(req.metadata()),
        'rows': [{'param': param, **_serialize_result(result)} for param, result in rows],
    })


@api_bp.route('/ttable', methods=['POST'])
@validated(TTableForm)
def ttable(form):
    req = form.to_request()
    param, rows = run_ttable(req, _chunk_entries())
    return jsonify({
        'request': dict(req.metadata(param)),
        'rows': [{'t': t, **_serialize_result(result)} for t, result in rows],
    })


@api_bp.route('/region', methods=['POST'])
@validated(RegionForm)
def region(form):
    req = form.to_request()
    rows = run_region(req, _chunk_entries())
    return jsonify({
        'request': dict(req.metadata()),
        'accepted': sum(accepted for _, _, accepted in rows),
        'rows': [{'x': point.x, 'y': point.y, 'z': point.z,
                  'epsilon': epsilon_json(result.epsilon), 'accept': int(accepted)}
                 for point, result, accepted in rows],
    })


@api_bp.route('/truncation', methods=['POST'])
@validated(TruncationForm)
def truncation(form):
    req = form.to_request()
    rows = run_truncation(req, _chunk_entries())
    return jsonify({
        'request': dict(req.metadata()),
        'rows': [{'truncation': trunc, 'param': param, 'epsilon': epsilon_json(result.epsilon)}
                 for trunc, param, result in rows],
    })


# Helper functions for serialization
def _serialize_channel(kind):
    ch = make_channel(kind, 0.5)
    return {
        'name': kind.value,
        'param_name': kind.param_name,
        'kraus_operators': len(ch.kraus),
        'unital': is_unital(ch),
    }


def _serialize_design(ens):
    return {
        'label': ens.label,
        'size': len(ens),
        'order': ens.order,
    }


def _serialize_result(result):
    point = result.argmax_state
    return {
        'epsilon': epsilon_json(result.epsilon),
        'feasible': result.feasible,
        'kernel_residual': result.kernel_residual,
        'state': list(point) if point is not None else None,
    }
