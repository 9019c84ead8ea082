import math

from flask import current_app
from flask_wtf import FlaskForm
from werkzeug.datastructures import MultiDict
from wtforms import BooleanField, FloatField, IntegerField, SelectField
from wtforms.validators import AnyOf, DataRequired, NumberRange, ValidationError

from app.designs import DESIGNS
from app.experiments import RegionRequest, SweepRequest, TruncationRequest, TTableRequest
from app.models import BlochGridSpec, ChannelKind, EpsilonMode, EpsilonModeKind, NoiseModel

_ANGLE_SLACK = 1e-9


def _unit_interval(label):
    return NumberRange(min=0.0, max=1.0, message=f'{label} must lie in [0, 1]')


class ExperimentForm(FlaskForm):
    """Fields shared by every experiment request.

    Bound from CLI options, config-file values or a JSON body through
    ``from_values``; missing entries fall back to the field default or to the
    config keys listed in ``CONFIG_DEFAULTS``.
    """
    class Meta:
        csrf = False

    CONFIG_DEFAULTS = {'design': 'DESIGN_LABEL', 'mode': 'EPSILON_MODE'}

    channel = SelectField('Channel', validators=[DataRequired()],
                          choices=[(kind.value, kind.value) for kind in ChannelKind])
    model = SelectField('Noise model', default=NoiseModel.BEFORE.value,
                        choices=[(model.value, model.value) for model in NoiseModel])
    design = SelectField('Design', choices=[(label, label) for label in DESIGNS])
    mode = SelectField('Epsilon mode', choices=[(kind.value, kind.value) for kind in EpsilonModeKind])

    @classmethod
    def from_values(cls, values):
        data = {key: value for key, value in (values or {}).items() if value is not None}
        for name, setting in cls.CONFIG_DEFAULTS.items():
            data.setdefault(name, current_app.config[setting])
        return cls(formdata=MultiDict(data))

    @property
    def error_summary(self):
        return '; '.join(f'{name}: {", ".join(messages)}' for name, messages in self.errors.items())

    def epsilon_mode(self):
        cfg = current_app.config
        return EpsilonMode(EpsilonModeKind(self.mode.data), rank_cutoff=cfg['RANK_CUTOFF'],
                           kernel_residual_tol=cfg['KERNEL_RESIDUAL_TOL'])

    def common(self):
        return {
            'channel': ChannelKind(self.channel.data),
            'model': NoiseModel(self.model.data),
            'mode': self.epsilon_mode(),
            'design': self.design.data,
        }


class ParameterRangeMixin:
    param_start = FloatField('Parameter start', default=0.0, validators=[_unit_interval('param_start')])
    param_stop = FloatField('Parameter stop', default=1.0, validators=[_unit_interval('param_stop')])
    param_steps = IntegerField('Parameter steps', default=11, validators=[NumberRange(min=2)])

    def validate_param_stop(self, param_stop):
        if self.param_start.data is not None and param_stop.data is not None \
                and param_stop.data < self.param_start.data:
            raise ValidationError('param_stop must not be smaller than param_start')


class SphericalGridMixin:
    rt = FloatField('Truncation radius', default=1.0, validators=[_unit_interval('rt')])
    thetat = FloatField('Polar truncation', default=math.pi,
                        validators=[NumberRange(min=0.0, max=math.pi + _ANGLE_SLACK)])
    phit = FloatField('Azimuthal truncation', default=2 * math.pi,
                      validators=[NumberRange(min=0.0, max=2 * math.pi + _ANGLE_SLACK)])
    grid_n = IntegerField('Points per axis', validators=[NumberRange(min=2)])

    def grid_spec(self):
        n = self.grid_n.data
        return BlochGridSpec(self.rt.data, min(self.thetat.data, math.pi),
                             min(self.phit.data, 2 * math.pi), n, n, n)


class SweepForm(ParameterRangeMixin, SphericalGridMixin, ExperimentForm):
    CONFIG_DEFAULTS = {**ExperimentForm.CONFIG_DEFAULTS, 'grid_n': 'GRID_POINTS'}

    t = IntegerField('Moment order', default=2, validators=[NumberRange(min=1, max=5)])

    def to_request(self):
        return SweepRequest(t=self.t.data, param_start=self.param_start.data,
                            param_stop=self.param_stop.data, param_steps=self.param_steps.data,
                            grid=self.grid_spec(), **self.common())


class TTableForm(ParameterRangeMixin, SphericalGridMixin, ExperimentForm):
    CONFIG_DEFAULTS = {**ExperimentForm.CONFIG_DEFAULTS, 'grid_n': 'GRID_POINTS'}

    param = FloatField('Parameter')
    turning_point = BooleanField('Use the t=2 turning point',
                                 false_values=(False, 'false', 'False', '0', 'no', 'off', ''))

    def validate_param(self, param):
        if param.data is None:
            if not self.turning_point.data:
                raise ValidationError('param is required unless turning_point is set')
        elif not 0.0 <= param.data <= 1.0:
            raise ValidationError('param must lie in [0, 1]')

    def to_request(self):
        return TTableRequest(param=self.param.data, grid=self.grid_spec(),
                             turning_point=self.turning_point.data,
                             param_start=self.param_start.data, param_stop=self.param_stop.data,
                             param_steps=self.param_steps.data, **self.common())


class RegionForm(ExperimentForm):
    CONFIG_DEFAULTS = {**ExperimentForm.CONFIG_DEFAULTS, 'grid_n': 'CUBE_POINTS',
                       'threshold': 'REGION_THRESHOLD'}

    t = IntegerField('Moment order', default=2, validators=[NumberRange(min=1, max=5)])
    param = FloatField('Parameter', validators=[_unit_interval('param')])
    threshold = FloatField('Acceptance threshold', validators=[NumberRange(min=0.0)])
    grid_n = IntegerField('Points per axis', validators=[NumberRange(min=2)])

    def to_request(self):
        return RegionRequest(t=self.t.data, param=self.param.data, threshold=self.threshold.data,
                             n=self.grid_n.data, **self.common())


class TruncationForm(ParameterRangeMixin, ExperimentForm):
    CONFIG_DEFAULTS = {**ExperimentForm.CONFIG_DEFAULTS, 'grid_n': 'GRID_POINTS',
                       'rt': 'TRUNCATION_RADIUS'}

    t = IntegerField('Moment order', default=2, validators=[NumberRange(min=1, max=5)])
    axis = SelectField('Truncated angle', default='theta', validators=[AnyOf(['theta', 'phi'])],
                       choices=[('theta', 'theta'), ('phi', 'phi')])
    rt = FloatField('Truncation radius', validators=[_unit_interval('rt')])
    grid_n = IntegerField('Points per axis', validators=[NumberRange(min=2)])

    def to_request(self):
        return TruncationRequest(t=self.t.data, axis=self.axis.data,
                                 param_start=self.param_start.data, param_stop=self.param_stop.data,
                                 param_steps=self.param_steps.data, r_t=self.rt.data,
                                 n=self.grid_n.data, **self.common())


class EpsilonForm(ExperimentForm):
    """Single-state ε for the JSON API"""
    x = FloatField('x', default=0.0, validators=[NumberRange(min=-1.0, max=1.0)])
    y = FloatField('y', default=0.0, validators=[NumberRange(min=-1.0, max=1.0)])
    z = FloatField('z', default=0.0, validators=[NumberRange(min=-1.0, max=1.0)])
    t = IntegerField('Moment order', default=2, validators=[NumberRange(min=1, max=5)])
    param = FloatField('Parameter', validators=[_unit_interval('param')])

    def validate_z(self, z):
        coords = (self.x.data, self.y.data, z.data)
        if all(c is not None for c in coords) and sum(c * c for c in coords) > 1.0 + 1e-12:
            raise ValidationError('point lies outside the Bloch ball')
