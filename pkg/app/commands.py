"""Command-line surface: ``flask --app run.py <command>``.

Every experiment command writes a CSV whose ``#`` header lines record the
full request. Exit codes: 2 for invalid arguments, 3 when Strict mode met an
infeasible state (the file is still written), 1 when ``verify`` fails.
"""
import functools

import click
from flask import Blueprint, current_app

from app.designs import export_designs
from app.errors import TDesignError
from app.experiments import any_infeasible, run_region, run_sweep, run_truncation, run_ttable
from app.forms import RegionForm, SweepForm, TruncationForm, TTableForm
from app.utils import format_epsilon, format_number, load_key_value_file, write_csv
from app.verification import run_verification

commands_bp = Blueprint('commands', __name__, cli_group=None)

EXIT_FAILED = 1
EXIT_INFEASIBLE = 3


def _load_config_file(ctx, param, value):
    """Eager callback: key-value file entries become option defaults"""
    if not value:
        return value
    try:
        values = load_key_value_file(value)
    except TDesignError as e:
        raise click.BadParameter(str(e), ctx=ctx, param=param)
    known = {p.name for p in ctx.command.params if p.name != 'config'}
    unknown = sorted(set(values) - known)
    if unknown:
        raise click.BadParameter(f'unknown keys in {value}: {", ".join(unknown)}', ctx=ctx, param=param)
    ctx.default_map = {**(ctx.default_map or {}), **values}
    return value


def experiment_options(f):
    """Options shared by every experiment command"""
    options = [
        click.option('--config', type=click.Path(dir_okay=False), is_eager=True, expose_value=False,
                     callback=_load_config_file, help='key=value file with option defaults'),
        click.option('--channel', help='bitflip, phaseflip, bitphaseflip, phasedamp, ampdamp or depolarising'),
        click.option('--model', help='before or after'),
        click.option('--mode', help='strict or projected'),
        click.option('--design', help='pauli, clifford or icosahedral'),
        click.option('--out', default='-', show_default=True, help='output CSV path, - for stdout'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def range_options(f):
    for option in reversed([
        click.option('--param-start', type=float),
        click.option('--param-stop', type=float),
        click.option('--param-steps', type=int),
    ]):
        f = option(f)
    return f


def grid_options(f):
    for option in reversed([
        click.option('--rt', type=float, help='truncation radius'),
        click.option('--thetat', type=float, help='polar truncation'),
        click.option('--phit', type=float, help='azimuthal truncation'),
        click.option('--grid-n', type=int, help='points per axis'),
    ]):
        f = option(f)
    return f


def _bind(form_class, values):
    form = form_class.from_values(values)
    if not form.validate():
        raise click.UsageError(form.error_summary)
    try:
        return form.to_request()
    except TDesignError as e:
        raise click.UsageError(str(e))


def _run(runner, req):
    try:
        return runner(req, current_app.config['STATE_CHUNK_ENTRIES'])
    except TDesignError as e:
        raise click.UsageError(str(e))


def _emit(out, metadata, header, rows, results, mode):
    with click.open_file(out, 'w') as fh:
        write_csv(fh, [*metadata, ('out', out)], header, rows)
    if out != '-':
        click.echo(f'Wrote {len(rows)} rows to {out}', err=True)
    if mode.is_strict and any_infeasible(results):
        current_app.logger.warning('Strict mode hit infeasible states; see inf rows in %s', out)
        click.get_current_context().exit(EXIT_INFEASIBLE)


def experiment_command(form_class):
    """Bind the command's keyword options to a validated request"""
    def decorator(f):
        @functools.wraps(f)
        def wrapper(out, **values):
            return f(_bind(form_class, values), out)
        return wrapper
    return decorator


@commands_bp.cli.command('sweep')
@experiment_options
@click.option('--t', type=int, help='moment order 1..5')
@range_options
@grid_options
@experiment_command(SweepForm)
def sweep(req, out):
    """ε versus the channel parameter."""
    rows = _run(run_sweep, req)
    _emit(out, req.metadata(), ['param', 'epsilon'],
          [[format_number(param), format_epsilon(result.epsilon)] for param, result in rows],
          [result for _, result in rows], req.mode)


@commands_bp.cli.command('ttable')
@experiment_options
@click.option('--param', type=float)
@click.option('--turning-point', is_flag=True, default=None,
              help='use the parameter maximising the t=2 sweep over the range')
@range_options
@grid_options
@experiment_command(TTableForm)
def ttable(req, out):
    """ε versus t at a fixed parameter."""
    param, rows = _run(run_ttable, req)
    _emit(out, req.metadata(param), ['t', 'epsilon'],
          [[t, format_epsilon(result.epsilon)] for t, result in rows],
          [result for _, result in rows], req.mode)


@commands_bp.cli.command('region')
@experiment_options
@click.option('--t', type=int)
@click.option('--param', type=float)
@click.option('--threshold', type=float)
@click.option('--grid-n', type=int, help='cube points per axis')
@experiment_command(RegionForm)
def region(req, out):
    """Per-point ε and acceptance over the cube lattice in the Bloch ball."""
    rows = _run(run_region, req)
    _emit(out, req.metadata(), ['x', 'y', 'z', 'epsilon', 'accept'],
          [[*map(format_number, point), format_epsilon(result.epsilon), int(accepted)]
           for point, result, accepted in rows],
          [result for _, result, _ in rows], req.mode)


@commands_bp.cli.command('truncation')
@experiment_options
@click.option('--t', type=int)
@click.option('--axis', help='theta or phi')
@range_options
@click.option('--rt', type=float)
@click.option('--grid-n', type=int)
@experiment_command(TruncationForm)
def truncation(req, out):
    """Sweeps repeated for each polar or azimuthal truncation."""
    rows = _run(run_truncation, req)
    _emit(out, req.metadata(), ['truncation', 'param', 'epsilon'],
          [[format_number(trunc), format_number(param), format_epsilon(result.epsilon)]
           for trunc, param, result in rows],
          [result for _, _, result in rows], req.mode)


@commands_bp.cli.command('verify')
@click.option('--ensemble-file', type=click.Path(dir_okay=False),
              help='also certify an ensemble file against its declared order')
def verify(ensemble_file):
    """Run the self-verification suite."""
    results = run_verification(ensemble_file)
    width = max(len(r.name) for r in results)
    for r in results:
        click.echo(f'{"PASS" if r.passed else "FAIL"}  {r.name:<{width}}  {r.detail}')
    failed = sum(not r.passed for r in results)
    click.echo(f'{len(results) - failed}/{len(results)} checks passed')
    if failed:
        click.get_current_context().exit(EXIT_FAILED)


@commands_bp.cli.command('export-designs')
@click.option('--folder', type=click.Path(file_okay=False), help='defaults to ENSEMBLE_FOLDER')
def export_designs_command(folder):
    """Write the built-in ensembles as text files."""
    for path in export_designs(folder or current_app.config['ENSEMBLE_FOLDER']):
        click.echo(path)
