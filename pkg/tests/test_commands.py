import os

import pytest

from app.designs import dump_ensemble, get_design

SMALL_GRID = ['--rt', '0.95', '--grid-n', '5']


def csv_body(output):
    lines = [line for line in output.splitlines() if line and not line.startswith('#')]
    return lines[0], [line.split(',') for line in lines[1:]]


def headers(output):
    return dict(line[2:].split('=', 1) for line in output.splitlines() if line.startswith('# '))


def test_sweep_writes_csv(runner):
    result = runner.invoke(args=['sweep', '--channel', 'bitflip', '--model', 'before', '--t', '2',
                                 '--param-steps', '3', *SMALL_GRID])
    assert result.exit_code == 0, result.output
    header, rows = csv_body(result.output)
    assert header == 'param,epsilon'
    assert [row[0] for row in rows] == ['0', '0.5', '1']
    assert float(rows[0][1]) == 0.0
    assert float(rows[1][1]) > 0
    meta = headers(result.output)
    assert meta['command'] == 'sweep'
    assert meta['channel'] == 'bitflip'
    assert meta['rt'] == '0.95'
    assert meta['mode'] == 'projected'
    assert meta['design'] == 'icosahedral'
    assert meta['out'] == '-'


def test_sweep_is_deterministic(runner):
    args = ['sweep', '--channel', 'phasedamp', '--t', '3', '--param-steps', '4', *SMALL_GRID]
    assert runner.invoke(args=args).output == runner.invoke(args=args).output


def test_epsilon_uses_twelve_significant_digits(runner):
    result = runner.invoke(args=['sweep', '--channel', 'ampdamp', '--t', '2', '--param-start', '1',
                                 '--param-stop', '1', '--param-steps', '2', '--grid-n', '5'])
    assert result.exit_code == 0, result.output
    _, rows = csv_body(result.output)
    value = rows[0][1]
    assert len(value.replace('.', '').lstrip('0')) == 12
    assert float(value) == pytest.approx(1.0, abs=1e-6)


def test_depolarising_models_match(runner):
    outputs = []
    for model in ('before', 'after'):
        result = runner.invoke(args=['sweep', '--channel', 'depolarising', '--model', model, '--t', '4',
                                     '--param-steps', '5', *SMALL_GRID])
        assert result.exit_code == 0, result.output
        outputs.append([float(row[1]) for row in csv_body(result.output)[1]])
    assert outputs[0] == pytest.approx(outputs[1], abs=1e-10)


def test_sweep_writes_to_file(runner, tmp_path):
    out = tmp_path / 'sweep.csv'
    result = runner.invoke(args=['sweep', '--channel', 'bitflip', '--param-steps', '2', *SMALL_GRID,
                                 '--out', str(out)])
    assert result.exit_code == 0, result.output
    with open(out, encoding='utf-8') as fh:
        text = fh.read()
    assert text.startswith('# command=sweep\n')
    assert headers(text)['out'] == str(out)


@pytest.mark.parametrize('args,message', [
    (['--channel', 'erasure'], 'channel'),
    (['--channel', 'bitflip', '--param-stop', '1.5'], 'param_stop'),
    (['--channel', 'bitflip', '--param-steps', '1'], 'param_steps'),
    (['--channel', 'bitflip', '--t', '6'], 't'),
    (['--channel', 'bitflip', '--mode', 'loose'], 'mode'),
    (['--model', 'before'], 'channel'),
])
def test_sweep_rejects_invalid_arguments(runner, args, message):
    result = runner.invoke(args=['sweep', *args, *SMALL_GRID])
    assert result.exit_code == 2
    assert message in result.output


def test_design_below_requested_order_is_usage_error(runner):
    result = runner.invoke(args=['sweep', '--channel', 'bitflip', '--design', 'pauli', *SMALL_GRID])
    assert result.exit_code == 2
    assert 'certified to order 1' in result.output


def test_strict_mode_infeasible_exit_code(runner):
    result = runner.invoke(args=['sweep', '--channel', 'bitflip', '--param-stop', '0.5', '--param-steps', '2',
                                 '--grid-n', '3', '--mode', 'strict'])
    assert result.exit_code == 3
    _, rows = csv_body(result.output)
    assert rows[1][1] == 'inf'


def test_config_file_supplies_defaults(runner, tmp_path):
    config = tmp_path / 'bitflip.cfg'
    config.write_text('channel=bitflip\nparam-steps=3\nrt=0.5\ngrid-n=3\n')
    result = runner.invoke(args=['sweep', '--config', str(config)])
    assert result.exit_code == 0, result.output
    meta = headers(result.output)
    assert meta['channel'] == 'bitflip'
    assert meta['param_steps'] == '3'
    assert meta['rt'] == '0.5'

    result = runner.invoke(args=['sweep', '--config', str(config), '--channel', 'phaseflip'])
    assert headers(result.output)['channel'] == 'phaseflip'


def test_config_file_unknown_key(runner, tmp_path):
    config = tmp_path / 'bad.cfg'
    config.write_text('channel=bitflip\nradius=0.5\n')
    result = runner.invoke(args=['sweep', '--config', str(config)])
    assert result.exit_code == 2
    assert 'radius' in result.output


def test_ttable_rows(runner):
    result = runner.invoke(args=['ttable', '--channel', 'bitflip', '--param', '0.5', *SMALL_GRID])
    assert result.exit_code == 0, result.output
    header, rows = csv_body(result.output)
    assert header == 't,epsilon'
    assert [row[0] for row in rows] == ['1', '2', '3', '4', '5']
    assert float(rows[0][1]) == 0.0
    assert float(rows[3][1]) > float(rows[2][1])


def test_ttable_requires_param(runner):
    result = runner.invoke(args=['ttable', '--channel', 'bitflip', *SMALL_GRID])
    assert result.exit_code == 2
    assert 'param' in result.output


def test_ttable_turning_point_records_param(runner):
    result = runner.invoke(args=['ttable', '--channel', 'ampdamp', '--turning-point',
                                 '--param-steps', '5', '--rt', '0.95', '--grid-n', '3'])
    assert result.exit_code == 0, result.output
    meta = headers(result.output)
    assert meta['turning_point'] == '1'
    assert float(meta['param']) in (0.0, 0.25, 0.5, 0.75, 1.0)


def test_region_rows(runner):
    result = runner.invoke(args=['region', '--channel', 'depolarising', '--t', '2', '--param', '0',
                                 '--grid-n', '3'])
    assert result.exit_code == 0, result.output
    header, rows = csv_body(result.output)
    assert header == 'x,y,z,epsilon,accept'
    assert len(rows) == 7
    assert all(row[4] == '1' for row in rows)
    assert headers(result.output)['threshold'] == '0.5'


def test_truncation_rows(runner):
    result = runner.invoke(args=['truncation', '--channel', 'bitflip', '--axis', 'phi',
                                 '--param-steps', '2', '--grid-n', '3'])
    assert result.exit_code == 0, result.output
    header, rows = csv_body(result.output)
    assert header == 'truncation,param,epsilon'
    assert len(rows) == 24
    assert headers(result.output)['rt'] == '0.95'


def test_verify_passes(runner):
    result = runner.invoke(args=['verify'])
    assert result.exit_code == 0, result.output
    assert 'FAIL' not in result.output
    assert 'strict-mode obstruction' in result.output


def test_verify_without_oracle(app, runner):
    app.config['HAAR_ORACLE_ENABLED'] = False
    result = runner.invoke(args=['verify'])
    assert result.exit_code == 1
    assert 'FAIL  design order: icosahedral' in result.output


def test_verify_corrupted_ensemble_file(runner, tmp_path):
    lines = dump_ensemble(get_design('clifford')).splitlines()
    values = lines[4].split(',')
    values[3] = '0.25'
    lines[4] = ','.join(values)
    path = tmp_path / 'clifford.txt'
    path.write_text('\n'.join(lines) + '\n')
    result = runner.invoke(args=['verify', '--ensemble-file', str(path)])
    assert result.exit_code == 1
    assert f'FAIL  ensemble file: {path}' in result.output


def test_export_designs(runner, tmp_path):
    result = runner.invoke(args=['export-designs', '--folder', str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert sorted(os.listdir(tmp_path)) == ['clifford.txt', 'icosahedral.txt', 'pauli.txt']
