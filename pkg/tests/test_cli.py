import csv
import json

import numpy as np
import pytest

from src.cli.app import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, config_from_args, main
from src.cli.serialization import (
    dump_json,
    field_csv,
    json_value,
    read_field_csv,
    table_csv,
    write_text,
)
from src.cli.verify import CHECK_CLAIMS, VerificationSuite
from src.database.models import Database
from src.errors import InputFormatError, VerificationFailure
from src.exponents.constants import ExtendedReal, ProblemParams
from src.radialode.integrator import IntegrationConfig, singular_field


@pytest.fixture(scope='module')
def shoot_csv(tmp_path_factory, shot_13_3):
    path = tmp_path_factory.mktemp('fields') / 'shoot_13_3.csv'
    write_text(path, field_csv(shot_13_3.field))
    return path


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_exponents_json_reports_infinite_critical_exponent(capsys):
    assert main(['exponents', '--n', '12', '--p', '5', '--json']) == EXIT_OK
    payload = _json_output(capsys)
    assert payload['pC'] == 'inf'
    assert payload['pS'] == pytest.approx(2.0)
    assert payload['singularStable'] is False
    assert payload['exceedsJosephLundgren'] is False
    assert payload['minStableDimension'] > 12


def test_exponents_subcritical_has_null_predicates(capsys):
    assert main(['exponents', '--n', '6', '--p', '3']) == EXIT_OK
    payload = _json_output(capsys)
    assert payload['singularStable'] is None
    assert payload['K0'] == pytest.approx(0.0, abs=1e-12)


def test_exponents_csv(capsys):
    assert main(['exponents', '--n', '13', '--p', '3', '--csv']) == EXIT_OK
    rows = dict(csv.reader(capsys.readouterr().out.splitlines()[1:]))
    assert float(rows['K0']) == pytest.approx(504.0)
    assert rows['singularStable'] == 'false'


@pytest.mark.parametrize('argv', [
    ['exponents', '--n', 'twelve', '--p', '5'],
    ['exponents', '--p', '5'],
    ['unknown-command'],
    [],
    ['exponents', '--n', '12', '--p', '5', '--json', '--csv'],
    ['energy', '--n', '13', '--p', '3', '--input', 'x.csv', '--radii', '2:1:5'],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert 'E_USAGE' in capsys.readouterr().err


def test_domain_error_exit_code(capsys):
    assert main(['exponents', '--n', '0', '--p', '3']) == EXIT_USAGE
    assert 'E_DOMAIN' in capsys.readouterr().err
    assert main(['shoot', '--n', '6', '--p', '3']) == EXIT_USAGE


def test_missing_input_file(tmp_path, capsys):
    argv = ['pohozaev', '--n', '13', '--p', '3', '--input', str(tmp_path / 'missing.csv')]
    assert main(argv) == EXIT_USAGE
    assert 'E_INPUT' in capsys.readouterr().err


def test_default_formats():
    parser = build_parser()
    assert config_from_args(parser.parse_args(['verify-all', '--n', '13', '--p', '3'])).output_format == 'csv'
    assert config_from_args(parser.parse_args(['history'])).output_format == 'csv'
    assert config_from_args(parser.parse_args(['exponents', '--n', '13', '--p', '3'])).output_format == 'json'
    config = config_from_args(parser.parse_args(['shoot', '--n', '13', '--p', '3', '--r-max', '50']))
    assert config.integration.r_max == 50.0
    assert config.options['a'] == 1.0


def test_shoot_writes_field_csv(tmp_path, capsys):
    output = tmp_path / 'shoot.csv'
    assert main(['shoot', '--n', '13', '--p', '3', '--output', str(output)]) == EXIT_OK
    payload = _json_output(capsys)
    assert payload['converged'] is True
    assert payload['bStar'] < 0
    assert payload['output'] == str(output)
    with open(output, newline='') as handle:
        header = next(csv.reader(handle))
    assert header == ['r', 'u', 'du', 'v', 'dv', 'volInt', 'vsqInt']


def test_energy_from_csv(shoot_csv, tmp_path, capsys):
    argv = [
        'energy', '--n', '13', '--p', '3', '--input', str(shoot_csv),
        '--radii', '0.1:2:12', '--output', str(tmp_path / 'energy.csv'),
    ]
    assert main(argv) == EXIT_OK
    payload = _json_output(capsys)
    assert payload['count'] == 12
    assert payload['monotone'] is True
    assert payload['boundHolds'] is True


def test_pohozaev_from_csv(shoot_csv, capsys):
    argv = ['pohozaev', '--n', '13', '--p', '3', '--input', str(shoot_csv), '--R', '0.5,1,2', '--csv']
    assert main(argv) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'R,lhs,rhs,residual,relative'
    assert len(lines) == 4
    assert all(float(line.split(',')[-1]) <= 1e-6 for line in lines[1:])


def test_pohozaev_tolerance_failure(shoot_csv, capsys):
    argv = ['pohozaev', '--n', '13', '--p', '3', '--input', str(shoot_csv), '--R', '1', '--tol', '1e-300', '--json']
    assert main(argv) in (EXIT_OK, EXIT_FAILURE)
    payload = _json_output(capsys)
    assert payload['passed'] == (payload['maxRelative'] <= 1e-300)


def test_blowdown_from_csv(shoot_csv, tmp_path, capsys):
    argv = [
        'blowdown', '--n', '13', '--p', '3', '--input', str(shoot_csv),
        '--lambdas', '0.5,1', '--r1', '0.5', '--r2', '1', '--output', str(tmp_path / 'blowdown.csv'),
    ]
    assert main(argv) == EXIT_OK
    payload = _json_output(capsys)
    assert [sample['lambda'] for sample in payload['samples']] == [0.5, 1.0]
    assert all(sample['deviation'] > 0 for sample in payload['samples'])


def test_history_lists_stored_runs(database_url, capsys):
    assert main(['history', '--database', database_url, '--json']) == EXIT_OK
    assert _json_output(capsys) == {'runs': []}

    Database(database_url).save_run('verify-all', 13, 3.0, True, {'n': 13})
    assert main(['history', '--database', database_url]) == EXIT_OK
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ['id', 'command', 'n', 'p', 'passed', 'createdAt']
    assert rows[1][1:3] == ['verify-all', '13']
    assert rows[1][4] == 'true'


def test_history_shows_stored_branch_and_clears(database_url, capsys):
    database = Database(database_url)
    branch_id = database.save_branch(6, 3.0, 50, 420.5, 1, True, [[0.1, 100.0, 0.2, 5.0], [0.2, 420.5, 0.8, -1.0]])
    database.save_run('verify-all', 6, 3.0, False, {'n': 6})

    assert main(['history', '--database', database_url, '--branch', str(branch_id), '--json']) == EXIT_OK
    payload = _json_output(capsys)
    assert payload['branch']['lambdaStar'] == pytest.approx(420.5)
    assert payload['branch']['points'][1] == [0.2, 420.5, 0.8, -1.0]
    assert len(payload['runs']) == 1

    assert main(['history', '--database', database_url, '--branch', str(branch_id)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'arclength,lambda,supNorm,eigMin'
    assert len(lines) == 3

    assert main(['history', '--database', database_url, '--branch', str(branch_id + 100)]) == EXIT_USAGE
    assert 'E_INPUT' in capsys.readouterr().err

    assert main(['history', '--database', database_url, '--clear', '--json']) == EXIT_OK
    assert _json_output(capsys) == {'cleared': 2, 'runs': []}


def test_read_field_csv_round_trip(shoot_csv, shot_13_3):
    field = read_field_csv(shoot_csv, ProblemParams(n=13, p=3.0))
    assert field.event == 'file'
    assert field.origin_start == field.r_min
    assert np.allclose(field.u, shot_13_3.field.u, rtol=1e-15, atol=0)


def test_read_field_csv_rejects_bad_files(tmp_path):
    params = ProblemParams(n=13, p=3.0)
    missing_columns = tmp_path / 'columns.csv'
    missing_columns.write_text('r,u\n1,2\n')
    with pytest.raises(InputFormatError):
        read_field_csv(missing_columns, params)

    short = tmp_path / 'short.csv'
    short.write_text('r,u,du,v,dv\n' + '1,1,0,0,0\n' * 3)
    with pytest.raises(InputFormatError):
        read_field_csv(short, params)

    text = tmp_path / 'text.csv'
    text.write_text('r,u,du,v,dv\n' + ''.join(f"{k},a,0,0,0\n" for k in range(1, 7)))
    with pytest.raises(InputFormatError):
        read_field_csv(text, params)


def test_field_csv_without_integrals():
    field = singular_field(ProblemParams(n=16, p=3.0), np.geomspace(1.0, 2.0, 5))
    lines = field_csv(field, with_integrals=False).splitlines()
    assert lines[0] == 'r,u,du,v,dv'
    assert len(lines) == 6
    assert float(lines[1].split(',')[1]) == pytest.approx(np.sqrt(960.0))


def test_json_value_conversions():
    assert json_value({'a': np.float64('inf'), 'b': [np.int64(3), float('nan')], 'c': ExtendedReal.infinity()}) == {
        'a': 'inf',
        'b': [3, 'nan'],
        'c': 'inf',
    }
    assert json_value(np.bool_(True)) is True


def test_schema_violation_is_reported():
    with pytest.raises(VerificationFailure):
        dump_json({'runs': [{'id': 'x'}]}, 'history')


def test_table_csv_precision():
    text = table_csv(('x',), [(0.1,), (1.0 / 3.0,)])
    assert text.splitlines() == ['x', '0.10000000000000001', '0.33333333333333331']


@pytest.mark.slow
def test_verify_all_passes_for_unstable_pair(database_url, capsys):
    argv = ['verify-all', '--n', '13', '--p', '3', '--json', '--store', '--database', database_url]
    assert main(argv) == EXIT_OK
    payload = _json_output(capsys)
    assert payload['passed'] is True
    assert [check['key'] for check in payload['checks']][:3] == [
        'exponent-consistency', 'singular-exactness', 'homogeneous-energy',
    ]
    assert all(check['claim'] == CHECK_CLAIMS[check['key']] for check in payload['checks'])
    assert len(Database(database_url).list_runs()) == 1


@pytest.mark.slow
def test_verify_all_table(capsys):
    code = main(['verify-all', '--n', '13', '--p', '30'])
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ['key', 'status', 'claim', 'detail']
    assert len(rows) == 12
    assert all(row[2] == CHECK_CLAIMS[row[0]] for row in rows[1:-1])
    assert rows[-1][:3] == ['total', rows[-1][1], 'n=13 p=30.0']
    assert code == (EXIT_OK if rows[-1][1] == 'PASS' else EXIT_FAILURE)


def test_growth_bound_fails_on_short_trust_radius():
    suite = VerificationSuite(ProblemParams(n=13, p=3.0), cfg=IntegrationConfig.from_config(r_max=30.0))
    result = suite.check_growth_bound()
    assert result.key == 'growth-bound'
    assert not result.passed
    assert result.claim == CHECK_CLAIMS['growth-bound']
