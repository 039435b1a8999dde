"""
Командная строка: подкоманды, RunConfig и коды выхода
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Sequence

import numpy as np

from src.blowdown.pohozaev import pohozaev_check
from src.blowdown.rescaling import blowdown_trend
from src.cli.serialization import dump_json, field_csv, format_float, read_field_csv, table_csv, write_text
from src.cli.verify import format_table, run_verification
from src.config import Config
from src.database.models import Database
from src.energy.monotonicity import energy_profile
from src.energy.negative import negative_energy_profile
from src.errors import DomainError, InputFormatError, LaneEmdenError
from src.exponents.constants import ExtendedReal, ProblemParams, derive_constants
from src.exponents.stability import (
    min_stable_dimension,
    negative_exponent_condition,
    stability_predicates,
    triviality_hypothesis,
)
from src.navierbvp.solver import NavierSolver, StepControl
from src.radialode.integrator import IntegrationConfig
from src.radialode.shooting import shoot_entire

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

FORMAT_JSON = 'json'
FORMAT_CSV = 'csv'

COMMANDS = ('exponents', 'shoot', 'energy', 'blowdown', 'pohozaev', 'branch', 'verify-all', 'history')

# Формат по умолчанию: CSV-таблица для отчетов, JSON-сводка для остальных
DEFAULT_FORMATS = {'verify-all': FORMAT_CSV, 'history': FORMAT_CSV}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser с однострочным кодом ошибки на stderr"""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"E_USAGE: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    """Разобранные аргументы одной команды"""

    command: str
    params: Optional[ProblemParams]
    integration: IntegrationConfig
    output_format: str = FORMAT_JSON
    output_path: Optional[Path] = None
    database_url: str = field(default_factory=lambda: Config.DATABASE_URL)
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"неизвестная команда {self.command}")
        if self.output_format not in (FORMAT_JSON, FORMAT_CSV):
            raise DomainError(f"неизвестный формат вывода {self.output_format}")
        tol = self.options.get('tol')
        if tol is not None and tol <= 0:
            raise DomainError(f"допуск должен быть положительным, получено {tol}")

    def require_params(self) -> ProblemParams:
        if self.params is None:
            raise InputFormatError(f"{self.command}: нужны --n и --p")
        return self.params


# --- разбор аргументов ---

def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидалось число, получено '{text}'")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"ожидалось положительное число, получено {text}")
    return value


def _float_list(text: str) -> tuple:
    try:
        values = tuple(float(item) for item in text.split(',') if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидался список чисел через запятую, получено '{text}'")
    if not values or any(value <= 0 for value in values):
        raise argparse.ArgumentTypeError(f"нужны положительные значения, получено '{text}'")
    return values


def _radii_range(text: str) -> np.ndarray:
    """r1:r2:steps - геометрическая сетка из steps точек"""
    parts = text.split(':')
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"ожидался формат r1:r2:steps, получено '{text}'")
    try:
        r1, r2, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидался формат r1:r2:steps, получено '{text}'")
    if not (0 < r1 < r2) or steps < 2:
        raise argparse.ArgumentTypeError(f"нужно 0 < r1 < r2 и steps ≥ 2, получено '{text}'")
    return np.geomspace(r1, r2, steps)


def build_parser() -> CliParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', help='подробный лог (DEBUG)')
    common.add_argument('--output', type=Path, help='куда записать CSV')
    common.add_argument('--database', help='URL базы данных (по умолчанию DATABASE_URL)')
    formats = common.add_mutually_exclusive_group()
    formats.add_argument('--json', dest='output_format', action='store_const', const=FORMAT_JSON)
    formats.add_argument('--csv', dest='output_format', action='store_const', const=FORMAT_CSV)

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument('--n', type=int, required=True, help='размерность')
    problem.add_argument('--p', type=float, required=True, help='показатель нелинейности')

    field_input = argparse.ArgumentParser(add_help=False)
    field_input.add_argument('--input', type=Path, required=True, help='CSV поля (r,u,du,v,dv[,volInt,vsqInt])')

    parser = CliParser(prog='lane-emden', description='Численные проверки для Δ²u = |u|^{p-1}u')
    commands = parser.add_subparsers(dest='command', required=True)

    exponents = commands.add_parser('exponents', parents=[common, problem], help='константы и предикаты')

    shoot = commands.add_parser('shoot', parents=[common, problem], help='целое радиальное решение стрельбой')
    shoot.add_argument('--a', type=_positive_float, default=1.0, help='u(0)')
    shoot.add_argument('--r-max', type=_positive_float, help='правый конец интегрирования')
    shoot.add_argument('--tol', type=_positive_float, help='относительная ширина интервала b')

    energy = commands.add_parser('energy', parents=[common, problem, field_input], help='профиль E(r)')
    energy.add_argument('--radii', type=_radii_range, required=True, help='r1:r2:steps')
    energy.add_argument('--negative-exponent', action='store_true', help='энергия для Δ²u = -u^{-p}')
    energy.add_argument('--tol', type=_positive_float, help='относительная точность поля для slack')

    blowdown = commands.add_parser('blowdown', parents=[common, problem, field_input], help='растяжения u^λ')
    blowdown.add_argument('--lambdas', type=_float_list, default=(1.0, 2.0, 4.0, 8.0))
    blowdown.add_argument('--r1', type=_positive_float, default=1.0)
    blowdown.add_argument('--r2', type=_positive_float, default=2.0)

    pohozaev = commands.add_parser('pohozaev', parents=[common, problem, field_input], help='тождество Похожаева')
    pohozaev.add_argument('--R', dest='radii', type=_float_list, default=(1.0, 5.0, 20.0))
    pohozaev.add_argument('--tol', type=_positive_float, default=1e-6, help='допуск относительной невязки')

    branch = commands.add_parser('branch', parents=[common, problem], help='ветвь задачи Навье')
    branch.add_argument('--grid', type=int, help='число узлов N')
    branch.add_argument('--max-arclength', type=_positive_float, default=StepControl.max_arclength)
    branch.add_argument('--max-steps', type=int, default=StepControl.max_steps)
    branch.add_argument('--store', action='store_true', help='сохранить ветвь в базу')

    verify = commands.add_parser('verify-all', parents=[common, problem], help='полный набор проверок')
    verify.add_argument('--a', type=_positive_float, default=1.0, help='u(0) решения стрельбы')
    verify.add_argument('--with-branch', action='store_true', help='добавить проверку ветви Навье')
    verify.add_argument('--grid', type=int, help='сетка ветви (вторая сетка вдвое грубее)')
    verify.add_argument('--store', action='store_true', help='сохранить отчет в базу')

    history = commands.add_parser('history', parents=[common], help='сохраненные прогоны')
    history.add_argument('--limit', type=int, default=20)
    history.add_argument('--branch', type=int, help='показать сохраненную ветвь по id')
    history.add_argument('--clear', action='store_true', help='удалить все сохраненные записи')

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Собрать RunConfig; ошибки параметров задачи - DomainError"""
    values = vars(args)
    params = None
    if values.get('n') is not None and values.get('p') is not None:
        params = ProblemParams(n=args.n, p=args.p)
    integration = IntegrationConfig.from_config(r_max=values.get('r_max'))
    reserved = {'command', 'n', 'p', 'output', 'output_format', 'database', 'verbose', 'r_max'}
    return RunConfig(
        command=args.command,
        params=params,
        integration=integration,
        output_format=args.output_format or DEFAULT_FORMATS.get(args.command, FORMAT_JSON),
        output_path=args.output,
        database_url=args.database or Config.DATABASE_URL,
        options={key: value for key, value in values.items() if key not in reserved},
    )


# --- команды ---

def _emit(config: RunConfig, table: str, payload: dict, schema: str, default_name: Optional[str] = None):
    """
    CSV в файл или на stdout, JSON-сводка на stdout

    В режиме --csv таблица идет на stdout, если --output не задан.
    В режиме JSON таблица пишется в --output или в OUTPUT_DIR/default_name.
    """
    if config.output_format == FORMAT_CSV:
        if config.output_path is not None:
            write_text(config.output_path, table)
        else:
            sys.stdout.write(table)
        return
    path = config.output_path
    if path is None and default_name is not None:
        path = Path(Config.OUTPUT_DIR) / default_name
    if path is not None:
        write_text(path, table)
    payload['output'] = str(path) if path is not None else None
    sys.stdout.write(dump_json(payload, schema) + '\n')


def _csv_cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, ExtendedReal):
        return str(value) if not value.is_finite else format_float(value.value)
    if isinstance(value, int):
        return str(value)
    return format_float(value)


def run_exponents(config: RunConfig) -> int:
    params = config.require_params()
    constants = derive_constants(params)
    payload: Dict[str, Any] = {item.name: getattr(constants, item.name) for item in fields(constants)}
    if params.is_supercritical:
        stable, above_pc, above_np = stability_predicates(params)
    else:
        stable = above_pc = above_np = None
    payload.update({
        'singularStable': stable,
        'exceedsJosephLundgren': above_pc,
        'aboveMinStableDimension': above_np,
        'minStableDimension': min_stable_dimension(params.p),
        'trivialityHypothesis': triviality_hypothesis(params),
        'negativeExponentCondition': negative_exponent_condition(params),
    })
    if config.output_format == FORMAT_CSV:
        table = table_csv(('field', 'value'), [(key, _csv_cell(value)) for key, value in payload.items()])
        if config.output_path is not None:
            write_text(config.output_path, table)
        else:
            sys.stdout.write(table)
        return EXIT_OK
    sys.stdout.write(dump_json(payload, 'exponents') + '\n')
    return EXIT_OK


def run_shoot(config: RunConfig) -> int:
    params = config.require_params()
    a = config.options['a']
    result = shoot_entire(params, a, config.integration, config.options.get('tol'))
    payload = {
        'n': params.n,
        'p': params.p,
        'a': a,
        'bStar': result.b_star,
        'bracket': list(result.bracket),
        'bracketEvents': list(result.bracket_events),
        'iterations': result.iterations,
        'converged': result.converged,
        'trustRadius': result.trust_radius,
        'decayExponent': result.decay_exponent,
        'expectedDecay': result.expected_decay,
        'amplitudeRatio': result.amplitude_ratio,
        'event': result.field.event,
        'samples': len(result.field),
    }
    _emit(config, field_csv(result.field), payload, 'shoot', f"shoot_n{params.n}_p{params.p:g}_a{a:g}.csv")
    return EXIT_OK if result.converged else EXIT_FAILURE


def run_energy(config: RunConfig) -> int:
    params = config.require_params()
    negative = bool(config.options.get('negative_exponent'))
    radial = read_field_csv(config.options['input'], params, negative=negative)
    rel_tol = config.options.get('tol') or config.integration.rel_tol
    radii = config.options['radii']
    if negative:
        profile = negative_energy_profile(radial, radii, rel_tol)
    else:
        profile = energy_profile(radial, radii, rel_tol)
    payload = {
        'n': params.n,
        'p': params.p,
        'negativeExponent': negative,
        'count': len(profile.radii),
        'monotone': profile.monotone,
        'boundHolds': profile.bound_holds,
        'minDefect': profile.min_defect,
    }
    table = table_csv(('r', 'E', 'dE', 'lowerBound'), zip(profile.radii, profile.E, profile.dE, profile.lower_bound))
    _emit(config, table, payload, 'energy')
    return EXIT_OK if profile.monotone and profile.bound_holds else EXIT_FAILURE


def run_blowdown(config: RunConfig) -> int:
    params = config.require_params()
    radial = read_field_csv(config.options['input'], params)
    r1, r2 = config.options['r1'], config.options['r2']
    samples = blowdown_trend(radial, config.options['lambdas'], r1, r2)
    deviations = [sample.deviation for sample in samples]
    payload = {
        'n': params.n,
        'p': params.p,
        'r1': r1,
        'r2': r2,
        'samples': [{'lambda': s.lam, 'deviation': s.deviation, 'energyGap': s.energy_gap} for s in samples],
        'deviationNonincreasing': all(b <= a * (1 + 1e-8) for a, b in zip(deviations, deviations[1:])),
    }
    table = table_csv(('lambda', 'deviation', 'energyGap'), [(s.lam, s.deviation, s.energy_gap) for s in samples])
    _emit(config, table, payload, 'blowdown')
    return EXIT_OK


def run_pohozaev(config: RunConfig) -> int:
    params = config.require_params()
    radial = read_field_csv(config.options['input'], params)
    checks = [pohozaev_check(radial, R) for R in config.options['radii']]
    worst = max(check.relative for check in checks)
    tol = config.options['tol']
    payload = {
        'n': params.n,
        'p': params.p,
        'tolerance': tol,
        'maxRelative': worst,
        'passed': worst <= tol,
        'checks': [
            {'R': c.R, 'lhs': c.lhs, 'rhs': c.rhs, 'residual': c.residual, 'relative': c.relative}
            for c in checks
        ],
    }
    table = table_csv(
        ('R', 'lhs', 'rhs', 'residual', 'relative'),
        [(c.R, c.lhs, c.rhs, c.residual, c.relative) for c in checks],
    )
    _emit(config, table, payload, 'pohozaev')
    return EXIT_OK if worst <= tol else EXIT_FAILURE


def run_branch(config: RunConfig) -> int:
    params = config.require_params()
    step = StepControl(
        max_arclength=config.options['max_arclength'],
        max_steps=config.options['max_steps'],
    )
    solver = NavierSolver(params, config.options.get('grid'))
    branch = solver.trace_branch(step)
    rows = [(pt.arclength, pt.lam, pt.sup_norm, pt.eig_min, pt.residual) for pt in branch.points]
    payload = {
        'n': params.n,
        'p': params.p,
        'grid': branch.grid_size,
        'lambdaStar': branch.lambda_star,
        'foldIndex': branch.fold_index,
        'foldDetected': branch.fold_detected,
        'foldArclength': branch.fold_arclength,
        'supNormStar': branch.sup_norm_star,
        'points': len(branch.points),
    }
    if config.options.get('store'):
        payload['storedId'] = Database(config.database_url).save_branch(
            n=params.n,
            p=params.p,
            grid=branch.grid_size,
            lambda_star=branch.lambda_star,
            fold_index=branch.fold_index,
            fold_detected=branch.fold_detected,
            points=[list(row[:4]) for row in rows],
        )
    table = table_csv(('arclength', 'lambda', 'supNorm', 'eigMin', 'residual'), rows)
    _emit(config, table, payload, 'branch', f"branch_n{params.n}_p{params.p:g}_N{branch.grid_size}.csv")
    return EXIT_OK


def run_verify_all(config: RunConfig) -> int:
    params = config.require_params()
    report = run_verification(
        params,
        a=config.options['a'],
        cfg=config.integration,
        with_branch=bool(config.options.get('with_branch')),
        branch_grid=config.options.get('grid'),
    )
    payload = report.to_payload()
    if config.options.get('store'):
        Database(config.database_url).save_run('verify-all', params.n, params.p, report.passed, payload)
    if config.output_format == FORMAT_JSON:
        sys.stdout.write(dump_json(payload, 'verify') + '\n')
    elif config.output_path:
        write_text(config.output_path, format_table(report))
    else:
        sys.stdout.write(format_table(report))
    return EXIT_OK if report.passed else EXIT_FAILURE


def _branch_entry(record) -> dict:
    return {
        'id': record.id,
        'n': record.n,
        'p': record.p,
        'grid': record.grid,
        'lambdaStar': record.lambda_star,
        'foldIndex': record.fold_index,
        'foldDetected': bool(record.fold_detected),
        'createdAt': record.created_at.isoformat() if record.created_at else None,
        'points': record.points,
    }


def run_history(config: RunConfig) -> int:
    database = Database(config.database_url)
    payload = {}
    if config.options.get('clear'):
        payload['cleared'] = database.clear_all()
        logger.info(f"Архив очищен: удалено записей {payload['cleared']}")

    branch_id = config.options.get('branch')
    if branch_id is not None:
        record = database.get_branch(branch_id)
        if record is None:
            raise InputFormatError(f"ветвь id={branch_id} не найдена в {config.database_url}")
        payload['branch'] = _branch_entry(record)

    payload['runs'] = [
        {
            'id': run.id,
            'command': run.command,
            'n': run.n,
            'p': run.p,
            'passed': run.passed,
            'createdAt': run.created_at.isoformat() if run.created_at else None,
        }
        for run in database.list_runs(config.options.get('limit'))
    ]
    if config.output_format == FORMAT_JSON:
        sys.stdout.write(dump_json(payload, 'history') + '\n')
    elif 'branch' in payload:
        sys.stdout.write(table_csv(('arclength', 'lambda', 'supNorm', 'eigMin'), payload['branch']['points']))
    else:
        sys.stdout.write(table_csv(('id', 'command', 'n', 'p', 'passed', 'createdAt'), [
            (str(e['id']), e['command'], str(e['n']), e['p'], 'true' if e['passed'] else 'false', e['createdAt'] or '')
            for e in payload['runs']
        ]))
    return EXIT_OK


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    'exponents': run_exponents,
    'shoot': run_shoot,
    'energy': run_energy,
    'blowdown': run_blowdown,
    'pohozaev': run_pohozaev,
    'branch': run_branch,
    'verify-all': run_verify_all,
    'history': run_history,
}


def run(config: RunConfig) -> int:
    """Выполнить команду; результаты на stdout и в файлы, код выхода 0/1"""
    logger.debug(f"Команда {config.command}: {config.params}")
    return HANDLERS[config.command](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Разобрать аргументы и выполнить команду

    Returns:
        0 - успех, 1 - проверка не прошла или расчет сорвался,
        2 - ошибка использования (аргументы, область параметров, входной файл)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return run(config_from_args(args))
    except (DomainError, InputFormatError) as e:
        sys.stderr.write(e.one_line() + '\n')
        return EXIT_USAGE
    except LaneEmdenError as e:
        sys.stderr.write(e.one_line() + '\n')
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Критическая ошибка: {e}", exc_info=True)
        sys.stderr.write(f"E_INTERNAL: {' '.join(str(e).split())}\n")
        return EXIT_FAILURE
