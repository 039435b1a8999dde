"""
CSV и JSON: фиксированный порядок полей, 17 значащих цифр, проверка по схемам
"""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np
from jsonschema import Draft202012Validator

from src.errors import InputFormatError, VerificationFailure
from src.exponents.constants import ExtendedReal, ProblemParams
from src.radialode.field import RadialField
from src.radialode.nonlinearity import NegativePowerNonlinearity, PowerNonlinearity

logger = logging.getLogger(__name__)

SCHEMA_DIR = Path(__file__).resolve().parents[2] / 'schemas'

FIELD_COLUMNS = ('r', 'u', 'du', 'v', 'dv')
INTEGRAL_COLUMNS = ('volInt', 'vsqInt')


def format_float(value: float) -> str:
    return format(float(value), '.17g')


def json_value(value: Any) -> Any:
    """Привести значение к JSON: бесконечности и NaN - строками, numpy - к python"""
    if isinstance(value, ExtendedReal):
        return value.to_json()
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, dict):
        return {str(key): json_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [json_value(item) for item in value]
    return value


def load_schema(name: str) -> dict:
    path = SCHEMA_DIR / f"{name}.schema.json"
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


def dump_json(payload: dict, schema_name: str) -> str:
    """
    Сериализовать и проверить по схеме schemas/<schema_name>.schema.json

    Raises:
        VerificationFailure: документ не соответствует схеме
    """
    document = json_value(payload)
    errors = list(Draft202012Validator(load_schema(schema_name)).iter_errors(document))
    if errors:
        details = '; '.join(f"{'/'.join(map(str, error.path)) or '<root>'}: {error.message}" for error in errors[:5])
        raise VerificationFailure(f"JSON не соответствует схеме {schema_name}: {details}")
    return json.dumps(document, indent=2, ensure_ascii=False)


def table_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    """CSV с одной строкой заголовка; числа с 17 значащими цифрами"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(value) if not isinstance(value, str) else value for value in row])
    return buffer.getvalue()


def write_text(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding='utf-8')
    logger.info(f"Записан файл {path}")


def field_csv(field: RadialField, with_integrals: bool = True) -> str:
    columns = field.columns()
    names = FIELD_COLUMNS + (INTEGRAL_COLUMNS if with_integrals else ())
    return table_csv(names, zip(*(columns[name] for name in names)))


def read_field_csv(path: Path, params: ProblemParams, negative: bool = False) -> RadialField:
    """
    Прочитать поле по контракту r,u,du,v,dv[,volInt,vsqInt]

    Отсутствующие интегралы восстанавливаются квадратурой. Нижняя
    граница надежности берется равной первому радиусу файла.
    """
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"файл {path} не найден")
    with open(path, newline='', encoding='utf-8') as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [name for name in FIELD_COLUMNS if name not in header]
        if missing:
            raise InputFormatError(f"{path}: нет столбцов {', '.join(missing)}")
        rows: List[dict] = list(reader)
    if len(rows) < 5:
        raise InputFormatError(f"{path}: нужно ≥ 5 строк, получено {len(rows)}")

    def column(name: str) -> Optional[np.ndarray]:
        if name not in header:
            return None
        try:
            return np.array([float(row[name]) for row in rows])
        except (TypeError, ValueError) as e:
            raise InputFormatError(f"{path}: нечисловое значение в столбце {name}: {e}") from e

    nonlinearity = NegativePowerNonlinearity(params.p) if negative else PowerNonlinearity(params.p)
    radii = column('r')
    return RadialField.from_samples(
        params,
        radii,
        column('u'),
        column('du'),
        column('v'),
        column('dv'),
        vol=column('volInt'),
        vsq=column('vsqInt'),
        nonlinearity=nonlinearity,
        origin_start=float(radii[0]),
        event='file',
    )
