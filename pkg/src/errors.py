"""
Исключения библиотеки со стабильными однострочными кодами
"""
from typing import Any, Optional


class LaneEmdenError(Exception):
    """Базовая ошибка расчетов"""

    code = 'E_GENERIC'

    def one_line(self) -> str:
        """Строка для stderr: код и сообщение без переносов"""
        message = ' '.join(str(self).split())
        return f"{self.code}: {message}"


class DomainError(LaneEmdenError, ValueError):
    """Параметры вне области определения операции"""

    code = 'E_DOMAIN'


class InputFormatError(LaneEmdenError):
    """Некорректный входной файл или аргумент"""

    code = 'E_INPUT'


class IntegrationFailure(LaneEmdenError):
    """Интегратор не смог продолжить (шаг исчез, NaN и т.п.)"""

    code = 'E_INTEGRATION'


class BracketNotFound(LaneEmdenError):
    """Оба конца интервала стрельбы дают один и тот же класс события"""

    code = 'E_BRACKET'


class SupportViolation(LaneEmdenError):
    """Пробная функция не финитна внутри сетки поля"""

    code = 'E_SUPPORT'


class GridRangeError(LaneEmdenError):
    """Радиус вне сетки поля"""

    code = 'E_RANGE'


class TooFewSamples(LaneEmdenError):
    """Недостаточно точек для оценки"""

    code = 'E_SAMPLES'


class NewtonDivergence(LaneEmdenError):
    """Метод Ньютона не сошелся"""

    code = 'E_NEWTON'


class ContinuationStall(LaneEmdenError):
    """Продолжение по параметру застряло; хранит последнюю хорошую точку"""

    code = 'E_STALL'

    def __init__(self, message: str, last_point: Optional[Any] = None):
        super().__init__(message)
        self.last_point = last_point


class VerificationFailure(LaneEmdenError):
    """Одна из проверок не прошла"""

    code = 'E_VERIFY'
