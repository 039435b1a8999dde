"""
Конфигурация приложения
"""
import os
from dotenv import load_dotenv

# Загружаем переменные окружения
load_dotenv()


class Config:
    """Основные настройки численных расчетов"""

    # Интегратор радиального ОДУ
    ORIGIN_START = float(os.getenv('ORIGIN_START', '1e-6'))
    BLOWUP_FACTOR = float(os.getenv('BLOWUP_FACTOR', '1e6'))
    REL_TOL = float(os.getenv('REL_TOL', '1e-12'))
    ABS_TOL = float(os.getenv('ABS_TOL', '1e-30'))
    R_MAX = float(os.getenv('R_MAX', '100'))
    SAMPLES_PER_DECADE = int(os.getenv('SAMPLES_PER_DECADE', '200'))

    # Стрельба: относительная ширина итогового интервала бисекции
    SHOOTING_TOL = float(os.getenv('SHOOTING_TOL', '1e-14'))

    # Задача Навье на единичном шаре
    NAVIER_GRID = int(os.getenv('NAVIER_GRID', '200'))
    NEWTON_TOL = float(os.getenv('NEWTON_TOL', '1e-10'))

    # Выгрузки
    OUTPUT_DIR = os.getenv('OUTPUT_DIR', 'output')

    # База данных (архив прогонов)
    DATABASE_URL = os.getenv('DATABASE_URL', 'sqlite:///lane_emden_runs.db')

    # Логирование
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

    @classmethod
    def validate(cls):
        """Проверка корректности численных настроек"""
        checks = {
            'ORIGIN_START': 0 < cls.ORIGIN_START < 1e-2,
            'BLOWUP_FACTOR': cls.BLOWUP_FACTOR > 1,
            'REL_TOL': 0 < cls.REL_TOL < 1,
            'ABS_TOL': cls.ABS_TOL > 0,
            'R_MAX': cls.R_MAX > 10 * cls.ORIGIN_START,
            'SAMPLES_PER_DECADE': cls.SAMPLES_PER_DECADE >= 10,
            'SHOOTING_TOL': 0 < cls.SHOOTING_TOL < 1,
            'NAVIER_GRID': cls.NAVIER_GRID >= 8,
            'NEWTON_TOL': cls.NEWTON_TOL > 0,
        }

        invalid = [key for key, ok in checks.items() if not ok]

        if invalid:
            raise ValueError(
                f"Некорректные значения переменных окружения: {', '.join(invalid)}\n"
                f"Сверьтесь с .env.example и исправьте значения"
            )
