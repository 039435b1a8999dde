"""
Главный файл приложения - точка входа
"""
import logging
import sys

import colorlog

from src.cli.app import EXIT_USAGE, main as cli_main
from src.config import Config


def setup_logging(level: str = 'INFO'):
    """Настройка логирования с цветным выводом в stderr (stdout занят CSV/JSON)"""
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'red,bg_white',
        }
    ))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        handlers=[handler]
    )

    # Уменьшаем уровень логирования для сторонних библиотек
    logging.getLogger('sqlalchemy').setLevel(logging.WARNING)


def main(argv=None):
    """Главная функция приложения"""
    setup_logging(Config.LOG_LEVEL)
    logger = logging.getLogger(__name__)

    try:
        # Валидируем конфигурацию
        Config.validate()
    except ValueError as e:
        logger.error(f"❌ Ошибка конфигурации: {e}")
        logger.error("Проверьте файл .env и сверьтесь с .env.example")
        return EXIT_USAGE

    return cli_main(argv)


if __name__ == "__main__":
    exit(main())
