# swarm_resilience/utils/logging_config.py

"""
logging_config.py

Provides centralized logging configuration for the swarm resilience toolkit.
Log levels come from the application settings (see app_config) so the CLI and
library modules share one consistent logging setup.
"""
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

# Default configuration
DEFAULT_LOG_LEVEL = logging.INFO
DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DIRECTORY = "logs"
LOG_FILE_NAME = "swarm_resilience.log"

# Dictionary mapping string log level names to their numeric values
LOG_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


def get_log_level(level_name):
    """Convert string log level to numeric log level"""
    return LOG_LEVELS.get(str(level_name).upper(), DEFAULT_LOG_LEVEL)


def setup_logging(app_config=None, log_to_file=None, log_to_console=True, level=None):
    """
    Configure the root logger for the toolkit

    Args:
        app_config: Application configuration object with log settings
        log_to_file: Whether to log to a file (None defers to app_config)
        log_to_console: Whether to log to console
        level: Explicit level name overriding the configured one

    Returns:
        logging.Logger: Configured root logger
    """
    log_level = DEFAULT_LOG_LEVEL
    log_dir = Path(LOG_DIRECTORY)
    if app_config:
        try:
            log_level = get_log_level(app_config.get("System", "log_level", "INFO"))
            if log_to_file is None:
                log_to_file = app_config.get_bool("System", "log_to_file", False)
            log_dir = Path(app_config.get("System", "log_directory", LOG_DIRECTORY))
        except Exception as e:
            print(f"Error getting log settings from config: {e}")
    if level:
        log_level = get_log_level(level)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Remove any existing handlers
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    formatter = logging.Formatter(DEFAULT_LOG_FORMAT)

    if log_to_console:
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

    if log_to_file:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_dir / LOG_FILE_NAME, maxBytes=10_485_760, backupCount=5  # 10 MB
        )
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    return root_logger

