"""
Logging configuration for the decoupling toolkit.
"""

import logging
import sys
from logging.handlers import RotatingFileHandler

from decoupling_lab import config


def setup_logging(level: str = None):
    """Set up logging configuration.

    Args:
        level: Overrides DECOUPLING_LAB_LOG_LEVEL when given
    """
    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    console_formatter = logging.Formatter(
        '%(levelname)s: %(message)s'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, (level or config.LOG_LEVEL).upper()))

    try:
        file_handler = RotatingFileHandler(
            config.LOG_FILE,
            maxBytes=1024 * 1024,  # 1MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setFormatter(file_formatter)
        file_handler.setLevel(logging.DEBUG)
        root_logger.addHandler(file_handler)
    except OSError as e:
        print(f"WARNING: cannot open log file {config.LOG_FILE}: {e}", file=sys.stderr)

    # Console goes to stderr so result files can be piped from stdout
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(console_formatter)
    console_handler.setLevel(logging.INFO)
    root_logger.addHandler(console_handler)

    # Set specific logger levels for third-party modules
    logging.getLogger('numpy').setLevel(logging.WARNING)
    logging.getLogger('scipy').setLevel(logging.WARNING)

    # Numeric kernels are chatty at DEBUG
    logging.getLogger('decoupling_lab.tensor').setLevel(logging.INFO)
    logging.getLogger('decoupling_lab.sampling').setLevel(logging.INFO)

    logging.info("Logging system initialized")
