import json
import logging
import os
import sys
import time
from logging.handlers import RotatingFileHandler

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class StructuredLogger:
    """JSON event logger on top of a standard module logger"""

    def __init__(self, name):
        self.logger = logging.getLogger(name)

    def debug(self, message, **kwargs):
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(self._format_message(message, **kwargs))

    def info(self, message, **kwargs):
        self.logger.info(self._format_message(message, **kwargs))

    def error(self, message, **kwargs):
        self.logger.error(self._format_message(message, **kwargs))

    def warning(self, message, **kwargs):
        self.logger.warning(self._format_message(message, **kwargs))

    def _format_message(self, message, **kwargs):
        log_entry = {
            "message": message,
            "timestamp": time.time(),
            **kwargs
        }
        return json.dumps(log_entry, default=str)


def setup_logging(level=None, log_file=None):
    """Configure the root logger; diagnostics go to stderr, never stdout"""
    level = level or os.getenv("WEAVER_LOG_LEVEL", "WARNING")
    log_file = log_file or os.getenv("WEAVER_LOG_FILE")

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(RotatingFileHandler(log_file, maxBytes=10485760, backupCount=5))

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
