# -*- coding: utf-8 -*-

from logging import Formatter
from logging import getLogger
from logging import DEBUG
from logging.handlers import RotatingFileHandler
from sys import exc_info
from traceback import format_exception

from django.conf import settings

# The format for local logs.
LOGS_FORMAT = ("%(asctime)s "
               "%(name)s "
               "%(process)d "
               "%(thread)d "
               "%(levelname)s "
               "%(message)s")

# The log file used when the settings do not name one.
DEFAULT_LOG_FILE = "/tmp/roadaware.log"

# The maximum size in bytes for each local log file.
MAX_LOG_BYTES = 10 * 1024 * 1024


def get_log_file():
    """Returns the configured log file path."""

    if settings.configured:
        return getattr(settings, "ROADAWARE_LOG_FILE", DEFAULT_LOG_FILE)
    return DEFAULT_LOG_FILE


class Logs:
    """A helper for logging the stages of the localization pipeline."""

    def __init__(self, name, log_file=None):
        self.name = "roadaware.%s" % name
        self.log_file = log_file or get_log_file()
        self.local_logger, _ = self.get_local_logger(self.name, self.log_file)

    def get_local_logger(self, name, log_file):
        """Returns a local logger with a file handler."""

        handler = RotatingFileHandler(log_file, maxBytes=MAX_LOG_BYTES)
        handler.setFormatter(Formatter(LOGS_FORMAT))
        handler.setLevel(DEBUG)

        logger = getLogger(name)
        logger.setLevel(DEBUG)
        for old_handler in logger.handlers:
            old_handler.close()
        logger.handlers = [handler]

        return (logger, handler)

    def debug(self, text):
        """Logs at the DEBUG level."""

        self.local_logger.debug(text)

    def info(self, text):
        """Logs at the INFO level."""

        self.local_logger.info(text)

    def warn(self, text):
        """Logs at the WARNING level."""

        self.local_logger.warning(text)

    def error(self, text):
        """Logs at the ERROR level."""

        self.local_logger.error(text)

    def catch(self):
        """Logs the latest exception."""

        self.local_logger.critical(self.format_exception())

    def format_exception(self):
        """Grabs the latest exception and formats it."""

        exc_type, exc_value, exc_traceback = exc_info()
        exc_format = format_exception(exc_type, exc_value, exc_traceback)
        return "".join(exc_format).strip()
