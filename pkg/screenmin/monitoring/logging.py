import logging
import os
from typing import Optional
import sys

log = logging.getLogger(__name__)

LOG_FORMAT = '[%(levelname)6s %(asctime)s, %(filename)17s, ln%(lineno)4s, in %(funcName)25s()] %(message)s'
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(
        log_file_path: Optional[os.PathLike] = None,
        log_level: str = "INFO",
        write_to_file_and_std_err: bool = True) -> logging.Logger:
    """
    Set up the logging for the app. Log records go to stderr so that stdout only carries command output.
    Parameters
    ----------
    log_file_path : Optional[os.PathLike]
        The path to log to. If not set will write to stderr.
    log_level : str
        The level at which to log, as a string. There are 6 available values,
        listed at https://docs.python.org/3/library/logging.html#logging-levels
    write_to_file_and_std_err: bool
        If set True will write to file and stderr
    """
    if log_file_path is not None:
        logging.basicConfig(
            filename=log_file_path,
            level=log_level,
            filemode='a',
            format=LOG_FORMAT,
            datefmt=LOG_DATE_FORMAT,
            force=True)
    else:
        logging.basicConfig(
            stream=sys.stderr,
            level=log_level,
            format=LOG_FORMAT,
            datefmt=LOG_DATE_FORMAT,
            force=True)

    if write_to_file_and_std_err and log_file_path is not None:  # also echo to stderr if file specified
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
        logging.getLogger().addHandler(stream_handler)

    log.info('Logging setup complete.')
    return log
