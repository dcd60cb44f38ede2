"""
@file: logger.py
@time: 2026/10/17 10:40
@desc: global logger and decorators
"""

import sys
import logging
import time
import functools

from chainforge.init_utils import *
from chainforge.error_utils import (ChainforgeError, DegenerateSystemError, UnattainablePointError,
                                    InfeasibleExtensionError, IllPosedTargetError, VerificationError)

init_config = InitConfig()

logger = logging.getLogger("chainforge")
logger.setLevel(logging.DEBUG)

stream_handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(filename)s[line:%(lineno)d] - [%(funcName)s] - %(levelname)s: %('
                              'message)s')
stream_handler.setLevel(logging.INFO)
stream_handler.setFormatter(formatter)
logger.addHandler(stream_handler)

log_file_handler = None


def attach_file_handler():
    """Prepare the config directory and log to chainforge.log there, once per process."""
    global log_file_handler
    if log_file_handler is None:
        init_config.prepare()
        log_file_handler = logging.FileHandler(init_config.log_file)
        log_file_handler.setLevel(logging.DEBUG)
        log_file_handler.setFormatter(formatter)
        logger.addHandler(log_file_handler)
    return log_file_handler


def calculate(func):
    """Log the wall time of a command and hand back its result."""
    @functools.wraps(func)
    def main(*args, **kwargs):
        start = time.time()
        result = func(*args, **kwargs)
        logger.info("Func - {0} Total time: {1}s".format(func.__name__,
                                                         round(time.time() - start, 2)))
        return result
    return main


def set_verbose(verbose):
    stream_handler.setLevel(logging.DEBUG if verbose else logging.INFO)


def exit_on_error(func):
    """Map chainforge errors onto the command exit codes.

    Input and generic errors exit 1, unsolvable designs 2, failed
    verification 3.
    """
    @functools.wraps(func)
    def judge(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except VerificationError as e:
            logger.error(e)
            sys.exit(3)
        except (DegenerateSystemError, UnattainablePointError, InfeasibleExtensionError, IllPosedTargetError) as e:
            logger.error(e)
            sys.exit(2)
        except ChainforgeError as e:
            logger.error(e)
            sys.exit(1)
    return judge
