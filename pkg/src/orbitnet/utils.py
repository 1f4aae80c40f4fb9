import os
import logging
import sys

ORBITNET_LOG_LEVEL = os.getenv("ORBITNET_LOG_LEVEL", "INFO")
ORBITNET_TLE_PATH = os.getenv("ORBITNET_TLE_PATH", None)


def get_logger(log_name):
    logger = logging.getLogger(log_name)
    logger.setLevel(ORBITNET_LOG_LEVEL)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setLevel(ORBITNET_LOG_LEVEL)
        handler.setFormatter(logging.Formatter("%(name)s - %(levelname)s - %(message)s"))
        logger.addHandler(handler)
    return logger
