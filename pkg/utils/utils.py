from loguru import logger
import os
import sys
import time
from dotenv import load_dotenv

load_dotenv()

DEFAULT_LOG_LEVEL = "INFO"


def log_exectime(func):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        exec_time = time.perf_counter() - start
        logger.info(f"{func.__name__} took {exec_time:.3f}s")
        return result

    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


def env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={value!r}")
        return default


def env_str(name: str, default: str) -> str:
    value = os.getenv(name)
    return default if value is None or value == "" else value


def configure_logging(level: str | None = None):
    """Route loguru to stderr at the requested level (flag > GWI_LOG_LEVEL > INFO)."""
    level = (level or env_str("GWI_LOG_LEVEL", DEFAULT_LOG_LEVEL)).upper()
    logger.remove()
    logger.add(sys.stderr, level=level)
    return level
