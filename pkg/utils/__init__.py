from .utils import log_exectime, env_int, env_str, configure_logging
