from .config import COMMANDS, RunConfig, Scales, load_config
from .runner import CommandRunner, build_experiment
