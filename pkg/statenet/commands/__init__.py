# Commands Package
# One handler per CLI subcommand, registered by name
from typing import Callable, Dict

from statenet.schemas.results import RunSummary
from statenet.schemas.run_config import RunConfig

Handler = Callable[[RunConfig], RunSummary]

COMMANDS: Dict[str, Handler] = {}


def command(name: str):
    """Register a subcommand handler"""
    def decorator(func: Handler) -> Handler:
        COMMANDS[name] = func
        return func
    return decorator


def load_handlers():
    """Import the handler modules so their decorators run"""
    from statenet.commands import experiments, pipeline, repro  # noqa: F401
    return COMMANDS
