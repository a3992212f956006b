from functools import wraps
from hashlib import sha256
from pathlib import Path
from typing import Optional, Tuple

import click

from ConfigService import LabError, RunConfig, atomic_write_text, dump_resolved, load_config
from LoggerService import LoggerService

RESOLVED_CONFIG = "resolved_config.json"


def config_option(func):
    return click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
                        help="TOML run configuration")(func)


def out_option(func):
    return click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                        help="Output directory (defaults to [output] directory)")(func)


def max_dim_option(func):
    return click.option("--max-dim", type=int, default=None, help="Composite dimension budget")(func)


def exit_on_lab_error(func):
    """Translate LabError into its exit code; anything else is a crash."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LabError as e:
            LoggerService.log_exception(e, f"{func.__name__} failed")
            click.echo(f"error: {e}", err=True)
            raise SystemExit(e.exit_code)

    return wrapper


def prepare(config_path: str, out_dir: Optional[str], max_dim: Optional[int] = None) -> Tuple[RunConfig, Path]:
    """Load the configuration, apply CLI overrides and write the resolved configuration into the output directory."""
    config = load_config(config_path)
    if max_dim is not None:
        config = config.model_copy(update={"bath": config.bath.model_copy(update={"max_dim": max_dim})})
    directory = Path(out_dir or config.output.directory)
    atomic_write_text(directory / RESOLVED_CONFIG, dump_resolved(config))
    LoggerService().get_logger().info(f"Run configuration {config_path} resolved into {directory}")
    return config, directory


def config_hash(config: RunConfig) -> str:
    return sha256(dump_resolved(config).encode()).hexdigest()[:16]
