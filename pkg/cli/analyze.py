from pathlib import Path

import click

from ConfigService import ConfigError, RunConfig, atomic_write_text, dump_resolved
from .common import RESOLVED_CONFIG, exit_on_lab_error, max_dim_option, out_option, prepare
from .pipeline import analysis_core, analyze as analyze_config


def _from_run_dir(run_dir: str) -> RunConfig:
    path = Path(run_dir) / RESOLVED_CONFIG
    if not path.exists():
        raise ConfigError(f"{run_dir} holds no {RESOLVED_CONFIG}")
    return RunConfig.model_validate_json(path.read_text(encoding="utf-8"))


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="TOML run configuration")
@click.option("--run-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of a previous run to re-analyze")
@out_option
@max_dim_option
@exit_on_lab_error
def analyze(config_path: str, run_dir: str, out_dir: str, max_dim: int):
    """All analysis operations with fits and pass/fail assertions; exit 1 if any assertion fails."""
    if (config_path is None) == (run_dir is None):
        raise ConfigError("give exactly one of --config and --run-dir")
    if config_path is not None:
        config, directory = prepare(config_path, out_dir, max_dim)
    else:
        config = _from_run_dir(run_dir)
        if max_dim is not None:
            config = config.model_copy(update={"bath": config.bath.model_copy(update={"max_dim": max_dim})})
        directory = Path(out_dir or run_dir)
        atomic_write_text(directory / RESOLVED_CONFIG, dump_resolved(config))
    assertions, _ = analyze_config(config, analysis_core(config), directory)
    for assertion in assertions:
        click.echo(f"{'PASS' if assertion.passed else 'FAIL'} {assertion.name}: {assertion.detail}")
    if not all(assertion.passed for assertion in assertions):
        raise SystemExit(1)
