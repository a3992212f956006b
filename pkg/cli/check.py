import click

from ModelService import get_model_core
from .common import config_option, exit_on_lab_error, out_option, prepare


@click.command()
@config_option
@out_option
@exit_on_lab_error
def check(config_path: str, out_dir: str):
    """Check (A1) and (A2a) for the configured model; exit 1 if either fails."""
    config, _ = prepare(config_path, out_dir)
    core = get_model_core()
    model, ff, _, _ = core.load_model(config)
    report = core.check_assumptions(model, ff, config.model.fgr_tolerance, config.model.degeneracy_tolerance)
    click.echo(f"A1:  {'ok' if report.a1_ok else 'FAILED'}")
    click.echo(f"A2a: {'ok' if report.a2a_ok else 'FAILED'}")
    for m, n, value in report.a2a_witness:
        click.echo(f"  <phi_{m}, G phi_{n}> J = {value.real:.6e}{value.imag:+.6e}j")
    if report.notes:
        click.echo(report.notes)
    if not report.ok:
        raise SystemExit(1)
