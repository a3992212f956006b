from json import dumps

import click

from ConfigService import AssumptionError, atomic_write_text
from DaviesService import get_davies_core
from ModelService import get_model_core
from .common import config_option, exit_on_lab_error, out_option, prepare


@click.command()
@config_option
@out_option
@exit_on_lab_error
def davies(config_path: str, out_dir: str):
    """Build and export the Davies generator with its spectral decomposition for every lambda."""
    config, directory = prepare(config_path, out_dir)
    model_core, davies_core = get_model_core(), get_davies_core()
    model, ff, beta, lambdas = model_core.load_model(config)
    report = model_core.check_assumptions(model, ff, config.model.fgr_tolerance, config.model.degeneracy_tolerance)
    if not report.ok:
        raise AssumptionError(f"generator needs (A1) and (A2a): {report.notes}")
    summary = []
    for lam in lambdas:
        generator = davies_core.build(model, ff, beta, lam, config.model.degeneracy_tolerance)
        decomposition = davies_core.spectral_decomposition(generator, config.model.simplicity_tolerance)
        checks = davies_core.check_cptp(generator)
        name = f"generator_lam{lam:g}.json"
        davies_core.export_generator(generator, decomposition, directory / name)
        summary.append({"lambda": lam, "file": name, "simple": decomposition.simple,
                        "trace_defect": davies_core.trace_defect(generator),
                        "cptp": [check.model_dump() for check in checks]})
        click.echo(f"lambda={lam:g}: {len(decomposition.modes)} modes, simple={decomposition.simple}, "
                   f"CPTP={'ok' if all(check.passed for check in checks) else 'FAILED'} -> {name}")
    atomic_write_text(directory / "generators.json", dumps(summary, indent=2))
