import click

from .common import config_option, exit_on_lab_error, max_dim_option, out_option, prepare
from .pipeline import analysis_core, simulate as simulate_scenarios


@click.command()
@config_option
@out_option
@max_dim_option
@exit_on_lab_error
def simulate(config_path: str, out_dir: str, max_dim: int):
    """Exact and Markovian trajectories for every lambda, written as CSV with a manifest."""
    config, directory = prepare(config_path, out_dir, max_dim)
    core = analysis_core(config)
    results = simulate_scenarios(config, core)
    assertions = core.assess(results)
    core.write_outputs(results, assertions, directory, {"config": config.model_dump(mode="json")})
    for result in results:
        gates = ", ".join(f"{gate.name}={'skipped' if gate.skipped else gate.passed}" for gate in result.gates)
        click.echo(f"lambda={result.lam:g}: sup Markov error {result.markov_error.supremum:.3e} "
                   f"[{result.scenario_hash}] {gates}")
