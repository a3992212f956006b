from concurrent.futures import ProcessPoolExecutor
from json import dumps
from pathlib import Path
from typing import Any, Dict, List

import click

from AnalysisService import library_versions
from ConfigService import WORKERS, atomic_write_text
from DatabaseService import get_registry
from LoggerService import LoggerService
from .common import config_hash, exit_on_lab_error, max_dim_option, out_option, prepare
from .pipeline import analysis_core, run_job, scenario_entry, write_report


@click.command()
@click.option("--config", "config_paths", required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False), help="TOML run configuration (repeatable)")
@out_option
@click.option("--workers", type=int, default=WORKERS, show_default=True, help="Worker processes")
@max_dim_option
@exit_on_lab_error
def sweep(config_paths: List[str], out_dir: str, workers: int, max_dim: int):
    """Every configuration times every lambda, in parallel, resuming scenarios the registry marks completed."""
    logging = LoggerService().get_logger()
    jobs, outcomes, hashes, registries = [], [], {}, {}
    root = None
    for index, config_path in enumerate(config_paths):
        config, directory = prepare(config_path, out_dir and f"{out_dir}/config{index}", max_dim)
        hashes[config_path] = config_hash(config)
        root = root or Path(out_dir or config.output.directory)
        if root not in registries:
            registries[root] = get_registry(root, LoggerService())
        registry = registries[root]
        core = analysis_core(config)
        for lam in config.model.lambdas:
            scenario_hash = core.scenario_from_config(config, lam).fingerprint()
            previous = registry.completed(scenario_hash, "sweep")
            if previous is not None:
                logging.info(f"Scenario {scenario_hash} already completed; skipped")
                outcomes.append({"lambda": lam, "scenario_hash": scenario_hash, "exit_code": previous.exit_code,
                                 "markov_error_sup": previous.markov_error_sup, "exponent": previous.exponent,
                                 "directory": previous.output_dir, "resumed": True,
                                 "scenario": scenario_entry(Path(previous.output_dir) / "manifest.json")})
                continue
            target = str(directory / scenario_hash)
            run = registry.start(scenario_hash, "sweep", lam=lam, label=config_path, output_dir=target)
            jobs.append((registry, run, (config.model_dump_json(), lam, target)))

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            returned = list(pool.map(run_job, *zip(*(arguments for _, _, arguments in jobs))))
    else:
        returned = [run_job(*arguments) for _, _, arguments in jobs]

    for (registry, run, _), outcome in zip(jobs, returned):
        registry.finish(run, outcome["exit_code"], outcome.get("markov_error_sup"), outcome.get("exponent"),
                        outcome.get("message", ""))
        outcomes.append({**outcome, "resumed": False})
    for registry in registries.values():
        registry.close()

    scenarios = []
    for o in outcomes:
        entry = o.get("scenario") or {"scenario_hash": o.get("scenario_hash", ""), "lambda": o["lambda"], "csv": "",
                                       "markov_error_sup": o.get("markov_error_sup"), "markov_error_argmax": None,
                                       "gates": [], "fits": [], "provenance": {}}
        scenarios.append({**entry, "directory": o.get("directory", ""),
                          "provenance": {**entry.get("provenance", {}), "exit_code": o["exit_code"],
                                         "resumed": o["resumed"]}})
    summary: Dict[str, Any] = {"scenarios": scenarios,
                               "assertions": [a for o in outcomes for a in o.get("assertions", [])],
                               "passed": all(o["exit_code"] == 0 for o in outcomes),
                               "versions": library_versions(),
                               "configs": hashes}
    text = dumps(summary, indent=2, default=str)
    atomic_write_text(root / "sweep_manifest.json", text)
    write_report(root, text)
    for outcome in outcomes:
        click.echo(f"lambda={outcome['lambda']:g}: exit {outcome['exit_code']}"
                   f"{' (resumed)' if outcome['resumed'] else ''}")
    worst = max((o["exit_code"] for o in outcomes), default=0)
    if worst:
        raise SystemExit(worst)
