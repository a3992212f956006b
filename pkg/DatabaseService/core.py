from pathlib import Path
from typing import List, Optional, Union

from LoggerService import LoggerService
from .DatabaseSer import DatabaseService
from .config import registry_url
from .models import ScenarioRun


class RunRegistry(DatabaseService):
    """Bookkeeping of sweep scenarios: which hashes completed, with which outcome."""

    def start(self, scenario_hash: str, command: str, lam: Optional[float] = None, label: str = "",
              output_dir: str = "") -> ScenarioRun:
        run = ScenarioRun(scenario_hash=scenario_hash, command=command, lam=lam, label=label, output_dir=output_dir)
        self.add(run)
        if self.logging:
            self.logging.info(f"Registered run {scenario_hash} ({command}, lambda={lam})")
        return run

    def finish(self, run: ScenarioRun, exit_code: int, markov_error_sup: Optional[float] = None,
               exponent: Optional[float] = None, message: str = "") -> ScenarioRun:
        run.update_from_dict({"status": "completed" if exit_code in (0, 1) else "failed", "exit_code": exit_code,
                              "markov_error_sup": markov_error_sup, "exponent": exponent, "message": message})
        self.update(run)
        if self.logging:
            self.logging.info(f"Run {run.scenario_hash} finished with exit code {exit_code}")
        return run

    def completed(self, scenario_hash: str, command: str) -> Optional[ScenarioRun]:
        """Latest completed run of the scenario, if any."""
        runs = self.get(ScenarioRun, {"scenario_hash": scenario_hash, "command": command, "status": "completed"})
        return max(runs, key=lambda run: run.id) if runs else None

    def runs(self, status: Optional[str] = None) -> List[ScenarioRun]:
        return self.get(ScenarioRun, {"status": status} if status else None)

    def close(self) -> None:
        """Release the pooled connections of this registry database."""
        self.dispose(self.url)


def get_registry(directory: Union[str, Path], logger: Optional[LoggerService] = None) -> RunRegistry:
    return RunRegistry(registry_url(directory), logger)
