from pathlib import Path
from typing import Any, Dict

from jinja2 import Environment, FileSystemLoader, StrictUndefined

_environment = Environment(loader=FileSystemLoader(Path(__file__).parent), undefined=StrictUndefined,
                           trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True)


def render_report(manifest: Dict[str, Any]) -> str:
    """report.md for an analysis or sweep manifest."""
    return _environment.get_template("report.md.j2").render(manifest=manifest)


__all__ = ["render_report"]
