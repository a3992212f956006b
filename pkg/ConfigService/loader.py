import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from json import dumps
from pathlib import Path
from typing import Dict, Tuple, Union

from pydantic import ValidationError as PydanticValidationError

from .errors import ConfigError
from .schema import RunConfig

_TABLE = re.compile(r"^\s*\[\[?\s*([^\]]+?)\s*\]\]?\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-\"'.]+)\s*=")
_TOML_LINE = re.compile(r"line (\d+)")


def _key_lines(text: str) -> Dict[Tuple[str, ...], int]:
    """Map dotted key paths of a TOML document to the line that defines them."""
    lines: Dict[Tuple[str, ...], int] = {}
    table: Tuple[str, ...] = ()
    for number, raw in enumerate(text.splitlines(), start=1):
        header = _TABLE.match(raw)
        if header:
            table = tuple(part.strip().strip('"\'') for part in header.group(1).split("."))
            lines.setdefault(table, number)
            continue
        key = _KEY.match(raw)
        if key:
            path = table + tuple(part.strip('"\'') for part in key.group(1).split("."))
            lines.setdefault(path, number)
    return lines


def _locate(loc: Tuple[Union[str, int], ...], lines: Dict[Tuple[str, ...], int]) -> Tuple[int, str]:
    keys = tuple(str(part) for part in loc if isinstance(part, str))
    for size in range(len(keys), 0, -1):
        if keys[:size] in lines:
            return lines[keys[:size]], ".".join(keys)
    return None, ".".join(keys)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration given as text."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_LINE.search(str(e))
        raise ConfigError(f"TOML syntax error: {e}", line=int(match.group(1)) if match else None) from e
    try:
        return RunConfig.model_validate(raw)
    except PydanticValidationError as e:
        first = e.errors()[0]
        line, key = _locate(tuple(first["loc"]), _key_lines(text))
        if line is None:
            # cross-reference errors are raised on the root model; point at the first mention
            name = re.search(r"'([^']+)'", first["msg"])
            if name:
                line = next((number for number, raw in enumerate(text.splitlines(), start=1)
                             if f'"{name.group(1)}"' in raw), None)
                key = key or name.group(1)
        raise ConfigError(f"invalid configuration: {first['msg']}", line=line, key=key) from e


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a run configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read configuration file {path}: {e}") from e
    return parse_config(text)


def dump_resolved(config: RunConfig) -> str:
    """Resolved configuration (defaults filled in) as canonical JSON."""
    return dumps(config.model_dump(mode="json"), indent=2, sort_keys=True)
