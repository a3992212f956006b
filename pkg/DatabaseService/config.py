from pathlib import Path
from typing import Union

from ConfigService import REGISTRY_URL

REGISTRY_FILE = "runs.db"


def registry_url(directory: Union[str, Path]) -> str:
    """REGISTRY_URL when set, otherwise a SQLite file inside `directory`."""
    if REGISTRY_URL:
        return REGISTRY_URL
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return f"sqlite:///{(path / REGISTRY_FILE).as_posix()}"
