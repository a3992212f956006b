from os import replace
from pathlib import Path
from tempfile import NamedTemporaryFile
from typing import Union


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write through a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with NamedTemporaryFile("w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp",
                            delete=False, newline="") as handle:
        handle.write(text)
        temporary = handle.name
    replace(temporary, path)
    return path
