"""Per-story artifact directory.

Every artifact is one UTF-8 file with ``\\n`` line endings, written
atomically so an interrupted run never leaves a half-written checkpoint.
"""

from __future__ import annotations

import os
import tempfile
import threading
from pathlib import Path


class StoryStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def path(self, name: str) -> Path:
        return self.root / name

    def exists(self, name: str) -> bool:
        return self.path(name).exists()

    def read(self, name: str) -> str:
        return self.path(name).read_text(encoding="utf-8")

    def write(self, name: str, text: str) -> Path:
        target = self.path(name)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
        return target

    def log(self, name: str, line: str) -> None:
        with self._lock, open(self.path(name), "a", encoding="utf-8", newline="\n") as fh:
            fh.write(line.rstrip("\n") + "\n")

    def remove(self, name: str) -> None:
        self.path(name).unlink(missing_ok=True)
