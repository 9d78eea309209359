"""File-system access behind one small interface.

The virtual store is the default everywhere (sandbox semantics and hermetic
tests); the CLI swaps in RealFS so os predicates reach the actual disk.
"""

from __future__ import annotations

import json
import os


class VirtualFS:
    """In-memory path -> text store. Paths are flat strings; a directory is
    whatever prefix ends at '/'."""

    def __init__(self, files=None):
        self.files: dict[str, str] = dict(files) if files else {}

    @classmethod
    def from_fixture(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("VFS fixture must be a JSON object of path: text")
        return cls({str(k): str(v) for k, v in data.items()})

    def exists(self, path) -> bool:
        return path in self.files

    def read(self, path) -> str:
        if path not in self.files:
            raise FileNotFoundError(path)
        return self.files[path]

    def write(self, path, text, append=False):
        if append and path in self.files:
            self.files[path] += text
        else:
            self.files[path] = text

    def listdir(self, path) -> list[str]:
        prefix = path.rstrip("/") + "/" if path not in ("", ".") else ""
        seen = []
        for p in self.files:
            if p.startswith(prefix):
                rest = p[len(prefix):]
                name = rest.split("/", 1)[0]
                if name and name not in seen:
                    seen.append(name)
        return seen


class RealFS:
    def exists(self, path) -> bool:
        return os.path.exists(path)

    def read(self, path) -> str:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()

    def write(self, path, text, append=False):
        with open(path, "a" if append else "w", encoding="utf-8") as fh:
            fh.write(text)

    def listdir(self, path) -> list[str]:
        return sorted(os.listdir(path or "."))
