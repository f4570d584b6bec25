from abc import ABC, abstractmethod
from pathlib import Path
import json

import polars as pl
from loguru import logger


class ArtifactSink(ABC):
    """Destination for run artifacts (CSV frames, JSON documents, JSON lines)."""

    @abstractmethod
    def write_frame(self, name: str, df: pl.DataFrame) -> str:
        pass

    @abstractmethod
    def write_text(self, name: str, text: str) -> str:
        pass

    @abstractmethod
    def read_text(self, name: str) -> str:
        pass

    def write_json(self, name: str, payload: dict) -> str:
        return self.write_text(name, json.dumps(payload, indent=2, sort_keys=True))

    def read_json(self, name: str) -> dict:
        return json.loads(self.read_text(name))


class FileSink(ArtifactSink):
    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, name: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_frame(self, name: str, df: pl.DataFrame) -> str:
        path = self._path(name)
        df.write_csv(path)
        logger.debug(f"Wrote {df.height} rows to {path}")
        return str(path)

    def write_text(self, name: str, text: str) -> str:
        path = self._path(name)
        path.write_text(text)
        logger.debug(f"Wrote {path}")
        return str(path)

    def read_text(self, name: str) -> str:
        return (self.root / name).read_text()


class MemorySink(ArtifactSink):
    """Keeps artifacts in memory; used by dry runs and tests."""

    def __init__(self):
        self.frames: dict[str, pl.DataFrame] = {}
        self.texts: dict[str, str] = {}

    def write_frame(self, name: str, df: pl.DataFrame) -> str:
        self.frames[name] = df
        return name

    def write_text(self, name: str, text: str) -> str:
        self.texts[name] = text
        return name

    def read_text(self, name: str) -> str:
        return self.texts[name]


class StampedSink(ArtifactSink):
    """Wraps a sink and tags every frame with a constant column, e.g. the config hash."""

    def __init__(self, inner: ArtifactSink, column: str, value: str):
        self.inner = inner
        self.column = column
        self.value = value

    def write_frame(self, name: str, df: pl.DataFrame) -> str:
        return self.inner.write_frame(name, df.with_columns(pl.lit(self.value).alias(self.column)))

    def write_text(self, name: str, text: str) -> str:
        return self.inner.write_text(name, text)

    def read_text(self, name: str) -> str:
        return self.inner.read_text(name)
