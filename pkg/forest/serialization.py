from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from common import ForestInvariantError
from .colored_forest import ColoredForest, NO_PARENT


class ForestHeader(BaseModel):
    """First line of a forest file; N can't be recovered from the vertices when a type is absent."""

    model_config = ConfigDict(extra="forbid")

    n_types: int
    h_max: int


class VertexRecord(BaseModel):
    index: int
    color: int
    parent: int | None
    height: int


def forest_to_jsonl(forest: ColoredForest) -> str:
    lines = [ForestHeader(n_types=forest.n_types, h_max=forest.h_max).model_dump_json()]
    for v in range(len(forest)):
        parent = int(forest.parents[v])
        record = VertexRecord(
            index=v,
            color=int(forest.colors[v]),
            parent=None if parent == NO_PARENT else parent,
            height=int(forest.heights[v]),
        )
        lines.append(record.model_dump_json())
    return "\n".join(lines) + "\n"


def read_header(line: str) -> ForestHeader | None:
    try:
        return ForestHeader.model_validate_json(line)
    except ValidationError:
        return None


def forest_from_jsonl(text: str, n_types: int | None = None, h_max: int | None = None) -> ColoredForest:
    """
    Rebuild and validate a forest. N and h_max come from the arguments, then
    the header line, then what the vertices imply.
    """
    lines = [(lineno, line) for lineno, line in enumerate(text.splitlines(), start=1) if line.strip()]
    header = read_header(lines[0][1]) if lines else None
    if header is not None:
        lines = lines[1:]
        n_types = header.n_types if n_types is None else n_types
        h_max = header.h_max if h_max is None else h_max
    records = []
    for lineno, line in lines:
        try:
            records.append(VertexRecord.model_validate_json(line))
        except ValidationError as e:
            raise ForestInvariantError(f"line {lineno}: {e.errors()[0]['msg']}") from None
    for expected, record in enumerate(records):
        if record.index != expected:
            raise ForestInvariantError(f"labels must run 0..n-1, found {record.index}", expected)
    colors = np.array([r.color for r in records], dtype=np.int64)
    parents = np.array([NO_PARENT if r.parent is None else r.parent for r in records], dtype=np.int64)
    heights = np.array([r.height for r in records], dtype=np.int64)
    if n_types is None:
        n_types = int(colors.max()) if colors.size else 0
    if h_max is None:
        h_max = int(heights.max()) if heights.size else 0
    return ColoredForest(colors, parents, heights, n_types=n_types, h_max=h_max)


def write_forest(forest: ColoredForest, path: str | Path):
    Path(path).write_text(forest_to_jsonl(forest))


def read_forest(path: str | Path, n_types: int | None = None, h_max: int | None = None) -> ColoredForest:
    return forest_from_jsonl(Path(path).read_text(), n_types=n_types, h_max=h_max)
