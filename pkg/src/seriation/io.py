"""Plain-text file formats.

Edge list::

    # comments and blank lines are ignored
    5          <- number of vertices
    0 1        <- one edge per line, u < v, sorted
    1 3

Latents and orderings are one value per line, in vertex order.  Writers
are deterministic so that write -> read -> write is byte-identical.
"""
import json
from pathlib import Path

import numpy as np

from .graph import Graph
from .metrics import check_ranks


class FormatError(ValueError):
    """A file could not be parsed."""


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_edge_list(text):
    lines = list(_data_lines(text))
    if not lines:
        raise FormatError("edge list is empty: missing vertex count")
    lineno, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise FormatError(f"line {lineno}: expected vertex count, got {head!r}") from None
    if n < 0:
        raise FormatError(f"line {lineno}: negative vertex count")
    edges = []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"line {lineno}: vertex out of range [0, {n})")
        if u == v:
            raise FormatError(f"line {lineno}: self loop")
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def format_edge_list(g):
    out = [str(g.n)]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"


def read_edge_list(path):
    return parse_edge_list(Path(path).read_text())


def write_edge_list(path, g):
    Path(path).write_text(format_edge_list(g))


def _read_column(path, convert, what):
    values = []
    for lineno, line in _data_lines(Path(path).read_text()):
        try:
            values.append(convert(line))
        except ValueError:
            raise FormatError(f"{path}: line {lineno}: bad {what} {line!r}") from None
    return values


def read_latents(path):
    lat = np.array(_read_column(path, float, "latent"), dtype=float)
    if lat.size and (lat.min() < 0 or lat.max() > 1 or not np.all(np.isfinite(lat))):
        raise FormatError(f"{path}: latents must lie in [0, 1]")
    return lat


def write_latents(path, latents):
    Path(path).write_text("".join(f"{float(x)!r}\n" for x in latents))


def read_ordering(path):
    ranks = _read_column(path, int, "rank")
    try:
        return check_ranks(np.array(ranks, dtype=np.int64))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_ordering(path, ranks):
    Path(path).write_text("".join(f"{int(r)}\n" for r in ranks))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
