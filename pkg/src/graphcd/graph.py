"""Finite simple graphs, vertex functions and their text formats."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from types import MappingProxyType


class GraphError(ValueError):
    """Malformed graph input or a vertex the graph does not contain."""


class FunctionError(ValueError):
    """Malformed or partial vertex function."""


class Graph:
    """Immutable finite simple undirected graph with string vertex ids.

    Vertices are kept in lexicographic order. Every vertex must have at
    least one neighbour so that the normalized measure ``1/d_x`` exists.
    """

    __slots__ = ("_adj", "_vertices", "_edges")

    def __init__(self, edges: Iterable[tuple[str, str]]):
        adj: dict[str, set[str]] = {}
        for u, v in edges:
            u, v = str(u), str(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u!r}")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        if not adj:
            raise GraphError("graph has no edges")
        self._vertices = tuple(sorted(adj))
        self._adj = {v: frozenset(adj[v]) for v in self._vertices}
        self._edges = tuple(
            sorted((u, v) for u in self._vertices for v in self._adj[u] if u < v)
        )

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self._edges

    def __contains__(self, x: object) -> bool:
        return x in self._adj

    def __len__(self) -> int:
        return len(self._vertices)

    def __iter__(self) -> Iterator[str]:
        return iter(self._vertices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._edges == other._edges

    def __hash__(self) -> int:
        return hash(self._edges)

    def __repr__(self) -> str:
        return f"Graph(vertices={len(self)}, edges={len(self._edges)})"

    def check(self, x: str) -> None:
        if x not in self._adj:
            raise GraphError(f"unknown vertex {x!r}")

    def neighbors(self, x: str) -> tuple[str, ...]:
        """Sorted neighbourhood N_x."""
        self.check(x)
        return tuple(sorted(self._adj[x]))

    def degree(self, x: str) -> int:
        self.check(x)
        return len(self._adj[x])

    def mu(self, x: str) -> float:
        """Vertex measure 1/d_x."""
        return 1.0 / self.degree(x)


def ball(g: Graph, x: str, r: int) -> list[str]:
    """Vertices within graph distance ``r`` of ``x``: ``x`` first, the rest sorted."""
    g.check(x)
    if r not in (0, 1, 2):
        raise GraphError(f"radius must be 0, 1 or 2, got {r!r}")
    seen = {x}
    frontier = {x}
    for _ in range(r):
        frontier = {z for v in frontier for z in g.neighbors(v)} - seen
        seen |= frontier
    return [x] + sorted(seen - {x})


def parse_graph(text: str) -> Graph:
    """Parse an edge list: one ``u v`` pair per line, ``#`` comments.

    An optional ``vertices: a b c`` line declares the vertex set up front;
    declared vertices must then all be covered by edges, and edges may only
    use declared vertices.
    """
    edges: list[tuple[str, str]] = []
    declared: set[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("vertices:"):
            if declared is not None:
                raise GraphError(f"line {lineno}: duplicate vertices header")
            declared = set(line.split(":", 1)[1].split())
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        u, v = parts
        if u == v:
            raise GraphError(f"line {lineno}: self-loop {u!r}")
        if declared is not None and not {u, v} <= declared:
            raise GraphError(f"line {lineno}: vertex not in vertices header")
        edges.append((u, v))
    if not edges:
        raise GraphError("empty graph")
    g = Graph(edges)
    if declared is not None:
        isolated = sorted(declared - set(g.vertices))
        if isolated:
            raise GraphError(f"isolated vertices: {', '.join(isolated)}")
    return g


def serialize_graph(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges)


class VertexFunction(Mapping[str, float]):
    """Immutable real-valued assignment on vertices."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, float] | Iterable[tuple[str, float]]):
        items = dict(values)
        for v, val in items.items():
            val = float(val)
            if not math.isfinite(val):
                raise FunctionError(f"non-finite value at {v!r}")
            items[v] = val
        self._values = MappingProxyType(items)

    def __getitem__(self, v: str) -> float:
        return self._values[v]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"VertexFunction({dict(self._values)!r})"

    def diff(self, x: str, y: str) -> float:
        """f(x, y) = f(y) - f(x)."""
        return self[y] - self[x]

    @classmethod
    def on(cls, g: Graph, values: Iterable[float]) -> VertexFunction:
        """Build from values listed in the graph's vertex order."""
        values = list(values)
        if len(values) != len(g):
            raise FunctionError(f"expected {len(g)} values, got {len(values)}")
        return cls(zip(g.vertices, values))


def require_total(f: Mapping[str, float], g: Graph) -> None:
    missing = [v for v in g.vertices if v not in f]
    if missing:
        raise FunctionError(f"{', '.join(missing)} missing")


def parse_function(text: str, g: Graph) -> VertexFunction:
    """Parse ``vertex value`` lines into a function total on ``g``."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FunctionError(f"line {lineno}: expected 'vertex value', got {raw.strip()!r}")
        v, token = parts
        if v not in g:
            raise FunctionError(f"line {lineno}: unknown vertex {v!r}")
        if v in values:
            raise FunctionError(f"line {lineno}: vertex {v!r} assigned twice")
        try:
            val = float(token)
        except ValueError:
            raise FunctionError(f"line {lineno}: bad value {token!r} for {v!r}") from None
        if not math.isfinite(val):
            raise FunctionError(f"line {lineno}: non-finite value for {v!r}")
        values[v] = val
    require_total(values, g)
    return VertexFunction((v, values[v]) for v in g.vertices)


def format_function(f: Mapping[str, float], g: Graph) -> str:
    # repr keeps full precision so witnesses replay exactly
    return "".join(f"{v} {float(f[v])!r}\n" for v in g.vertices)
