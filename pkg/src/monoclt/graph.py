"""Simple undirected graphs with 1-based vertex ids, edge-list I/O and generators.

Edge-list format::

    n=5          # optional, must be the first non-comment line
    1 2
    2 3          # '#' starts a comment, blank lines are ignored

Generator spec strings::

    path:<k>  cycle:<k>  star:<leaves>  complete:<k>  kbipartite:<a>:<b>
    union:<spec>x<m>  er:<n>:<p>:<seed>
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import ParseError, ValidationError

FAMILIES = ("path", "cycle", "star", "complete", "complete_bipartite", "disjoint_union", "erdos_renyi")


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``1..vertex_count``.

    ``edges`` holds normalized pairs ``(u, v)`` with ``u < v``. Use
    :meth:`from_edges` to build from arbitrary pairs.
    """

    vertex_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("a graph needs at least one vertex")
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (1 <= u < v <= self.vertex_count):
                raise ValidationError(f"edge ({u}, {v}) is not normalized or out of range 1..{self.vertex_count}")

    @classmethod
    def from_edges(cls, vertex_count: int, pairs: Iterable[tuple[int, int]]) -> Graph:
        norm = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            norm.add((u, v) if u < v else (v, u))
        return cls(int(vertex_count), frozenset(norm))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        """``adjacency[v]`` is the neighbour set of ``v``; index 0 is unused."""
        nbrs: list[set[int]] = [set() for _ in range(self.vertex_count + 1)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.vertex_count}, m={len(self.edges)})"


def is_connected(g: Graph) -> bool:
    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == g.vertex_count


# ---------------------------------------------------------------------------
# Edge-list I/O

_HEADER = re.compile(r"^n\s*=\s*(\S+)$")


def load_edge_list(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    declared = None
    pairs = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            if seen_content:
                raise ParseError("'n=' header must be the first non-comment line", lineno)
            try:
                declared = int(header.group(1))
            except ValueError:
                raise ParseError(f"bad vertex count {header.group(1)!r}", lineno) from None
            if declared < 1:
                raise ValidationError(f"line {lineno}: vertex count must be positive")
            seen_content = True
            continue
        seen_content = True
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<u> <v>', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
        if u < 1 or v < 1:
            raise ValidationError(f"line {lineno}: vertex ids are 1-based")
        if u == v:
            raise ValidationError(f"line {lineno}: self-loop at vertex {u}")
        if declared is not None and max(u, v) > declared:
            raise ValidationError(f"line {lineno}: vertex {max(u, v)} exceeds declared n={declared}")
        pairs.append((u, v))
    if declared is None:
        if not pairs:
            raise ValidationError("empty edge list without an 'n=' header")
        declared = max(max(p) for p in pairs)
    return Graph.from_edges(declared, pairs)


def render_edge_list(g: Graph) -> str:
    lines = [f"n={g.vertex_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edge_list())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Generators


def path_graph(k: int) -> Graph:
    _require(k >= 1, "path needs k >= 1")
    return Graph.from_edges(k, ((i, i + 1) for i in range(1, k)))


def cycle_graph(k: int) -> Graph:
    _require(k >= 3, "cycle needs k >= 3")
    return Graph.from_edges(k, [(i, i + 1) for i in range(1, k)] + [(k, 1)])


def star_graph(leaves: int) -> Graph:
    """Center is vertex 1, leaves are ``2..leaves+1``."""
    _require(leaves >= 1, "star needs at least one leaf")
    return Graph.from_edges(leaves + 1, ((1, i) for i in range(2, leaves + 2)))


def complete_graph(k: int) -> Graph:
    _require(k >= 1, "complete graph needs k >= 1")
    return Graph.from_edges(k, combinations(range(1, k + 1), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    _require(a >= 1 and b >= 1, "bipartite sides must be >= 1")
    return Graph.from_edges(a + b, ((i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)))


def disjoint_union(g: Graph, m: int) -> Graph:
    """``m`` vertex-disjoint copies of ``g``; copy ``i`` occupies ids ``i*n+1..(i+1)*n``."""
    _require(m >= 1, "union needs m >= 1")
    n = g.vertex_count
    return Graph.from_edges(n * m, ((u + i * n, v + i * n) for i in range(m) for u, v in g.edges))


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): one uniform draw per pair, pairs visited lexicographically."""
    _require(n >= 1, "er needs n >= 1")
    _require(0.0 <= p <= 1.0, "er probability must lie in [0, 1]")
    pairs = list(combinations(range(1, n + 1), 2))
    draws = np.random.default_rng(seed).random(len(pairs))
    return Graph.from_edges(n, (e for e, x in zip(pairs, draws) if x < p))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple = ()
    inner: GeneratorSpec | None = field(default=None)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown graph family {self.family!r}")
        if self.family == "disjoint_union" and self.inner is None:
            raise ValidationError("disjoint_union needs an inner spec")
        if self.family == "erdos_renyi" and len(self.params) != 3:
            raise ValidationError("erdos_renyi needs (n, p, seed)")

    def __str__(self) -> str:
        p = self.params
        if self.family == "complete_bipartite":
            return f"kbipartite:{p[0]}:{p[1]}"
        if self.family == "disjoint_union":
            return f"union:{self.inner}x{p[0]}"
        if self.family == "erdos_renyi":
            return f"er:{p[0]}:{p[1]}:{p[2]}"
        return f"{self.family}:{p[0]}"


_SIMPLE = {"path": "path", "cycle": "cycle", "star": "star", "complete": "complete"}


def parse_generator_spec(text: str) -> GeneratorSpec:
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "union":
            inner, sep, m = rest.rpartition("x")
            if not sep:
                raise ParseError(f"union spec needs 'x<m>': {text!r}")
            return GeneratorSpec("disjoint_union", (int(m),), parse_generator_spec(inner))
        if head in _SIMPLE:
            return GeneratorSpec(_SIMPLE[head], (int(rest),))
        if head == "kbipartite":
            a, b = rest.split(":")
            return GeneratorSpec("complete_bipartite", (int(a), int(b)))
        if head == "er":
            n, p, seed = rest.split(":")
            return GeneratorSpec("erdos_renyi", (int(n), float(p), int(seed)))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad generator spec {text!r}: {exc}") from None
    raise ParseError(f"unknown generator spec {text!r}")


def generate(spec: GeneratorSpec | str) -> Graph:
    if isinstance(spec, str):
        spec = parse_generator_spec(spec)
    p = spec.params
    if spec.family == "path":
        return path_graph(p[0])
    if spec.family == "cycle":
        return cycle_graph(p[0])
    if spec.family == "star":
        return star_graph(p[0])
    if spec.family == "complete":
        return complete_graph(p[0])
    if spec.family == "complete_bipartite":
        return complete_bipartite(p[0], p[1])
    if spec.family == "disjoint_union":
        return disjoint_union(generate(spec.inner), p[0])
    return erdos_renyi(*p)
