"""Copies of a pattern H inside a host G.

A *copy* is a subgraph of G isomorphic to H (not an embedding): the
``|Aut(H)|`` injective homomorphisms that realise the same vertex set and
edge image collapse to one :class:`Copy`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, ParseError, ValidationError
from .graph import Graph, generate, is_connected, parse_generator_spec

DEFAULT_MAX_COPIES = 5_000_000
MAX_AUTOMORPHISM_VERTICES = 10

PATTERN_ALIASES = {
    "edge": "complete:2",
    "triangle": "complete:3",
    "cherry": "star:2",
}


@dataclass(frozen=True)
class Pattern:
    graph: Graph
    name: str = ""

    def __post_init__(self):
        if self.graph.vertex_count < 2:
            raise ValidationError("pattern needs at least two vertices")
        if not is_connected(self.graph):
            raise ValidationError("pattern must be connected")

    @property
    def r(self) -> int:
        return self.graph.vertex_count

    @cached_property
    def automorphisms(self) -> int:
        return automorphism_count(self)

    def __str__(self) -> str:
        return self.name or f"pattern(r={self.r}, m={len(self.graph.edges)})"


def pattern_from_spec(text: str) -> Pattern:
    """Generator syntax plus the aliases ``triangle``, ``cherry`` and ``edge``."""
    key = text.strip()
    spec = PATTERN_ALIASES.get(key, key)
    try:
        graph = generate(parse_generator_spec(spec))
    except ParseError:
        raise ParseError(f"unknown pattern spec {text!r}") from None
    return Pattern(graph, key)


@dataclass(frozen=True, order=True)
class Copy:
    vertices: tuple[int, ...]
    edge_image: tuple[tuple[int, int], ...]

    @cached_property
    def mask(self) -> int:
        m = 0
        for v in self.vertices:
            m |= 1 << v
        return m

    def __len__(self) -> int:
        return len(self.vertices)


def _match_order(h: Graph) -> list[int]:
    """Connected order of pattern vertices, highest degree first on ties."""
    remaining = set(h.vertices())
    first = max(remaining, key=lambda v: (h.degree(v), -v))
    order = [first]
    remaining.remove(first)
    while remaining:
        placed = set(order)
        frontier = [v for v in remaining if h.adjacency[v] & placed]
        nxt = max(frontier, key=lambda v: (len(h.adjacency[v] & placed), h.degree(v), -v))
        order.append(nxt)
        remaining.remove(nxt)
    return order


def iter_embeddings(h: Graph, g: Graph) -> Iterator[dict[int, int]]:
    """Yield every injective homomorphism ``h -> g`` as a dict."""
    order = _match_order(h)
    pos = {v: i for i, v in enumerate(order)}
    # for each pattern vertex, the earlier-placed neighbours it must be adjacent to
    back = [sorted((w for w in h.adjacency[v] if pos[w] < pos[v]), key=pos.get) for v in order]
    need = [h.degree(v) for v in order]
    image = [0] * len(order)
    used: set[int] = set()

    def extend(i: int) -> Iterator[dict[int, int]]:
        if i == len(order):
            yield {order[j]: image[j] for j in range(len(order))}
            return
        if back[i]:
            anchor = image[pos[back[i][0]]]
            candidates = g.adjacency[anchor]
        else:
            candidates = g.vertices()
        for x in candidates:
            if x in used or g.degree(x) < need[i]:
                continue
            if all(x in g.adjacency[image[pos[w]]] for w in back[i]):
                image[i] = x
                used.add(x)
                yield from extend(i + 1)
                used.discard(x)

    yield from extend(0)


def automorphism_count(h: Pattern | Graph) -> int:
    graph = h.graph if isinstance(h, Pattern) else h
    if graph.vertex_count > MAX_AUTOMORPHISM_VERTICES:
        raise CapacityError(
            f"automorphism search limited to {MAX_AUTOMORPHISM_VERTICES} pattern vertices"
        )
    # an edge-preserving bijection onto a graph with equally many edges is an automorphism
    return sum(1 for _ in iter_embeddings(graph, graph))


@dataclass(frozen=True)
class VertexClasses:
    """Distinct copy vertex sets with multiplicities.

    Every moment and join condition depends on copies only through their
    vertex sets, so the heavy sums run over these classes.
    """

    sets: tuple[tuple[int, ...], ...]
    masks: tuple[int, ...]
    mult: tuple[int, ...]
    by_vertex: dict[int, tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.sets)

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        """Sorted ids of classes sharing at least one vertex with each class."""
        out = []
        for s in self.sets:
            ids = set()
            for v in s:
                ids.update(self.by_vertex[v])
            out.append(tuple(sorted(ids)))
        return tuple(out)

    @cached_property
    def subset_counts(self) -> dict[int, int]:
        """Bitmask of every vertex subset of size >= 1 -> number of copies containing it."""
        counts: dict[int, int] = defaultdict(int)
        for s, mult in zip(self.sets, self.mult):
            bits = [1 << v for v in s]
            for k in range(1, len(bits) + 1):
                for combo in combinations(bits, k):
                    counts[sum(combo)] += mult
        return dict(counts)


@dataclass(frozen=True)
class CopyIndex:
    pattern: Pattern
    host: Graph
    copies: tuple[Copy, ...]
    by_vertex: dict[int, tuple[int, ...]]
    by_vertex_pair: dict[tuple[int, int], tuple[int, ...]]

    @classmethod
    def build(cls, pattern: Pattern, host: Graph, copies: Iterable[Copy]) -> CopyIndex:
        copies = tuple(sorted(copies))
        by_vertex: dict[int, list[int]] = defaultdict(list)
        by_pair: dict[tuple[int, int], list[int]] = defaultdict(list)
        for i, cp in enumerate(copies):
            for v in cp.vertices:
                by_vertex[v].append(i)
            for pair in combinations(cp.vertices, 2):
                by_pair[pair].append(i)
        return cls(
            pattern,
            host,
            copies,
            {v: tuple(ids) for v, ids in by_vertex.items()},
            {p: tuple(ids) for p, ids in by_pair.items()},
        )

    @property
    def r(self) -> int:
        return self.pattern.r

    def __len__(self) -> int:
        return len(self.copies)

    @cached_property
    def classes(self) -> VertexClasses:
        grouped: dict[tuple[int, ...], int] = defaultdict(int)
        for cp in self.copies:
            grouped[cp.vertices] += 1
        sets = tuple(sorted(grouped))
        by_vertex: dict[int, list[int]] = defaultdict(list)
        for i, s in enumerate(sets):
            for v in s:
                by_vertex[v].append(i)
        return VertexClasses(
            sets=sets,
            masks=tuple(sum(1 << v for v in s) for s in sets),
            mult=tuple(grouped[s] for s in sets),
            by_vertex={v: tuple(ids) for v, ids in by_vertex.items()},
        )


def enumerate_copies(h: Pattern, g: Graph, max_copies: int = DEFAULT_MAX_COPIES) -> CopyIndex:
    found: set[Copy] = set()
    edges = h.graph.edge_list()
    for phi in iter_embeddings(h.graph, g):
        image = tuple(sorted((min(phi[u], phi[v]), max(phi[u], phi[v])) for u, v in edges))
        found.add(Copy(tuple(sorted(phi.values())), image))
        if len(found) > max_copies:
            raise CapacityError(f"more than {max_copies} copies (cap max_copies={max_copies})")
    return CopyIndex.build(h, g, found)


def copies_through(idx: CopyIndex, w: Iterable[int]) -> int:
    """D_w: the number of copies whose vertex set contains every vertex of ``w``."""
    w = sorted(set(w))
    if not 1 <= len(w) <= idx.r:
        raise ValidationError(f"|w| must lie in 1..{idx.r}")
    if len(w) == 1:
        return len(idx.by_vertex.get(w[0], ()))
    bucket = idx.by_vertex_pair.get((w[0], w[1]), ())
    if len(w) == 2:
        return len(bucket)
    rest = w[2:]
    return sum(1 for i in bucket if all(v in idx.copies[i].vertices for v in rest))


def copies_from_vertex_lists(
    h: Pattern, g: Graph | None, lists: Sequence[Sequence[int]]
) -> list[Copy]:
    """Turn vertex lists into copies. With a host, each list must carry a copy of ``h``."""
    out = []
    for verts in lists:
        verts = tuple(int(v) for v in verts)
        if len(set(verts)) != len(verts) or len(verts) != h.r:
            raise ValidationError(f"copy {verts} must list {h.r} distinct vertices")
        if g is None:
            out.append(Copy(tuple(sorted(verts)), ()))
            continue
        if max(verts) > g.vertex_count:
            raise ValidationError(f"copy {verts} leaves the host")
        sub = Graph.from_edges(
            len(verts),
            ((i + 1, j + 1) for (i, a), (j, b) in combinations(enumerate(verts), 2) if g.has_edge(a, b)),
        )
        phi = next(iter_embeddings(h.graph, sub), None)
        if phi is None:
            raise ValidationError(f"vertices {verts} carry no copy of the pattern in the host")
        image = tuple(sorted(
            tuple(sorted((verts[phi[u] - 1], verts[phi[v] - 1]))) for u, v in h.graph.edge_list()
        ))
        out.append(Copy(tuple(sorted(verts)), image))
    return out
